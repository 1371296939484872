#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "divpot/errors.hpp"
#include "divpot/rolling.hpp"
#include "divpot/synth.hpp"
#include "test_support.hpp"

namespace divpot {
namespace {

using testing::panel_from;

WindowConfig config(std::size_t length, std::size_t step) {
  WindowConfig cfg;
  cfg.length = length;
  cfg.step = step;
  return cfg;
}

/// Columns 1..p of a 2^k Hadamard matrix, scaled by 2^-7: zero-mean and
/// exactly orthogonal in floating point, so the sample correlation is I.
Eigen::MatrixXd orthogonal_returns(Eigen::Index rows, Eigen::Index p) {
  Eigen::MatrixXd x(rows, p);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const int parity = std::popcount(static_cast<unsigned>(i & (j + 1))) % 2;
      x(i, j) = (parity ? -1.0 : 1.0) * 0.0078125;
    }
  }
  return x;
}

TEST(WindowSchedule, Counts) {
  EXPECT_EQ(window_schedule(504, config(504, 5)).size(), 1u);
  EXPECT_EQ(window_schedule(1000, config(504, 5)).size(), 100u);
  EXPECT_EQ(window_schedule(3509, config(504, 5)).size(), 602u);
  const auto w = window_schedule(1000, config(504, 5));
  EXPECT_EQ(w.front(), (WindowRange{0, 504}));
  EXPECT_EQ(w.back(), (WindowRange{495, 999}));
}

TEST(WindowSchedule, Errors) {
  EXPECT_THROW(window_schedule(503, config(504, 5)), InsufficientDataError);
  EXPECT_THROW(window_schedule(100, config(1, 5)), ValidationError);
  EXPECT_THROW(window_schedule(100, config(10, 0)), ValidationError);
  WindowConfig bad = config(10, 1);
  bad.criteria.stop_threshold = 0.9;
  EXPECT_THROW(window_schedule(100, bad), ValidationError);
}

TEST(WindowSchedule, CountLawProperty) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> len(2, 300), step(1, 30), extra(0, 2000);
  for (int trial = 0; trial < 500; ++trial) {
    const auto cfg = config(len(rng), step(rng));
    const std::size_t rows = cfg.length + extra(rng);
    const auto w = window_schedule(rows, cfg);
    ASSERT_EQ(w.size(), (rows - cfg.length) / cfg.step + 1);
    for (std::size_t k = 0; k < w.size(); ++k) {
      EXPECT_EQ(w[k].start, k * cfg.step);
      EXPECT_EQ(w[k].end - w[k].start, cfg.length);
    }
    EXPECT_LE(w.back().end, rows);
  }
}

TEST(MeasureSet, ParseAndContains) {
  auto m = MeasureSet::none();
  EXPECT_TRUE(m.empty());
  m.add(MeasureSet::parse("dr"));
  EXPECT_TRUE(m.contains(Measure::dr));
  EXPECT_FALSE(m.contains(Measure::kmo));
  EXPECT_THROW(MeasureSet::parse("absorption"), ValidationError);
}

TEST(IndexWindowReturn, Cases) {
  const std::vector<Date> dates = synth::business_days(Date::from_ymd(2012, 3, 1), 3);
  const IndexSeries flat(dates, {100, 100, 100});
  EXPECT_EQ(index_window_return(flat, dates), 0.0);
  const IndexSeries up(dates, {100, 110, 120});
  EXPECT_NEAR(index_window_return(up, dates), 0.20, 1e-15);
  const std::vector<Date> outside = {dates[0], Date::from_ymd(2013, 1, 2)};
  EXPECT_THROW(index_window_return(up, outside), CoverageError);
}

TEST(RunWindow, EquicorrelatedPc1NearAnalyticValue) {
  // Asymptotic sd of the top eigenvalue is lambda * sqrt(2 / n); with n = 5000
  // and lambda = 6.4 that is 1.28 percentage points of pc1_pct.
  const auto returns = synth::equicorrelated_returns(10, 5000, 0.6, 0.01, 77);
  const auto row = run_window(whole_panel(returns), config(5000, 1));
  ASSERT_TRUE(row.pc1_pct);
  EXPECT_NEAR(*row.pc1_pct, 64.0, 4 * 1.28);
  EXPECT_TRUE(row.errors.empty());
}

TEST(RunWindow, IdentityCorrelationMarksKmoUndefined) {
  const auto panel = panel_from(orthogonal_returns(16, 10));
  const auto row = run_window(whole_panel(panel), config(16, 1));
  EXPECT_FALSE(row.kmo);
  ASSERT_FALSE(row.errors.empty());
  EXPECT_EQ(row.errors.front().field, "kmo");
  EXPECT_NE(row.errors.front().message.find("undefined"), std::string::npos);
  ASSERT_TRUE(row.dr);
  EXPECT_NEAR(*row.dr, std::sqrt(10.0), 1e-12);
  EXPECT_EQ(row.n_selected, std::optional<std::size_t>{10});
  EXPECT_NEAR(*row.pc1_pct, 10.0, 1e-12);
}

TEST(RunWindow, PerfectlyCorrelatedPairRecordsFloor) {
  Eigen::MatrixXd x(6, 2);
  x.col(0) << 0.01, -0.02, 0.015, 0.0, 0.03, -0.01;
  x.col(1) = 2.0 * x.col(0);
  const auto row = run_window(whole_panel(panel_from(x)), config(6, 1));
  EXPECT_EQ(row.n_selected, std::optional<std::size_t>{2});
  EXPECT_NEAR(*row.pc1_pct, 100.0, 1e-12);
  EXPECT_FALSE(row.kmo);  // singular correlation matrix
  EXPECT_NEAR(*row.dr, 1.0, 1e-12);
}

TEST(RunWindow, MeasureRestrictionLeavesOtherFieldsEmpty) {
  const auto returns = synth::equicorrelated_returns(5, 50, 0.3, 0.01, 1);
  const auto row = run_window(whole_panel(returns), config(50, 1), nullptr, MeasureSet::none().add(Measure::dr));
  EXPECT_TRUE(row.dr);
  EXPECT_FALSE(row.kmo);
  EXPECT_FALSE(row.pc1_pct);
  EXPECT_FALSE(row.n_selected);
  EXPECT_TRUE(row.errors.empty());
}

TEST(RunWindow, OneFailingMeasureDoesNotBlankTheOthers) {
  Eigen::MatrixXd x = synth::equicorrelated_returns(4, 30, 0.3, 0.01, 2).returns();
  x.col(2).setConstant(0.001);
  const auto row = run_window(whole_panel(panel_from(x)), config(30, 1));
  EXPECT_FALSE(row.kmo);
  EXPECT_FALSE(row.pc1_pct);
  EXPECT_FALSE(row.n_selected);
  EXPECT_TRUE(row.dr);
  ASSERT_EQ(row.errors.size(), 3u);
  EXPECT_EQ(row.errors[0].field, "kmo");
  EXPECT_EQ(row.errors[1].field, "pc1_pct");
  EXPECT_EQ(row.errors[2].field, "n_selected");
}

TEST(RunWindow, IndexReturnAttachesToWindowEnd) {
  const auto returns = synth::equicorrelated_returns(3, 20, 0.3, 0.01, 3);
  std::vector<double> levels(returns.num_rows());
  std::iota(levels.begin(), levels.end(), 100.0);
  const IndexSeries index(returns.dates(), levels);
  const auto row = run_window(make_window(returns, 5, 10), config(10, 1), &index);
  EXPECT_EQ(row.window_end, returns.dates()[14]);
  EXPECT_NEAR(*row.index_return, (114.0 - 105.0) / 105.0, 1e-15);

  const IndexSeries short_index(std::vector<Date>(returns.dates().begin(), returns.dates().begin() + 10),
                                std::vector<double>(levels.begin(), levels.begin() + 10));
  const auto missing = run_window(make_window(returns, 5, 10), config(10, 1), &short_index);
  EXPECT_FALSE(missing.index_return);
  EXPECT_EQ(missing.errors.back().field, "index_return");
  EXPECT_TRUE(missing.kmo);
}

ReturnPanel two_regime(std::size_t n, std::size_t horizon, std::uint64_t seed) {
  synth::FactorSpec spec;
  spec.n_stocks = n;
  spec.horizon = horizon;
  spec.seed = seed;
  spec.scale = 0.01;
  spec.regimes = {{0, 0.3, 1.0}, {horizon / 2, 0.8, 1.0}};
  return synth::factor_model_returns(spec);
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

TEST(RunSeries, TwoRegimeDirections) {
  const std::size_t horizon = 1600;
  const auto returns = two_regime(15, horizon, 99);
  const auto cfg = config(300, 10);
  const auto series = run_series(returns, cfg);
  const auto schedule = window_schedule(horizon, cfg);
  std::vector<double> kmo1, kmo2, pc1, pc2, dr1, dr2, n1, n2;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const auto& row = series.rows[k];
    if (schedule[k].end <= horizon / 2) {
      kmo1.push_back(*row.kmo), pc1.push_back(*row.pc1_pct), dr1.push_back(*row.dr);
      n1.push_back(static_cast<double>(*row.n_selected));
    } else if (schedule[k].start >= horizon / 2) {
      kmo2.push_back(*row.kmo), pc2.push_back(*row.pc1_pct), dr2.push_back(*row.dr);
      n2.push_back(static_cast<double>(*row.n_selected));
    }
  }
  EXPECT_GT(mean_of(kmo2), mean_of(kmo1));
  EXPECT_GT(mean_of(pc2), mean_of(pc1));
  EXPECT_LT(mean_of(dr2), mean_of(dr1));
  EXPECT_LT(mean_of(n2), mean_of(n1));
}

TEST(RunSeries, SingleWindowGivesOneRow) {
  const auto returns = synth::equicorrelated_returns(4, 40, 0.4, 0.01, 5);
  const auto series = run_series(returns, config(40, 5));
  ASSERT_EQ(series.rows.size(), 1u);
  EXPECT_EQ(series.rows[0].window_end, returns.dates().back());
}

TEST(RunSeries, ShuffledTickersGiveSameSeries) {
  const auto returns = two_regime(12, 600, 21);
  std::vector<Eigen::Index> perm(12);
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(1));
  Eigen::MatrixXd shuffled(returns.returns().rows(), 12);
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < 12; ++j) {
    shuffled.col(j) = returns.returns().col(perm[static_cast<std::size_t>(j)]);
    names.push_back(returns.tickers()[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])]);
  }
  const ReturnPanel other(returns.dates(), names, shuffled);
  const auto cfg = config(200, 20);
  const auto a = run_series(returns, cfg);
  const auto b = run_series(other, cfg);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    EXPECT_NEAR(*a.rows[k].kmo, *b.rows[k].kmo, 1e-12);
    EXPECT_NEAR(*a.rows[k].pc1_pct, *b.rows[k].pc1_pct, 1e-10);
    EXPECT_NEAR(*a.rows[k].dr, *b.rows[k].dr, 1e-12);
    EXPECT_EQ(a.rows[k].n_selected, b.rows[k].n_selected);
  }
}

TEST(RunSeries, ParallelEqualsSequentialAndRunsAreDeterministic) {
  const auto returns = two_regime(10, 800, 5);
  const auto cfg = config(120, 7);
  const auto seq = run_series(returns, cfg);
  const auto again = run_series(returns, cfg);
  RunOptions parallel;
  parallel.threads = 4;
  const auto par = run_series(returns, cfg, nullptr, parallel);
  EXPECT_TRUE(seq == again);
  EXPECT_TRUE(seq == par);
  std::ostringstream a, b;
  write_metrics_csv(a, seq);
  write_metrics_csv(b, par);
  EXPECT_EQ(a.str(), b.str());
}

TEST(RunSeries, StockPanelWithGapIsRejected) {
  auto panel = synth::prices_from_returns(synth::equicorrelated_returns(3, 20, 0.2, 0.01, 1));
  Eigen::MatrixXd close = panel.close();
  close(4, 1) = std::numeric_limits<double>::quiet_NaN();
  const StockPanel gappy(panel.dates(), panel.tickers(), close, panel.dividend());
  EXPECT_THROW(run_series(gappy, config(10, 1)), IncompleteDataError);
  EXPECT_EQ(run_series(panel, config(10, 1)).rows.size(), 11u);
}

TEST(MetricsCsv, LayoutAndDiagnostics) {
  MetricsSeries series;
  MetricsRow ok;
  ok.window_end = Date::from_ymd(2020, 1, 2);
  ok.kmo = 0.5;
  ok.pc1_pct = 12.25;
  ok.n_selected = 7;
  ok.dr = 2.0;
  MetricsRow bad;
  bad.window_end = Date::from_ymd(2020, 1, 9);
  bad.dr = 1.5;
  bad.errors.push_back({"kmo", "singular, \"badly\""});
  series.rows = {ok, bad};
  std::ostringstream metrics, diagnostics;
  write_metrics_csv(metrics, series);
  write_diagnostics_csv(diagnostics, series);
  EXPECT_EQ(metrics.str(),
            "window_end,kmo,pc1_pct,n_selected,dr,index_return\n"
            "2020-01-02,0.5,12.25,7,2,\n"
            "2020-01-09,,,,1.5,\n");
  EXPECT_EQ(diagnostics.str(),
            "window_end,field,error\n"
            "2020-01-09,kmo,\"singular, \"\"badly\"\"\"\n");
}

}  // namespace
}  // namespace divpot
