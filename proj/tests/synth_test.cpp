#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "divpot/errors.hpp"
#include "divpot/matrix_stats.hpp"
#include "divpot/rolling.hpp"
#include "divpot/synth.hpp"
#include "oracles.hpp"

namespace divpot {
namespace {

using synth::FactorSpec;

TEST(NormalStream, EngineIsTheStandardMersenneTwister) {
  std::mt19937_64 engine;
  engine.discard(9999);
  EXPECT_EQ(engine(), 9981545732273789042ull);  // value mandated by the C++ standard
}

TEST(NormalStream, BoxMullerPairFromRawEngine) {
  const std::uint64_t seed = synth::stream_seed(42, 1, 0);
  std::mt19937_64 engine(seed);
  const double u1 = (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  synth::NormalStream stream(seed);
  EXPECT_EQ(stream.next(), radius * std::cos(2.0 * std::numbers::pi * u2));
  EXPECT_EQ(stream.next(), radius * std::sin(2.0 * std::numbers::pi * u2));
}

TEST(NormalStream, StreamsDiffer) {
  EXPECT_NE(synth::stream_seed(1, 1, 0), synth::stream_seed(1, 2, 0));
  EXPECT_NE(synth::stream_seed(1, 2, 0), synth::stream_seed(1, 2, 1));
  EXPECT_NE(synth::stream_seed(1, 2, 0), synth::stream_seed(2, 2, 0));
}

TEST(Equicorrelated, SameSeedSamePanel) {
  const auto a = synth::equicorrelated_returns(4, 100, 0.3, 0.02, 7);
  const auto b = synth::equicorrelated_returns(4, 100, 0.3, 0.02, 7);
  const auto c = synth::equicorrelated_returns(4, 100, 0.3, 0.02, 8);
  EXPECT_EQ(a.returns(), b.returns());
  EXPECT_EQ(a.dates(), b.dates());
  EXPECT_NE(a.returns(), c.returns());
}

TEST(Equicorrelated, ZeroRhoGivesVanishingCorrelation) {
  const std::size_t horizon = 20000;
  const auto r = synth::equicorrelated_returns(6, horizon, 0.0, 0.01, 3);
  const auto corr = correlation_matrix(whole_panel(r));
  double sum = 0.0;
  int count = 0;
  for (Eigen::Index j = 0; j < 6; ++j) {
    for (Eigen::Index k = j + 1; k < 6; ++k, ++count) sum += corr.values(j, k);
  }
  EXPECT_LT(std::abs(sum / count), 3.0 / std::sqrt(static_cast<double>(horizon)));
}

TEST(Equicorrelated, SampleKmoApproachesAnalyticValue) {
  const auto r = synth::equicorrelated_returns(3, 50000, 0.5, 0.01, 11);
  EXPECT_NEAR(kmo(correlation_matrix(whole_panel(r))), 9.0 / 13.0, 0.01);
}

TEST(Equicorrelated, ParameterValidation) {
  EXPECT_THROW(synth::equicorrelated_returns(1, 10, 0.3, 0.01, 1), ValidationError);
  EXPECT_THROW(synth::equicorrelated_returns(3, 1, 0.3, 0.01, 1), ValidationError);
  EXPECT_THROW(synth::equicorrelated_returns(3, 10, 1.0, 0.01, 1), ValidationError);
  EXPECT_THROW(synth::equicorrelated_returns(3, 10, -0.1, 0.01, 1), ValidationError);
  EXPECT_THROW(synth::equicorrelated_returns(3, 10, 0.3, 0.0, 1), ValidationError);
}

FactorSpec spec_with(std::size_t n, std::size_t horizon, std::vector<synth::Regime> regimes, std::uint64_t seed = 1) {
  FactorSpec s;
  s.n_stocks = n;
  s.horizon = horizon;
  s.regimes = std::move(regimes);
  s.seed = seed;
  s.scale = 0.01;
  return s;
}

TEST(FactorModel, ZeroBetaIsUncorrelated) {
  const auto r = synth::factor_model_returns(spec_with(5, 20000, {{0, 0.0, 1.0}}));
  const auto corr = correlation_matrix(whole_panel(r));
  for (Eigen::Index j = 0; j < 5; ++j) {
    for (Eigen::Index k = j + 1; k < 5; ++k) EXPECT_LT(std::abs(corr.values(j, k)), 4.0 / std::sqrt(20000.0));
  }
}

TEST(FactorModel, PrefixStableAcrossStockCounts) {
  const auto small = synth::factor_model_returns(spec_with(5, 300, {{0, 0.5, 1.0}, {150, 0.2, 0.7}}, 9));
  const auto large = synth::factor_model_returns(spec_with(8, 300, {{0, 0.5, 1.0}, {150, 0.2, 0.7}}, 9));
  EXPECT_EQ(small.returns(), large.returns().leftCols(5));
  EXPECT_EQ(small.tickers()[4], large.tickers()[4]);
}

TEST(FactorModel, RisingBetaGivesRisingPc1Trend) {
  const std::size_t horizon = 3000;
  FactorSpec spec = spec_with(20, horizon, {{0, 0.3, 1.0}, {1500, 0.8, 1.0}}, 17);
  spec.scale = 0.01;
  WindowConfig cfg;
  cfg.length = 250;
  cfg.step = 10;
  const auto series = run_series(synth::factor_model_returns(spec), cfg, nullptr,
                                 RunOptions{MeasureSet::none().add(Measure::pc1), 1});
  // Least-squares slope of pc1_pct against window index over the transition.
  std::vector<double> ys;
  const auto schedule = window_schedule(horizon, cfg);
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    if (schedule[k].end > 1500 - 250 && schedule[k].start < 1500 + 250) ys.push_back(*series.rows[k].pc1_pct);
  }
  ASSERT_GT(ys.size(), 10u);
  const double n = static_cast<double>(ys.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double x = static_cast<double>(i);
    sx += x, sy += ys[i], sxx += x * x, sxy += x * ys[i];
  }
  EXPECT_GT((n * sxy - sx * sy) / (n * sxx - sx * sx), 0.0);
}

TEST(FactorModel, SampleMomentsConvergeToPopulation) {
  const std::size_t horizon = 50000;
  const double beta = 0.6, idio = 0.8, scale = 0.02;
  FactorSpec spec = spec_with(4, horizon, {{0, beta, idio}}, 23);
  spec.scale = scale;
  const auto r = synth::factor_model_returns(spec);
  const Eigen::MatrixXd cov = testing::two_pass_covariance(r.returns());
  const double var = scale * scale * (beta * beta + idio * idio);
  const double rho = beta * beta / (beta * beta + idio * idio);
  const double t = static_cast<double>(horizon);
  for (Eigen::Index j = 0; j < 4; ++j) {
    EXPECT_NEAR(cov(j, j), var, 3.0 * var * std::sqrt(2.0 / t));
    for (Eigen::Index k = j + 1; k < 4; ++k) {
      EXPECT_NEAR(cov(j, k) / std::sqrt(cov(j, j) * cov(k, k)), rho, 3.0 * (1 - rho * rho) / std::sqrt(t));
    }
  }
}

TEST(FactorModel, RegimeSwitchChangesLoadingOnSchedule) {
  const auto r = synth::factor_model_returns(spec_with(2, 10, {{0, 0.0, 1.0}, {5, 0.5, 0.5}}, 3));
  synth::NormalStream f(synth::stream_seed(3, 1, 0));
  synth::NormalStream e0(synth::stream_seed(3, 2, 0));
  for (Eigen::Index t = 0; t < 10; ++t) {
    const double ft = f.next();
    const double et = e0.next();
    EXPECT_EQ(r.returns()(t, 0), t < 5 ? 0.01 * (0.0 * ft + 1.0 * et) : 0.01 * (0.5 * ft + 0.5 * et));
  }
}

TEST(FactorSpec, Validation) {
  EXPECT_THROW(synth::factor_model_returns(spec_with(1, 10, {{0, 0.3, 1}})), ValidationError);
  EXPECT_THROW(synth::factor_model_returns(spec_with(3, 10, {})), ValidationError);
  EXPECT_THROW(synth::factor_model_returns(spec_with(3, 10, {{1, 0.3, 1}})), ValidationError);
  EXPECT_THROW(synth::factor_model_returns(spec_with(3, 10, {{0, 0.3, 1}, {0, 0.5, 1}})), ValidationError);
  EXPECT_THROW(synth::factor_model_returns(spec_with(3, 10, {{0, 0.3, 1}, {10, 0.5, 1}})), ValidationError);
  EXPECT_THROW(synth::factor_model_returns(spec_with(3, 10, {{0, 1.0, 1}})), ValidationError);
  EXPECT_THROW(synth::factor_model_returns(spec_with(3, 10, {{0, 0.3, 0}})), ValidationError);
}

TEST(FactorSpec, JsonRoundTripAndErrors) {
  FactorSpec spec = spec_with(30, 4000, {{0, 0.3, 1.0}, {2000, 0.8, 1.0}}, 123);
  spec.scale = 0.01;
  const auto back = FactorSpec::from_json(spec.to_json());
  EXPECT_EQ(back.to_json(), spec.to_json());
  EXPECT_THROW(FactorSpec::from_json(nlohmann::json{{"n_stocks", 3}}), ValidationError);
  auto j = spec.to_json();
  j["start_date"] = "2001-02-30";
  EXPECT_THROW(FactorSpec::from_json(j), ValidationError);
  j = spec.to_json();
  j["regimes"][0]["beta"] = "high";
  EXPECT_THROW(FactorSpec::from_json(j), ValidationError);
}

TEST(BusinessDays, SkipWeekendsAndRollStart) {
  const auto days = synth::business_days(Date::from_ymd(2000, 1, 1), 3);  // Saturday
  EXPECT_EQ(days, (std::vector<Date>{Date::from_ymd(2000, 1, 3), Date::from_ymd(2000, 1, 4), Date::from_ymd(2000, 1, 5)}));
}

TEST(PricesFromReturns, RecoversReturns) {
  const auto r = synth::equicorrelated_returns(5, 200, 0.4, 0.02, 31);
  const auto prices = synth::prices_from_returns(r);
  EXPECT_EQ(prices.num_dates(), 201u);
  EXPECT_TRUE(prices.close().row(0).isConstant(100.0));
  EXPECT_TRUE(prices.dividend().isZero(0.0));
  const auto back = simple_returns(prices);
  EXPECT_EQ(back.dates(), r.dates());
  EXPECT_LE((back.returns() - r.returns()).cwiseAbs().maxCoeff(), 1e-12);
}

}  // namespace
}  // namespace divpot
