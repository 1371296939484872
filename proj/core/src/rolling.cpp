#include "divpot/rolling.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "divpot/csv.hpp"
#include "divpot/diversification.hpp"
#include "divpot/errors.hpp"
#include "divpot/pca.hpp"

namespace divpot {

namespace {

template <class F>
void record(std::vector<FieldError>& errors, const char* field, F&& compute) {
  try {
    compute();
  } catch (const Error& e) {
    errors.push_back(FieldError{field, e.what()});
  }
}

std::string optional_number(const std::optional<double>& v) { return v ? csv::format_number(*v) : std::string{}; }

}  // namespace

void WindowConfig::validate() const {
  if (length < 2) throw ValidationError("window length must be at least 2, got " + std::to_string(length));
  if (step < 1) throw ValidationError("window step must be at least 1");
  criteria.validate();
}

std::vector<WindowRange> window_schedule(std::size_t rows, const WindowConfig& cfg) {
  cfg.validate();
  if (rows < cfg.length) {
    throw InsufficientDataError("insufficient data: " + std::to_string(rows) + " return rows for a window of " +
                                std::to_string(cfg.length));
  }
  const std::size_t count = (rows - cfg.length) / cfg.step + 1;
  std::vector<WindowRange> windows;
  windows.reserve(count);
  for (std::size_t k = 0; k < count; ++k) windows.push_back({k * cfg.step, k * cfg.step + cfg.length});
  return windows;
}

Measure MeasureSet::parse(const std::string& name) {
  if (name == "kmo") return Measure::kmo;
  if (name == "pc1") return Measure::pc1;
  if (name == "select") return Measure::select;
  if (name == "dr") return Measure::dr;
  throw ValidationError("unknown measure '" + name + "' (expected kmo, pc1, select or dr)");
}

double index_window_return(const IndexSeries& index, std::span<const Date> window_dates) {
  if (window_dates.empty()) throw ValidationError("index window return needs a non-empty window");
  const double start = index.value_at(window_dates.front());
  const double end = index.value_at(window_dates.back());
  return (end - start) / start;
}

MetricsRow run_window(const ReturnWindow& window, const WindowConfig& cfg, const IndexSeries* index,
                      MeasureSet measures) {
  if (window.num_rows() < 2) {
    throw InsufficientDataError("window needs at least 2 rows, got " + std::to_string(window.num_rows()));
  }
  if (!window.returns.allFinite()) {
    throw IncompleteDataError("window ending " + window.dates.back().to_string() + " has non-finite returns");
  }

  MetricsRow row;
  row.window_end = window.dates.back();

  const bool want_kmo = measures.contains(Measure::kmo);
  const bool want_pc1 = measures.contains(Measure::pc1);
  const bool want_select = measures.contains(Measure::select);

  if (want_kmo || want_pc1 || want_select) {
    std::optional<CorrelationMatrix> corr;
    try {
      corr = correlation_matrix(window);
    } catch (const Error& e) {
      if (want_kmo) row.errors.push_back({"kmo", e.what()});
      if (want_pc1) row.errors.push_back({"pc1_pct", e.what()});
      if (want_select) row.errors.push_back({"n_selected", e.what()});
    }
    if (corr) {
      if (want_kmo) record(row.errors, "kmo", [&] { row.kmo = kmo(*corr); });
      if (want_pc1) {
        record(row.errors, "pc1_pct",
               [&] { row.pc1_pct = pc1_variance_explained(correlation_spectrum(*corr), corr->size()); });
      }
      if (want_select) {
        record(row.errors, "n_selected", [&] { row.n_selected = select_stocks(*corr, cfg.criteria).retained.size(); });
      }
    }
  }

  if (measures.contains(Measure::dr)) {
    record(row.errors, "dr", [&] {
      const CovarianceMatrix cov = covariance_matrix(window);
      row.dr = diversification_ratio(equal_weights(cov.tickers), cov);
    });
  }

  if (index != nullptr) {
    record(row.errors, "index_return", [&] { row.index_return = index_window_return(*index, window.dates); });
  }
  return row;
}

MetricsSeries run_series(const ReturnPanel& returns, const WindowConfig& cfg, const IndexSeries* index,
                         const RunOptions& options) {
  const auto schedule = window_schedule(returns.num_rows(), cfg);
  MetricsSeries series;
  series.rows.resize(schedule.size());

  auto evaluate = [&](std::size_t k) {
    const WindowRange& w = schedule[k];
    try {
      series.rows[k] = run_window(make_window(returns, w.start, w.end - w.start), cfg, index, options.measures);
    } catch (const Error& e) {
      MetricsRow failed;
      failed.window_end = returns.dates()[w.end - 1];
      failed.errors.push_back({"window", e.what()});
      series.rows[k] = std::move(failed);
    }
  };

  const std::size_t workers = std::min<std::size_t>(std::max(1u, options.threads), schedule.size());
  if (workers <= 1) {
    for (std::size_t k = 0; k < schedule.size(); ++k) evaluate(k);
    return series;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) {
      pool.emplace_back([&] {
        try {
          for (std::size_t k = next++; k < schedule.size(); k = next++) evaluate(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = schedule.size();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return series;
}

MetricsSeries run_series(const StockPanel& panel, const WindowConfig& cfg, const IndexSeries* index,
                         const RunOptions& options) {
  cfg.validate();
  return run_series(simple_returns(panel), cfg, index, options);
}

void write_metrics_csv(std::ostream& out, const MetricsSeries& series) {
  out << "window_end,kmo,pc1_pct,n_selected,dr,index_return\n";
  for (const auto& row : series.rows) {
    out << row.window_end.to_string() << ',' << optional_number(row.kmo) << ',' << optional_number(row.pc1_pct)
        << ',' << (row.n_selected ? std::to_string(*row.n_selected) : std::string{}) << ','
        << optional_number(row.dr) << ',' << optional_number(row.index_return) << '\n';
  }
}

void write_diagnostics_csv(std::ostream& out, const MetricsSeries& series) {
  out << "window_end,field,error\n";
  for (const auto& row : series.rows) {
    for (const auto& e : row.errors) {
      out << row.window_end.to_string() << ',' << csv::escape(e.field) << ',' << csv::escape(e.message) << '\n';
    }
  }
}

}  // namespace divpot
