#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "divpot/date.hpp"
#include "divpot/market_data.hpp"
#include "divpot/matrix_stats.hpp"
#include "divpot/selection.hpp"

namespace divpot {

struct WindowConfig {
  std::size_t length = 504;  ///< return rows per window
  std::size_t step = 5;      ///< rows between window starts
  SelectionCriteria criteria;

  void validate() const;
};

/// Half-open row range [start, end).
struct WindowRange {
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const WindowRange&, const WindowRange&) = default;
};

/// floor((rows - length) / step) + 1 windows starting at multiples of step.
std::vector<WindowRange> window_schedule(std::size_t rows, const WindowConfig& cfg);

enum class Measure : unsigned { kmo = 1u, pc1 = 2u, select = 4u, dr = 8u };

class MeasureSet {
 public:
  constexpr MeasureSet() = default;
  static constexpr MeasureSet all() { return MeasureSet{15u}; }
  static constexpr MeasureSet none() { return MeasureSet{0u}; }

  constexpr MeasureSet& add(Measure m) {
    bits_ |= static_cast<unsigned>(m);
    return *this;
  }
  constexpr bool contains(Measure m) const { return (bits_ & static_cast<unsigned>(m)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }

  /// Accepts kmo, pc1, select, dr.
  static Measure parse(const std::string& name);

 private:
  explicit constexpr MeasureSet(unsigned bits) : bits_(bits) {}
  unsigned bits_ = 15u;
};

struct FieldError {
  std::string field;
  std::string message;

  friend bool operator==(const FieldError&, const FieldError&) = default;
};

/// One window's measures, attached to the window's last date. A field that
/// was not requested or failed is empty; failures are listed in `errors`.
struct MetricsRow {
  Date window_end;
  std::optional<double> kmo;
  std::optional<double> pc1_pct;
  std::optional<std::size_t> n_selected;
  std::optional<double> dr;
  std::optional<double> index_return;
  std::vector<FieldError> errors;

  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

struct MetricsSeries {
  std::vector<MetricsRow> rows;

  friend bool operator==(const MetricsSeries&, const MetricsSeries&) = default;
};

struct RunOptions {
  MeasureSet measures = MeasureSet::all();
  unsigned threads = 1;
};

/// (V_end - V_start) / V_start between the first and last window dates.
double index_window_return(const IndexSeries& index, std::span<const Date> window_dates);

/// Correlation and covariance are formed once; each requested measure is
/// computed independently so one failure does not blank the others.
/// Throws IncompleteDataError for a window containing non-finite returns.
MetricsRow run_window(const ReturnWindow& window, const WindowConfig& cfg, const IndexSeries* index = nullptr,
                      MeasureSet measures = MeasureSet::all());

/// Every scheduled window of `returns`, merged in schedule order regardless
/// of `options.threads`. A window-level failure yields a row with all fields
/// empty and a "window" error.
MetricsSeries run_series(const ReturnPanel& returns, const WindowConfig& cfg, const IndexSeries* index = nullptr,
                         const RunOptions& options = {});

/// simple_returns(panel) followed by the ReturnPanel overload.
MetricsSeries run_series(const StockPanel& panel, const WindowConfig& cfg, const IndexSeries* index = nullptr,
                         const RunOptions& options = {});

/// Header `window_end,kmo,pc1_pct,n_selected,dr,index_return`.
void write_metrics_csv(std::ostream& out, const MetricsSeries& series);

/// Header `window_end,field,error`, one line per failed field.
void write_diagnostics_csv(std::ostream& out, const MetricsSeries& series);

}  // namespace divpot
