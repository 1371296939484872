#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "divpot/date.hpp"

namespace divpot {

/// Aligned date x ticker grid of closing prices and cash dividends.
///
/// Absent prices are stored as quiet NaN. Instances are validated on
/// construction and immutable afterwards.
class StockPanel {
 public:
  /// Throws ValidationError if dates are not strictly increasing, a present
  /// close is not positive, a dividend is negative, or a nonzero dividend
  /// sits on a date without a price.
  StockPanel(std::vector<Date> dates, std::vector<std::string> tickers, Eigen::MatrixXd close,
             Eigen::MatrixXd dividend);

  const std::vector<Date>& dates() const { return dates_; }
  const std::vector<std::string>& tickers() const { return tickers_; }
  const Eigen::MatrixXd& close() const { return close_; }
  const Eigen::MatrixXd& dividend() const { return dividend_; }

  std::size_t num_dates() const { return dates_.size(); }
  std::size_t num_tickers() const { return tickers_.size(); }
  bool has_price(std::size_t date_index, std::size_t ticker_index) const;

  /// Column index of `ticker`; throws ValidationError when unknown.
  std::size_t ticker_index(std::string_view ticker) const;

  friend bool operator==(const StockPanel& a, const StockPanel& b);

 private:
  std::vector<Date> dates_;
  std::vector<std::string> tickers_;
  Eigen::MatrixXd close_;
  Eigen::MatrixXd dividend_;
};

/// Simple total returns. Row t is dated at the first of the two prices it
/// spans.
class ReturnPanel {
 public:
  /// Throws ValidationError on shape mismatch, unordered dates or a
  /// non-finite return / return <= -1.
  ReturnPanel(std::vector<Date> dates, std::vector<std::string> tickers, Eigen::MatrixXd returns);

  const std::vector<Date>& dates() const { return dates_; }
  const std::vector<std::string>& tickers() const { return tickers_; }
  const Eigen::MatrixXd& returns() const { return returns_; }
  std::size_t num_rows() const { return dates_.size(); }
  std::size_t num_tickers() const { return tickers_.size(); }

 private:
  std::vector<Date> dates_;
  std::vector<std::string> tickers_;
  Eigen::MatrixXd returns_;
};

/// Level series for a market index.
class IndexSeries {
 public:
  IndexSeries(std::vector<Date> dates, std::vector<double> values);

  const std::vector<Date>& dates() const { return dates_; }
  const std::vector<double>& values() const { return values_; }

  /// Throws CoverageError when `date` has no value.
  double value_at(Date date) const;

 private:
  std::vector<Date> dates_;
  std::vector<double> values_;
};

struct DividendFactors {
  std::vector<double> daily;
  std::vector<double> cumulative;
};

/// Reads `date,ticker,close` prices and `date,ticker,amount` dividends.
/// `dividends` may be null for a dividend-free panel.
StockPanel load_panel(std::istream& prices, std::istream* dividends,
                      std::string_view prices_name = "prices", std::string_view dividends_name = "dividends");
StockPanel load_panel_files(const std::string& prices_path, const std::string& dividends_path);

/// Reads a `date,value` index file.
IndexSeries load_index(std::istream& in, std::string_view name = "index");
IndexSeries load_index_file(const std::string& path);

/// Daily factor is 1 + D(t)/P(t) on dividend dates, 1 otherwise; cumulative
/// is the running product up to and including t.
DividendFactors dividend_factors(const StockPanel& panel, std::string_view ticker);

/// P(t) times the cumulative dividend factor. Absent prices stay NaN.
std::vector<double> adjust_prices(const StockPanel& panel, std::string_view ticker);

/// R(t) = (PNEW(t+1) - PNEW(t)) / PNEW(t) for every ticker. Requires a
/// complete panel; throws IncompleteDataError naming the first gap.
ReturnPanel simple_returns(const StockPanel& panel);

/// Sub-panel over [start, end] keeping only tickers priced on every date.
StockPanel complete_universe(const StockPanel& panel, Date start, Date end);

/// complete_universe over the panel's whole date span.
StockPanel complete_universe(const StockPanel& panel);

}  // namespace divpot
