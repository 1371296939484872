#include "divpot/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <unordered_map>

#include "divpot/csv.hpp"
#include "divpot/errors.hpp"

namespace divpot {

namespace {

constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();

void require_increasing(const std::vector<Date>& dates, const char* what) {
  for (std::size_t i = 1; i < dates.size(); ++i) {
    if (!(dates[i - 1] < dates[i])) {
      throw ValidationError(std::string(what) + ": dates must be strictly increasing (" + dates[i - 1].to_string() +
                            " then " + dates[i].to_string() + ")");
    }
  }
}

Date parse_date(const std::string& text, std::string_view source, std::size_t line) {
  auto d = Date::parse(text);
  if (!d) throw ParseError(std::string(source), line, "invalid date '" + text + "'");
  return *d;
}

/// Sub-panel over the date index range [first, last] with tickers complete on it.
StockPanel restrict_complete(const StockPanel& panel, std::size_t first, std::size_t last) {
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < panel.num_tickers(); ++j) {
    bool complete = true;
    for (std::size_t t = first; t <= last && complete; ++t) complete = panel.has_price(t, j);
    if (complete) keep.push_back(j);
  }
  if (keep.empty()) {
    throw EmptyUniverseError("no ticker has a price on every date from " + panel.dates()[first].to_string() + " to " +
                             panel.dates()[last].to_string());
  }
  const auto rows = static_cast<Eigen::Index>(last - first + 1);
  std::vector<Date> dates(panel.dates().begin() + static_cast<std::ptrdiff_t>(first),
                          panel.dates().begin() + static_cast<std::ptrdiff_t>(last + 1));
  std::vector<std::string> tickers;
  Eigen::MatrixXd close(rows, static_cast<Eigen::Index>(keep.size()));
  Eigen::MatrixXd dividend(rows, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const auto j = static_cast<Eigen::Index>(keep[k]);
    tickers.push_back(panel.tickers()[keep[k]]);
    close.col(static_cast<Eigen::Index>(k)) = panel.close().col(j).segment(static_cast<Eigen::Index>(first), rows);
    dividend.col(static_cast<Eigen::Index>(k)) =
        panel.dividend().col(j).segment(static_cast<Eigen::Index>(first), rows);
  }
  return StockPanel(std::move(dates), std::move(tickers), std::move(close), std::move(dividend));
}

}  // namespace

// ---------------------------------------------------------------------------
// StockPanel

StockPanel::StockPanel(std::vector<Date> dates, std::vector<std::string> tickers, Eigen::MatrixXd close,
                       Eigen::MatrixXd dividend)
    : dates_(std::move(dates)), tickers_(std::move(tickers)), close_(std::move(close)), dividend_(std::move(dividend)) {
  const auto rows = static_cast<Eigen::Index>(dates_.size());
  const auto cols = static_cast<Eigen::Index>(tickers_.size());
  if (close_.rows() != rows || close_.cols() != cols || dividend_.rows() != rows || dividend_.cols() != cols) {
    throw ValidationError("stock panel: price/dividend grids do not match dates x tickers");
  }
  require_increasing(dates_, "stock panel");
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index t = 0; t < rows; ++t) {
      const double p = close_(t, j);
      const double d = dividend_(t, j);
      const bool present = !std::isnan(p);
      if (present && !(p > 0.0 && std::isfinite(p))) {
        throw ValidationError("stock panel: close for " + tickers_[static_cast<std::size_t>(j)] + " on " +
                              dates_[static_cast<std::size_t>(t)].to_string() + " must be positive");
      }
      if (!(d >= 0.0) || !std::isfinite(d)) {
        throw ValidationError("stock panel: dividend for " + tickers_[static_cast<std::size_t>(j)] + " on " +
                              dates_[static_cast<std::size_t>(t)].to_string() + " must be non-negative");
      }
      if (d > 0.0 && !present) {
        throw ValidationError("stock panel: dividend for " + tickers_[static_cast<std::size_t>(j)] + " on " +
                              dates_[static_cast<std::size_t>(t)].to_string() + " has no close price");
      }
    }
  }
}

bool StockPanel::has_price(std::size_t date_index, std::size_t ticker_index) const {
  return !std::isnan(close_(static_cast<Eigen::Index>(date_index), static_cast<Eigen::Index>(ticker_index)));
}

std::size_t StockPanel::ticker_index(std::string_view ticker) const {
  auto it = std::find(tickers_.begin(), tickers_.end(), ticker);
  if (it == tickers_.end()) throw ValidationError("unknown ticker '" + std::string(ticker) + "'");
  return static_cast<std::size_t>(it - tickers_.begin());
}

bool operator==(const StockPanel& a, const StockPanel& b) {
  if (a.dates_ != b.dates_ || a.tickers_ != b.tickers_) return false;
  if (a.dividend_ != b.dividend_) return false;
  // NaN-aware comparison of the price grid.
  for (Eigen::Index j = 0; j < a.close_.cols(); ++j) {
    for (Eigen::Index t = 0; t < a.close_.rows(); ++t) {
      const double x = a.close_(t, j);
      const double y = b.close_(t, j);
      if (std::isnan(x) != std::isnan(y)) return false;
      if (!std::isnan(x) && x != y) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// ReturnPanel / IndexSeries

ReturnPanel::ReturnPanel(std::vector<Date> dates, std::vector<std::string> tickers, Eigen::MatrixXd returns)
    : dates_(std::move(dates)), tickers_(std::move(tickers)), returns_(std::move(returns)) {
  if (returns_.rows() != static_cast<Eigen::Index>(dates_.size()) ||
      returns_.cols() != static_cast<Eigen::Index>(tickers_.size())) {
    throw ValidationError("return panel: grid does not match dates x tickers");
  }
  require_increasing(dates_, "return panel");
  for (Eigen::Index j = 0; j < returns_.cols(); ++j) {
    for (Eigen::Index t = 0; t < returns_.rows(); ++t) {
      const double r = returns_(t, j);
      if (!std::isfinite(r) || r <= -1.0) {
        throw ValidationError("return panel: return for " + tickers_[static_cast<std::size_t>(j)] + " on " +
                              dates_[static_cast<std::size_t>(t)].to_string() + " must be finite and > -1");
      }
    }
  }
}

IndexSeries::IndexSeries(std::vector<Date> dates, std::vector<double> values)
    : dates_(std::move(dates)), values_(std::move(values)) {
  if (dates_.size() != values_.size()) throw ValidationError("index series: dates and values differ in length");
  require_increasing(dates_, "index series");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0) || !std::isfinite(values_[i])) {
      throw ValidationError("index series: value on " + dates_[i].to_string() + " must be positive");
    }
  }
}

double IndexSeries::value_at(Date date) const {
  auto it = std::lower_bound(dates_.begin(), dates_.end(), date);
  if (it == dates_.end() || *it != date) throw CoverageError("index has no value on " + date.to_string());
  return values_[static_cast<std::size_t>(it - dates_.begin())];
}

// ---------------------------------------------------------------------------
// Loading

StockPanel load_panel(std::istream& prices, std::istream* dividends, std::string_view prices_name,
                      std::string_view dividends_name) {
  const auto price_rows = csv::read_records(prices, prices_name, {"date", "ticker", "close"});

  std::vector<std::string> tickers;
  std::unordered_map<std::string, std::size_t> ticker_pos;
  std::map<Date, std::size_t> date_pos;
  struct Obs {
    Date date;
    std::size_t ticker;
    double value;
    std::size_t line;
  };
  std::vector<Obs> closes;
  closes.reserve(price_rows.size());

  for (const auto& rec : price_rows) {
    const Date d = parse_date(rec.fields[0], prices_name, rec.line);
    const std::string& ticker = rec.fields[1];
    if (ticker.empty()) throw ParseError(std::string(prices_name), rec.line, "empty ticker");
    const double close = csv::parse_number(rec.fields[2], prices_name, rec.line);
    if (!(close > 0.0)) {
      throw ValidationError(std::string(prices_name) + ":" + std::to_string(rec.line) + ": close for " + ticker +
                            " on " + d.to_string() + " must be positive");
    }
    auto [it, inserted] = ticker_pos.try_emplace(ticker, tickers.size());
    if (inserted) tickers.push_back(ticker);
    date_pos.emplace(d, 0);
    closes.push_back(Obs{d, it->second, close, rec.line});
  }

  std::vector<Date> dates;
  dates.reserve(date_pos.size());
  for (auto& [d, pos] : date_pos) {
    pos = dates.size();
    dates.push_back(d);
  }

  const auto rows = static_cast<Eigen::Index>(dates.size());
  const auto cols = static_cast<Eigen::Index>(tickers.size());
  Eigen::MatrixXd close = Eigen::MatrixXd::Constant(rows, cols, kAbsent);
  Eigen::MatrixXd dividend = Eigen::MatrixXd::Zero(rows, cols);

  for (const auto& o : closes) {
    const auto t = static_cast<Eigen::Index>(date_pos.at(o.date));
    const auto j = static_cast<Eigen::Index>(o.ticker);
    if (!std::isnan(close(t, j))) {
      throw ValidationError(std::string(prices_name) + ":" + std::to_string(o.line) + ": duplicate close for " +
                            tickers[o.ticker] + " on " + o.date.to_string());
    }
    close(t, j) = o.value;
  }

  if (dividends != nullptr) {
    const auto div_rows = csv::read_records(*dividends, dividends_name, {"date", "ticker", "amount"});
    for (const auto& rec : div_rows) {
      const Date d = parse_date(rec.fields[0], dividends_name, rec.line);
      const std::string& ticker = rec.fields[1];
      const double amount = csv::parse_number(rec.fields[2], dividends_name, rec.line);
      const std::string where = std::string(dividends_name) + ":" + std::to_string(rec.line) + ": ";
      if (amount < 0.0) {
        throw ValidationError(where + "dividend for " + ticker + " on " + d.to_string() + " must be non-negative");
      }
      auto tp = ticker_pos.find(ticker);
      auto dp = date_pos.find(d);
      if (tp == ticker_pos.end() || dp == date_pos.end() ||
          std::isnan(close(static_cast<Eigen::Index>(dp->second), static_cast<Eigen::Index>(tp->second)))) {
        throw ValidationError(where + "dividend for " + ticker + " on " + d.to_string() + " has no close price");
      }
      dividend(static_cast<Eigen::Index>(dp->second), static_cast<Eigen::Index>(tp->second)) += amount;
    }
  }

  return StockPanel(std::move(dates), std::move(tickers), std::move(close), std::move(dividend));
}

StockPanel load_panel_files(const std::string& prices_path, const std::string& dividends_path) {
  std::ifstream prices(prices_path);
  if (!prices) throw IoError("cannot open prices file '" + prices_path + "'");
  if (dividends_path.empty()) return load_panel(prices, nullptr, prices_path, "");
  std::ifstream dividends(dividends_path);
  if (!dividends) throw IoError("cannot open dividends file '" + dividends_path + "'");
  return load_panel(prices, &dividends, prices_path, dividends_path);
}

IndexSeries load_index(std::istream& in, std::string_view name) {
  const auto rows = csv::read_records(in, name, {"date", "value"});
  std::vector<std::pair<Date, double>> obs;
  obs.reserve(rows.size());
  for (const auto& rec : rows) {
    const Date d = parse_date(rec.fields[0], name, rec.line);
    const double v = csv::parse_number(rec.fields[1], name, rec.line);
    if (!(v > 0.0)) {
      throw ValidationError(std::string(name) + ":" + std::to_string(rec.line) + ": index value must be positive");
    }
    obs.emplace_back(d, v);
  }
  std::stable_sort(obs.begin(), obs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Date> dates;
  std::vector<double> values;
  for (const auto& [d, v] : obs) {
    if (!dates.empty() && dates.back() == d) {
      throw ValidationError(std::string(name) + ": duplicate index value on " + d.to_string());
    }
    dates.push_back(d);
    values.push_back(v);
  }
  return IndexSeries(std::move(dates), std::move(values));
}

IndexSeries load_index_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open index file '" + path + "'");
  return load_index(in, path);
}

// ---------------------------------------------------------------------------
// Total-return adjustment

DividendFactors dividend_factors(const StockPanel& panel, std::string_view ticker) {
  const auto j = static_cast<Eigen::Index>(panel.ticker_index(ticker));
  DividendFactors f;
  f.daily.resize(panel.num_dates(), 1.0);
  f.cumulative.resize(panel.num_dates(), 1.0);
  double running = 1.0;
  for (std::size_t t = 0; t < panel.num_dates(); ++t) {
    const double d = panel.dividend()(static_cast<Eigen::Index>(t), j);
    if (d > 0.0) {
      const double p = panel.close()(static_cast<Eigen::Index>(t), j);
      if (std::isnan(p)) {
        throw ValidationError("dividend for " + std::string(ticker) + " on " + panel.dates()[t].to_string() +
                              " has no close price");
      }
      f.daily[t] = 1.0 + d / p;
    }
    running *= f.daily[t];
    f.cumulative[t] = running;
  }
  return f;
}

std::vector<double> adjust_prices(const StockPanel& panel, std::string_view ticker) {
  const auto factors = dividend_factors(panel, ticker);
  const auto j = static_cast<Eigen::Index>(panel.ticker_index(ticker));
  std::vector<double> adjusted(panel.num_dates());
  for (std::size_t t = 0; t < adjusted.size(); ++t) {
    adjusted[t] = panel.close()(static_cast<Eigen::Index>(t), j) * factors.cumulative[t];
  }
  return adjusted;
}

ReturnPanel simple_returns(const StockPanel& panel) {
  if (panel.num_dates() < 2) {
    throw InsufficientDataError("simple returns need at least 2 dates, panel has " +
                                std::to_string(panel.num_dates()));
  }
  const auto rows = static_cast<Eigen::Index>(panel.num_dates() - 1);
  Eigen::MatrixXd returns(rows, static_cast<Eigen::Index>(panel.num_tickers()));
  for (std::size_t j = 0; j < panel.num_tickers(); ++j) {
    for (std::size_t t = 0; t < panel.num_dates(); ++t) {
      if (!panel.has_price(t, j)) {
        throw IncompleteDataError("incomplete data: " + panel.tickers()[j] + " has no price on " +
                                  panel.dates()[t].to_string());
      }
    }
    const auto adjusted = adjust_prices(panel, panel.tickers()[j]);
    for (Eigen::Index t = 0; t < rows; ++t) {
      const auto u = static_cast<std::size_t>(t);
      returns(t, static_cast<Eigen::Index>(j)) = (adjusted[u + 1] - adjusted[u]) / adjusted[u];
    }
  }
  std::vector<Date> dates(panel.dates().begin(), panel.dates().end() - 1);
  return ReturnPanel(std::move(dates), panel.tickers(), std::move(returns));
}

StockPanel complete_universe(const StockPanel& panel, Date start, Date end) {
  if (!(start < end)) throw ValidationError("complete universe: start must precede end");
  if (panel.num_dates() == 0 || start < panel.dates().front() || panel.dates().back() < end) {
    throw ValidationError("complete universe: [" + start.to_string() + ", " + end.to_string() +
                          "] is outside the panel's date range");
  }
  const auto& dates = panel.dates();
  const auto first = static_cast<std::size_t>(std::lower_bound(dates.begin(), dates.end(), start) - dates.begin());
  const auto past = static_cast<std::size_t>(std::upper_bound(dates.begin(), dates.end(), end) - dates.begin());
  if (past <= first) {
    throw EmptyUniverseError("complete universe: no trading dates in [" + start.to_string() + ", " +
                             end.to_string() + "]");
  }
  return restrict_complete(panel, first, past - 1);
}

StockPanel complete_universe(const StockPanel& panel) {
  if (panel.num_dates() == 0) throw EmptyUniverseError("complete universe: panel has no dates");
  return restrict_complete(panel, 0, panel.num_dates() - 1);
}

}  // namespace divpot
