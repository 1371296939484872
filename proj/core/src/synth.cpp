#include "divpot/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "divpot/errors.hpp"

namespace divpot::synth {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

const Regime& regime_at(const std::vector<Regime>& regimes, std::size_t day) {
  std::size_t k = 0;
  while (k + 1 < regimes.size() && regimes[k + 1].start_day <= day) ++k;
  return regimes[k];
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(seed) ^ purpose) ^ index);
}

double NormalStream::uniform() {
  // Top 53 bits, offset by half a step so the result lies strictly in (0, 1).
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

void FactorSpec::validate() const {
  if (n_stocks < 2) throw ValidationError("factor spec: n_stocks must be at least 2");
  if (horizon < 2) throw ValidationError("factor spec: horizon must be at least 2");
  if (regimes.empty()) throw ValidationError("factor spec: at least one regime is required");
  if (regimes.front().start_day != 0) throw ValidationError("factor spec: the first regime must start on day 0");
  for (std::size_t k = 0; k < regimes.size(); ++k) {
    const Regime& r = regimes[k];
    if (k > 0 && !(regimes[k - 1].start_day < r.start_day)) {
      throw ValidationError("factor spec: regime start days must be strictly increasing");
    }
    if (r.start_day >= horizon) throw ValidationError("factor spec: regime starts beyond the horizon");
    if (!(r.beta >= 0.0 && r.beta < 1.0)) throw ValidationError("factor spec: beta must lie in [0, 1)");
    if (!(r.idio_vol > 0.0) || !std::isfinite(r.idio_vol)) {
      throw ValidationError("factor spec: idiosyncratic volatility must be positive");
    }
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ValidationError("factor spec: scale must be positive");
}

FactorSpec FactorSpec::from_json(const nlohmann::json& j) {
  FactorSpec spec;
  try {
    spec.n_stocks = j.at("n_stocks").get<std::size_t>();
    spec.horizon = j.at("horizon").get<std::size_t>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.scale = j.value("scale", 1.0);
    if (j.contains("start_date")) {
      const auto text = j.at("start_date").get<std::string>();
      auto d = Date::parse(text);
      if (!d) throw ValidationError("factor spec: invalid start_date '" + text + "'");
      spec.start_date = *d;
    }
    for (const auto& r : j.at("regimes")) {
      spec.regimes.push_back(
          Regime{r.at("start_day").get<std::size_t>(), r.at("beta").get<double>(), r.at("idio_vol").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("factor spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

nlohmann::json FactorSpec::to_json() const {
  nlohmann::json regimes_json = nlohmann::json::array();
  for (const auto& r : regimes) {
    regimes_json.push_back({{"start_day", r.start_day}, {"beta", r.beta}, {"idio_vol", r.idio_vol}});
  }
  return {{"n_stocks", n_stocks}, {"horizon", horizon},     {"seed", seed},
          {"scale", scale},       {"start_date", start_date.to_string()}, {"regimes", regimes_json}};
}

std::string ticker_name(std::size_t i) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "S%04zu", i + 1);
  return buf;
}

std::vector<Date> business_days(Date start, std::size_t count) {
  std::vector<Date> dates;
  dates.reserve(count);
  const auto wd = std::chrono::weekday{start.days()};
  Date d = (wd == std::chrono::Saturday || wd == std::chrono::Sunday) ? start.next_business_day() : start;
  for (std::size_t i = 0; i < count; ++i) {
    dates.push_back(d);
    d = d.next_business_day();
  }
  return dates;
}

ReturnPanel factor_model_returns(const FactorSpec& spec) {
  spec.validate();
  const auto rows = static_cast<Eigen::Index>(spec.horizon);
  const auto cols = static_cast<Eigen::Index>(spec.n_stocks);

  Eigen::VectorXd factor(rows);
  NormalStream factor_stream(stream_seed(spec.seed, static_cast<std::uint64_t>(Purpose::factor), 0));
  for (Eigen::Index t = 0; t < rows; ++t) factor(t) = factor_stream.next();

  Eigen::MatrixXd returns(rows, cols);
  std::vector<std::string> tickers;
  tickers.reserve(spec.n_stocks);
  for (Eigen::Index i = 0; i < cols; ++i) {
    tickers.push_back(ticker_name(static_cast<std::size_t>(i)));
    NormalStream idio(stream_seed(spec.seed, static_cast<std::uint64_t>(Purpose::idiosyncratic),
                                  static_cast<std::uint64_t>(i)));
    for (Eigen::Index t = 0; t < rows; ++t) {
      const Regime& r = regime_at(spec.regimes, static_cast<std::size_t>(t));
      returns(t, i) = spec.scale * (r.beta * factor(t) + r.idio_vol * idio.next());
    }
  }
  return ReturnPanel(business_days(spec.start_date, spec.horizon), std::move(tickers), std::move(returns));
}

ReturnPanel equicorrelated_returns(std::size_t n, std::size_t horizon, double rho, double vol, std::uint64_t seed) {
  if (n < 2) throw ValidationError("equicorrelated returns need n >= 2");
  if (horizon < 2) throw ValidationError("equicorrelated returns need T >= 2");
  if (!(rho >= 0.0 && rho < 1.0)) throw ValidationError("equicorrelated returns need rho in [0, 1)");
  if (!(vol > 0.0) || !std::isfinite(vol)) throw ValidationError("equicorrelated returns need vol > 0");
  FactorSpec spec;
  spec.n_stocks = n;
  spec.horizon = horizon;
  spec.seed = seed;
  spec.scale = vol;
  spec.regimes = {Regime{0, std::sqrt(rho), std::sqrt(1.0 - rho)}};
  return factor_model_returns(spec);
}

StockPanel prices_from_returns(const ReturnPanel& returns, double initial) {
  if (!(initial > 0.0)) throw ValidationError("initial price must be positive");
  const auto rows = static_cast<Eigen::Index>(returns.num_rows());
  const auto cols = static_cast<Eigen::Index>(returns.num_tickers());
  if (rows == 0) throw ValidationError("prices_from_returns needs at least one return row");
  Eigen::MatrixXd close(rows + 1, cols);
  close.row(0).setConstant(initial);
  for (Eigen::Index t = 0; t < rows; ++t) {
    close.row(t + 1) = close.row(t).array() * (1.0 + returns.returns().row(t).array());
  }
  std::vector<Date> dates = returns.dates();
  dates.push_back(dates.back().next_business_day());
  return StockPanel(std::move(dates), returns.tickers(), std::move(close), Eigen::MatrixXd::Zero(rows + 1, cols));
}

}  // namespace divpot::synth
