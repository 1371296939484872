#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "divpot/date.hpp"
#include "divpot/market_data.hpp"

namespace divpot::synth {

/// Derives the seed of an independent stream from (seed, purpose, index)
/// with SplitMix64 finalisation.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index);

enum class Purpose : std::uint64_t { factor = 1, idiosyncratic = 2 };

/// Standard normal draws from a std::mt19937_64 stream via the Box-Muller
/// pair transform. Uniforms are (k + 0.5) / 2^53 with k the top 53 bits.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
  double next();

 private:
  double uniform();

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Regime active from `start_day` (a return-row index) until the next one.
struct Regime {
  std::size_t start_day = 0;
  double beta = 0.0;
  double idio_vol = 1.0;
};

/// One-factor return model r_it = scale * (beta f_t + idio_vol e_it), with
/// unit-variance factor f and idiosyncratic e. Population pairwise
/// correlation inside a regime is beta^2 / (beta^2 + idio_vol^2).
struct FactorSpec {
  std::size_t n_stocks = 0;
  std::size_t horizon = 0;
  std::vector<Regime> regimes;
  std::uint64_t seed = 0;
  double scale = 1.0;
  Date start_date = Date::from_ymd(2000, 1, 3);

  void validate() const;
  static FactorSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Ticker name used for stock i: S0001, S0002, ...
std::string ticker_name(std::size_t i);

/// `horizon` business days starting at `start` (rolled forward off weekends).
std::vector<Date> business_days(Date start, std::size_t count);

ReturnPanel factor_model_returns(const FactorSpec& spec);

/// r_it = vol (sqrt(rho) f_t + sqrt(1 - rho) e_it).
ReturnPanel equicorrelated_returns(std::size_t n, std::size_t horizon, double rho, double vol, std::uint64_t seed);

/// Prices compounded from `initial`; one more date than `returns` has rows,
/// no dividends. Feeding the result to simple_returns recovers the returns
/// up to rounding.
StockPanel prices_from_returns(const ReturnPanel& returns, double initial = 100.0);

}  // namespace divpot::synth
