#pragma once

#include <string>
#include <vector>

#include "divpot/matrix_stats.hpp"

namespace divpot {

/// Long-only portfolio weights summing to one.
class WeightVector {
 public:
  /// Throws ValidationError for a size mismatch, an empty list, a negative
  /// weight or a sum that is not 1 within 1e-12.
  WeightVector(std::vector<std::string> tickers, std::vector<double> weights);

  const std::vector<std::string>& tickers() const { return tickers_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return weights_.size(); }

 private:
  std::vector<std::string> tickers_;
  std::vector<double> weights_;
};

/// 1/n on every ticker.
WeightVector equal_weights(std::vector<std::string> tickers);

/// Weighted average volatility over portfolio volatility, w'sigma / sqrt(w'Sw),
/// with sigma taken from the diagonal of `cov`.
double diversification_ratio(const WeightVector& w, const CovarianceMatrix& cov);

}  // namespace divpot
