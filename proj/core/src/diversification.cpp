#include "divpot/diversification.hpp"

#include <cmath>

#include "divpot/errors.hpp"

namespace divpot {

WeightVector::WeightVector(std::vector<std::string> tickers, std::vector<double> weights)
    : tickers_(std::move(tickers)), weights_(std::move(weights)) {
  if (weights_.empty()) throw ValidationError("weight vector is empty");
  if (tickers_.size() != weights_.size()) throw ValidationError("weight vector: tickers and weights differ in length");
  double sum = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i])) {
      throw ValidationError("weight for " + tickers_[i] + " must be non-negative (long-only portfolio)");
    }
    sum += weights_[i];
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ValidationError("weights must sum to 1, got " + std::to_string(sum));
}

WeightVector equal_weights(std::vector<std::string> tickers) {
  if (tickers.empty()) throw ValidationError("equal weights need at least one ticker");
  const double w = 1.0 / static_cast<double>(tickers.size());
  std::vector<double> weights(tickers.size(), w);
  return WeightVector(std::move(tickers), std::move(weights));
}

double diversification_ratio(const WeightVector& w, const CovarianceMatrix& cov) {
  const auto n = static_cast<Eigen::Index>(w.size());
  if (cov.tickers != w.tickers() || cov.values.rows() != n || cov.values.cols() != n) {
    throw ValidationError("diversification ratio: weight tickers do not match the covariance matrix");
  }
  const Eigen::Map<const Eigen::VectorXd> weights(w.weights().data(), n);
  Eigen::VectorXd sigma(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double var = cov.values(i, i);
    if (!(var >= 0.0)) {
      throw ValidationError("diversification ratio: negative variance for " + cov.tickers[static_cast<std::size_t>(i)]);
    }
    sigma(i) = std::sqrt(var);
  }
  const double portfolio_variance = weights.dot(cov.values * weights);
  if (!(portfolio_variance > 0.0)) {
    throw DegeneratePortfolioError("diversification ratio: portfolio variance is not positive");
  }
  return weights.dot(sigma) / std::sqrt(portfolio_variance);
}

}  // namespace divpot
