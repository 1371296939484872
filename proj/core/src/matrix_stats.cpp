#include "divpot/matrix_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "divpot/errors.hpp"

namespace divpot {

namespace {

void require_shape(const ReturnWindow& window) {
  if (window.num_rows() < 2) {
    throw InsufficientDataError("window needs at least 2 rows, got " + std::to_string(window.num_rows()));
  }
  if (window.num_tickers() < 1) throw InsufficientDataError("window has no tickers");
}

/// Columns minus their means. A column with max == min is set to exact zeros
/// so that constant series contribute exactly nothing.
Eigen::MatrixXd centered(const ReturnWindow& window) {
  Eigen::MatrixXd x = window.returns;
  if (!x.allFinite()) throw IncompleteDataError("window contains non-finite returns");
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    auto col = x.col(j);
    if (col.maxCoeff() == col.minCoeff()) {
      col.setZero();
    } else {
      col.array() -= col.mean();
    }
  }
  return x;
}

}  // namespace

ReturnWindow make_window(const ReturnPanel& panel, std::size_t start, std::size_t length) {
  if (start > panel.num_rows() || length > panel.num_rows() - start) {
    throw InsufficientDataError("window [" + std::to_string(start) + ", " + std::to_string(start + length) +
                                ") exceeds the " + std::to_string(panel.num_rows()) + " available rows");
  }
  const std::span<const Date> all_dates(panel.dates());
  return ReturnWindow{all_dates.subspan(start, length), std::span<const std::string>(panel.tickers()),
                      panel.returns().block(static_cast<Eigen::Index>(start), 0, static_cast<Eigen::Index>(length),
                                            panel.returns().cols())};
}

ReturnWindow whole_panel(const ReturnPanel& panel) { return make_window(panel, 0, panel.num_rows()); }

CovarianceMatrix covariance_matrix(const ReturnWindow& window) {
  require_shape(window);
  const Eigen::MatrixXd x = centered(window);
  CovarianceMatrix cov;
  cov.tickers.assign(window.tickers.begin(), window.tickers.end());
  cov.values = (x.transpose() * x) / static_cast<double>(window.num_rows() - 1);
  // Symmetrise away any rounding asymmetry from the product kernel.
  cov.values = 0.5 * (cov.values + cov.values.transpose()).eval();
  return cov;
}

CorrelationMatrix correlation_matrix(const ReturnWindow& window) {
  const CovarianceMatrix cov = covariance_matrix(window);
  const Eigen::Index p = cov.values.rows();
  Eigen::VectorXd sd(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double var = cov.values(j, j);
    if (!(var > 0.0)) throw DegenerateColumnError(cov.tickers[static_cast<std::size_t>(j)]);
    sd(j) = std::sqrt(var);
  }
  CorrelationMatrix r;
  r.tickers = cov.tickers;
  r.values.resize(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    r.values(j, j) = 1.0;
    for (Eigen::Index k = j + 1; k < p; ++k) {
      const double c = std::clamp(cov.values(j, k) / (sd(j) * sd(k)), -1.0, 1.0);
      r.values(j, k) = c;
      r.values(k, j) = c;
    }
  }
  return r;
}

PartialCorrelationMatrix partial_correlations(const CorrelationMatrix& r) {
  const Eigen::Index p = r.values.rows();
  if (p == 0 || r.values.cols() != p || static_cast<std::size_t>(p) != r.tickers.size()) {
    throw ValidationError("partial correlations need a non-empty square matrix matching its tickers");
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(r.values);
  if (llt.info() != Eigen::Success) throw SingularMatrixError(0.0);
  const double rcond = llt.rcond();
  if (!(rcond >= kMinReciprocalCondition)) throw SingularMatrixError(rcond);

  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(p, p));
  PartialCorrelationMatrix q;
  q.tickers = r.tickers;
  q.values.resize(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    q.values(j, j) = 1.0;
    for (Eigen::Index k = j + 1; k < p; ++k) {
      const double a = 0.5 * (inv(j, k) + inv(k, j));
      const double v = -a / std::sqrt(inv(j, j) * inv(k, k));
      q.values(j, k) = v;
      q.values(k, j) = v;
    }
  }
  return q;
}

double kmo(const CorrelationMatrix& r) {
  const Eigen::Index p = r.values.rows();
  double r2 = 0.0;
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index k = 0; k < p; ++k) {
      if (j != k) r2 += r.values(j, k) * r.values(j, k);
    }
  }
  if (!(r2 > 0.0)) throw UndefinedStatisticError("KMO is undefined: all off-diagonal correlations are zero");

  const PartialCorrelationMatrix q = partial_correlations(r);
  double q2 = 0.0;
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index k = 0; k < p; ++k) {
      if (j != k) q2 += q.values(j, k) * q.values(j, k);
    }
  }
  return r2 / (r2 + q2);
}

}  // namespace divpot
