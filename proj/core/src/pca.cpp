#include "divpot/pca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "divpot/errors.hpp"

namespace divpot {

namespace {

double off_diagonal_norm(const Eigen::MatrixXd& a) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) sum += a(i, j) * a(i, j);
  }
  return std::sqrt(2.0 * sum);
}

/// One Jacobi rotation annihilating a(p, q); accumulates into v.
void rotate(Eigen::MatrixXd& a, Eigen::MatrixXd& v, Eigen::Index p, Eigen::Index q) {
  const double apq = a(p, q);
  const double app = a(p, p);
  const double aqq = a(q, q);
  const double theta = (aqq - app) / (2.0 * apq);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    if (theta < 0.0) t = -t;
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const double apk = a(p, k);
    const double aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  a(p, p) = app - t * apq;
  a(q, q) = aqq + t * apq;
  a(p, q) = 0.0;
  a(q, p) = 0.0;

  for (Eigen::Index k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

/// Largest-magnitude component positive; near-ties resolve to the lowest row.
void fix_sign(Eigen::Ref<Eigen::VectorXd> column) {
  const double max_abs = column.cwiseAbs().maxCoeff();
  if (max_abs == 0.0) return;
  const double tie = 1e-12 * max_abs;
  for (Eigen::Index i = 0; i < column.size(); ++i) {
    if (std::abs(column(i)) >= max_abs - tie) {
      if (column(i) < 0.0) column = -column;
      return;
    }
  }
}

}  // namespace

Spectrum eigendecompose(const Eigen::MatrixXd& m, const JacobiOptions& options) {
  const Eigen::Index n = m.rows();
  if (n == 0 || m.cols() != n) {
    throw ValidationError("eigendecompose needs a non-empty square matrix, got " + std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()));
  }
  if (!m.allFinite()) throw ValidationError("eigendecompose: matrix has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      if (std::abs(m(i, j) - m(j, i)) > options.symmetry_tolerance * scale) {
        throw ValidationError("eigendecompose: matrix is not symmetric at (" + std::to_string(i) + ", " +
                              std::to_string(j) + ")");
      }
    }
  }

  Eigen::MatrixXd a = 0.5 * (m + m.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double target = std::numeric_limits<double>::epsilon() * a.norm();

  bool converged = n == 1 || off_diagonal_norm(a) <= target;
  int sweep = 0;
  while (!converged) {
    if (sweep == options.max_sweeps) throw ConvergenceError("Jacobi eigendecomposition did not converge", sweep);
    ++sweep;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Negligible against both diagonal entries: drop it instead of rotating.
        const double g = 100.0 * std::abs(apq);
        if (sweep > 4 && std::abs(a(p, p)) + g == std::abs(a(p, p)) && std::abs(a(q, q)) + g == std::abs(a(q, q))) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        rotate(a, v, p, q);
      }
    }
    converged = off_diagonal_norm(a) <= target;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return a(x, x) > a(y, y); });

  Spectrum s;
  s.eigenvalues.resize(n);
  s.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    s.eigenvalues(k) = a(src, src);
    s.eigenvectors.col(k) = v.col(src);
    fix_sign(s.eigenvectors.col(k));
  }
  return s;
}

Spectrum correlation_spectrum(const CorrelationMatrix& r, const JacobiOptions& options) {
  Spectrum s = eigendecompose(r.values, options);
  for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k) {
    double& lambda = s.eigenvalues(k);
    if (lambda < 0.0) {
      if (lambda < -kNegativeEigenvalueTolerance) {
        throw NumericError("correlation matrix has a negative eigenvalue " + std::to_string(lambda));
      }
      lambda = 0.0;
    }
  }
  return s;
}

double pc1_variance_explained(const Spectrum& spectrum, std::size_t p) {
  if (p == 0) throw ValidationError("PC1 variance explained needs at least one variable");
  if (spectrum.size() == 0) throw ValidationError("PC1 variance explained needs a non-empty spectrum");
  return 100.0 * spectrum.largest() / static_cast<double>(p);
}

}  // namespace divpot
