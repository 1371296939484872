#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "divpot/matrix_stats.hpp"

namespace divpot {

/// Eigenvalues in descending order; column k of `eigenvectors` pairs with
/// eigenvalue k.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
  double largest() const { return eigenvalues(0); }
  double smallest() const { return eigenvalues(eigenvalues.size() - 1); }
};

struct JacobiOptions {
  int max_sweeps = 100;
  /// Allowed |m_ij - m_ji|, relative to max(1, max |m_ij|).
  double symmetry_tolerance = 1e-10;
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Each eigenvector is signed so that its largest-magnitude component is
/// positive; near-ties (within 1e-12 of the maximum) go to the lowest row.
/// Equal eigenvalues keep the order of their diagonal positions. Throws
/// ValidationError for a non-square or asymmetric input and
/// ConvergenceError when the sweep budget runs out.
Spectrum eigendecompose(const Eigen::MatrixXd& m, const JacobiOptions& options = {});

/// Eigenvalues above this negative bound are clamped to 0 for a correlation
/// matrix; anything below is a NumericError.
inline constexpr double kNegativeEigenvalueTolerance = 1e-10;

/// eigendecompose plus the PSD clamp above.
Spectrum correlation_spectrum(const CorrelationMatrix& r, const JacobiOptions& options = {});

/// 100 * largest eigenvalue / p. Throws ValidationError for p == 0 or an
/// empty spectrum.
double pc1_variance_explained(const Spectrum& spectrum, std::size_t p);

}  // namespace divpot
