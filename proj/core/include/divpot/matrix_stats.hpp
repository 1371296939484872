#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "divpot/date.hpp"
#include "divpot/market_data.hpp"

namespace divpot {

/// Ticker-labelled square matrix. The tag keeps correlation, covariance and
/// partial-correlation matrices from being mixed up.
template <class Tag>
struct LabeledMatrix {
  std::vector<std::string> tickers;
  Eigen::MatrixXd values;

  std::size_t size() const { return tickers.size(); }
};

using CorrelationMatrix = LabeledMatrix<struct CorrelationTag>;
using CovarianceMatrix = LabeledMatrix<struct CovarianceTag>;
using PartialCorrelationMatrix = LabeledMatrix<struct PartialCorrelationTag>;

/// Keeps rows/columns `keep` (in the given order).
template <class Tag>
LabeledMatrix<Tag> restrict_to(const LabeledMatrix<Tag>& m, std::span<const std::size_t> keep) {
  LabeledMatrix<Tag> out;
  out.tickers.reserve(keep.size());
  out.values.resize(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.tickers.push_back(m.tickers[keep[i]]);
    for (std::size_t j = 0; j < keep.size(); ++j) {
      out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          m.values(static_cast<Eigen::Index>(keep[i]), static_cast<Eigen::Index>(keep[j]));
    }
  }
  return out;
}

/// Read-only row slice of a ReturnPanel.
struct ReturnWindow {
  std::span<const Date> dates;
  std::span<const std::string> tickers;
  Eigen::Block<const Eigen::MatrixXd> returns;

  std::size_t num_rows() const { return dates.size(); }
  std::size_t num_tickers() const { return tickers.size(); }
};

/// Rows [start, start + length). Throws InsufficientDataError when out of range.
ReturnWindow make_window(const ReturnPanel& panel, std::size_t start, std::size_t length);
ReturnWindow whole_panel(const ReturnPanel& panel);

/// Below this reciprocal condition estimate a correlation matrix is treated
/// as singular.
inline constexpr double kMinReciprocalCondition = 1e-12;

/// Sample covariance, divisor n - 1. Constant columns give exact zeros.
CovarianceMatrix covariance_matrix(const ReturnWindow& window);

/// Pearson correlation with exact unit diagonal. Throws
/// DegenerateColumnError for a zero-variance column.
CorrelationMatrix correlation_matrix(const ReturnWindow& window);

/// Anti-image partial correlations q_jk = -a_jk / sqrt(a_jj a_kk), A = R^-1,
/// unit diagonal. Throws SingularMatrixError when R is not safely invertible.
PartialCorrelationMatrix partial_correlations(const CorrelationMatrix& r);

/// Kaiser-Meyer-Olkin sampling adequacy over the off-diagonal entries.
/// Throws UndefinedStatisticError when every off-diagonal correlation is 0.
double kmo(const CorrelationMatrix& r);

}  // namespace divpot
