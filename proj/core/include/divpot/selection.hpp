#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "divpot/matrix_stats.hpp"
#include "divpot/pca.hpp"

namespace divpot {

/// Eigenvalue thresholds for the PCA deletion loop.
struct SelectionCriteria {
  double deletion_threshold = 0.7;
  double stop_threshold = 0.5;
  std::size_t min_retained = 2;

  /// Throws ValidationError unless 0 < stop <= deletion and min_retained >= 2.
  void validate() const;
};

struct SelectionResult {
  std::vector<std::string> retained;
  std::vector<std::vector<std::string>> deleted_per_round;
  std::size_t rounds = 0;
  double final_min_eigenvalue = 0.0;
};

/// Row indices marked by the components whose eigenvalue is strictly below
/// `deletion_threshold`, visited from the smallest eigenvalue upwards. Each
/// component marks the row with the largest |loading|; on a tie (within
/// 1e-10) the highest row is marked so that the lowest one survives.
/// Duplicates are dropped, first occurrence wins.
std::vector<std::size_t> marked_for_deletion(const Spectrum& spectrum, double deletion_threshold);

std::vector<std::string> marked_for_deletion(const Spectrum& spectrum, std::span<const std::string> tickers,
                                             double deletion_threshold);

/// Repeated PCA on the surviving stocks, deleting the marked set each round
/// until the smallest eigenvalue reaches the stop threshold. A round that
/// would go below `min_retained` deletes only as many stocks (in marking
/// order) as the floor allows and ends the loop.
SelectionResult select_stocks(const CorrelationMatrix& r, const SelectionCriteria& criteria = {});

}  // namespace divpot
