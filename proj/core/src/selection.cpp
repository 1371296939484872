#include "divpot/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "divpot/errors.hpp"

namespace divpot {

namespace {

constexpr double kLoadingTie = 1e-10;

}  // namespace

void SelectionCriteria::validate() const {
  if (!(stop_threshold > 0.0)) throw ValidationError("stop criteria must be positive");
  if (!(stop_threshold <= deletion_threshold)) {
    throw ValidationError("stop criteria (" + std::to_string(stop_threshold) +
                          ") must not exceed deletion criteria (" + std::to_string(deletion_threshold) +
                          "): stop <= deletion is required for the deletion loop to terminate");
  }
  if (min_retained < 2) throw ValidationError("min_retained must be at least 2");
}

std::vector<std::size_t> marked_for_deletion(const Spectrum& spectrum, double deletion_threshold) {
  std::vector<std::size_t> marked;
  const Eigen::Index n = spectrum.eigenvalues.size();
  for (Eigen::Index k = n - 1; k >= 0 && spectrum.eigenvalues(k) < deletion_threshold; --k) {
    const auto loadings = spectrum.eigenvectors.col(k).cwiseAbs();
    const double max_abs = loadings.maxCoeff();
    Eigen::Index pick = 0;
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      if (loadings(i) >= max_abs - kLoadingTie) {
        pick = i;
        break;
      }
    }
    const auto row = static_cast<std::size_t>(pick);
    if (std::find(marked.begin(), marked.end(), row) == marked.end()) marked.push_back(row);
  }
  return marked;
}

std::vector<std::string> marked_for_deletion(const Spectrum& spectrum, std::span<const std::string> tickers,
                                             double deletion_threshold) {
  if (tickers.size() != spectrum.size()) {
    throw ValidationError("marked_for_deletion: " + std::to_string(tickers.size()) + " tickers for a spectrum of size " +
                          std::to_string(spectrum.size()));
  }
  std::vector<std::string> out;
  for (std::size_t i : marked_for_deletion(spectrum, deletion_threshold)) out.push_back(tickers[i]);
  return out;
}

SelectionResult select_stocks(const CorrelationMatrix& r, const SelectionCriteria& criteria) {
  criteria.validate();
  const std::size_t p = r.size();
  if (p == 0 || r.values.rows() != static_cast<Eigen::Index>(p) || r.values.cols() != static_cast<Eigen::Index>(p)) {
    throw ValidationError("select_stocks needs a non-empty square correlation matrix matching its tickers");
  }

  std::vector<std::size_t> alive(p);
  std::iota(alive.begin(), alive.end(), std::size_t{0});
  SelectionResult result;

  for (;;) {
    const Spectrum spectrum = correlation_spectrum(restrict_to(r, alive));
    const double min_eigenvalue = spectrum.smallest();
    if (min_eigenvalue >= criteria.stop_threshold || alive.size() <= criteria.min_retained) {
      result.final_min_eigenvalue = min_eigenvalue;
      break;
    }
    std::vector<std::size_t> marked = marked_for_deletion(spectrum, criteria.deletion_threshold);
    if (marked.empty()) {
      result.final_min_eigenvalue = min_eigenvalue;
      break;
    }
    const std::size_t allowed = alive.size() - criteria.min_retained;
    if (marked.size() > allowed) marked.resize(allowed);

    std::vector<std::size_t> removed;
    removed.reserve(marked.size());
    for (std::size_t local : marked) removed.push_back(alive[local]);
    std::sort(removed.begin(), removed.end());

    std::vector<std::string> deleted;
    deleted.reserve(removed.size());
    for (std::size_t idx : removed) deleted.push_back(r.tickers[idx]);
    result.deleted_per_round.push_back(std::move(deleted));
    ++result.rounds;

    std::erase_if(alive, [&](std::size_t idx) { return std::binary_search(removed.begin(), removed.end(), idx); });
  }

  result.retained.reserve(alive.size());
  for (std::size_t idx : alive) result.retained.push_back(r.tickers[idx]);
  return result;
}

}  // namespace divpot
