#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

#include "lrrfuse/patching.hpp"

namespace lrrfuse {

/// Gradient magnitude accumulated per unsigned orientation bin. Bin j covers
/// [j * 180 / L, (j + 1) * 180 / L) degrees.
struct OrientationHistogram {
  std::vector<double> bins;

  std::size_t size() const { return bins.size(); }
  double total() const;
};

/// 0 means "no dominant orientation"; 1..L name the dominant bin.
struct PatchClassLabel {
  std::size_t value = 0;
  friend auto operator<=>(const PatchClassLabel&, const PatchClassLabel&) = default;
};

/// One cell covering the whole n x n patch, hard binning, no block
/// normalization. Gradients are [-1, 0, 1] central differences with
/// replicated borders; orientation is folded into [0, 180). Angles within
/// 1e-9 degrees of a bin edge are binned as if exactly on the edge.
OrientationHistogram orientation_histogram(std::span<const double> patch, std::size_t window,
                                           std::size_t bins);

/// Dominance rule: class 0 when the histogram is empty or max/sum < threshold,
/// otherwise the 1-based index of the largest bin (lowest index on ties).
PatchClassLabel classify_patch(const OrientationHistogram& histogram, double threshold);

/// Label of every column of `patches`.
std::vector<PatchClassLabel> classify_columns(const PatchMatrix& patches, std::size_t bins,
                                              double threshold);

/// L + 1 disjoint column-index sets; set j holds the columns labelled j.
std::vector<std::vector<std::size_t>> partition_patches(const PatchMatrix& patches,
                                                        std::size_t bins, double threshold);

}  // namespace lrrfuse
