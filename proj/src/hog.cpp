#include "lrrfuse/hog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "lrrfuse/errors.hpp"

namespace lrrfuse {

double OrientationHistogram::total() const { return std::accumulate(bins.begin(), bins.end(), 0.0); }

namespace {

constexpr double kBoundarySnap = 1e-9;  // degrees

}  // namespace

OrientationHistogram orientation_histogram(std::span<const double> patch, std::size_t window,
                                           std::size_t bins) {
  if (bins == 0) throw ParameterError("orientation bin count must be positive");
  if (window == 0 || patch.size() != window * window) {
    throw ParameterError("patch length does not match window size");
  }
  const std::size_t n = window;
  const double bin_width = 180.0 / static_cast<double>(bins);
  OrientationHistogram hist{std::vector<double>(bins, 0.0)};
  auto at = [&](std::size_t r, std::size_t c) { return patch[r * n + c]; };
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t up = r == 0 ? 0 : r - 1;
    const std::size_t down = std::min(r + 1, n - 1);
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t lft = c == 0 ? 0 : c - 1;
      const std::size_t rgt = std::min(c + 1, n - 1);
      const double gx = at(r, rgt) - at(r, lft);
      const double gy = at(down, c) - at(up, c);
      const double magnitude = std::sqrt(gx * gx + gy * gy);
      if (magnitude == 0.0) continue;
      double degrees = std::atan2(gy, gx) * (180.0 / std::numbers::pi);
      if (degrees < 0.0) degrees += 180.0;
      // Within kBoundarySnap of a bin edge counts as on it, so the bin does
      // not hinge on the last bit of atan2.
      const double edge = std::round(degrees / bin_width);
      if (std::abs(degrees - edge * bin_width) < kBoundarySnap) degrees = edge * bin_width;
      const auto bin = static_cast<std::size_t>(degrees / bin_width) % bins;
      hist.bins[bin] += magnitude;
    }
  }
  return hist;
}

PatchClassLabel classify_patch(const OrientationHistogram& histogram, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ParameterError("HOG dominance threshold must lie in (0, 1)");
  }
  const double sum = histogram.total();
  if (histogram.bins.empty() || !(sum > 0.0)) return {0};
  const auto max_it = std::max_element(histogram.bins.begin(), histogram.bins.end());
  if (*max_it / sum < threshold) return {0};
  return {static_cast<std::size_t>(max_it - histogram.bins.begin()) + 1};
}

std::vector<PatchClassLabel> classify_columns(const PatchMatrix& patches, std::size_t bins,
                                              double threshold) {
  const std::size_t n = patches.geometry.window();
  std::vector<PatchClassLabel> labels(static_cast<std::size_t>(patches.data.cols()));
  for (Eigen::Index i = 0; i < patches.data.cols(); ++i) {
    std::span<const double> column(patches.data.col(i).data(), n * n);
    labels[static_cast<std::size_t>(i)] = classify_patch(orientation_histogram(column, n, bins), threshold);
  }
  return labels;
}

std::vector<std::vector<std::size_t>> partition_patches(const PatchMatrix& patches,
                                                        std::size_t bins, double threshold) {
  const auto labels = classify_columns(patches, bins, threshold);
  std::vector<std::vector<std::size_t>> sets(bins + 1);
  for (std::size_t i = 0; i < labels.size(); ++i) sets[labels[i].value].push_back(i);
  return sets;
}

}  // namespace lrrfuse
