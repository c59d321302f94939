#include "lrrfuse/patching.hpp"

#include <algorithm>
#include <span>
#include <string>

#include "lrrfuse/errors.hpp"
#include "lrrfuse/kernels.hpp"

namespace lrrfuse {
namespace {

// For each coordinate along one axis, the nearest covered coordinate
// (lower one on ties).
std::vector<std::size_t> nearest_covered(std::size_t extent, std::size_t window, std::size_t step,
                                         std::size_t windows) {
  std::vector<bool> covered(extent, false);
  for (std::size_t k = 0; k < windows; ++k) {
    for (std::size_t t = 0; t < window; ++t) covered[k * step + t] = true;
  }
  std::vector<std::size_t> nearest(extent);
  for (std::size_t i = 0; i < extent; ++i) {
    if (covered[i]) {
      nearest[i] = i;
      continue;
    }
    std::size_t best = extent;
    for (std::size_t d = 1; d < extent && best == extent; ++d) {
      if (i >= d && covered[i - d]) {
        best = i - d;
      } else if (i + d < extent && covered[i + d]) {
        best = i + d;
      }
    }
    nearest[i] = best;
  }
  return nearest;
}

}  // namespace

PatchGeometry::PatchGeometry(std::size_t height, std::size_t width, std::size_t window,
                             std::size_t step)
    : height_(height), width_(width), window_(window), step_(step) {
  if (window == 0) throw ParameterError("patch window must be positive");
  if (step == 0) throw ParameterError("patch step must be positive");
  if (window > height || window > width) {
    throw ParameterError("patch window " + std::to_string(window) + " exceeds image size " +
                         std::to_string(height) + "x" + std::to_string(width));
  }
  grid_rows_ = (height - window) / step + 1;
  grid_cols_ = (width - window) / step + 1;
}

std::vector<std::size_t> PatchGeometry::coverage() const {
  std::vector<std::size_t> counts(height_ * width_, 0);
  for (std::size_t gr = 0; gr < grid_rows_; ++gr) {
    for (std::size_t gc = 0; gc < grid_cols_; ++gc) {
      for (std::size_t y = 0; y < window_; ++y) {
        std::size_t* row = counts.data() + (gr * step_ + y) * width_ + gc * step_;
        for (std::size_t x = 0; x < window_; ++x) ++row[x];
      }
    }
  }
  return counts;
}

PatchMatrix extract_patches(const GrayImage& image, std::size_t window, std::size_t step) {
  PatchGeometry geometry(image.height(), image.width(), window, step);
  Eigen::MatrixXd data(static_cast<Eigen::Index>(geometry.patch_length()),
                       static_cast<Eigen::Index>(geometry.count()));
  for (std::size_t i = 0; i < geometry.count(); ++i) {
    double* column = data.col(static_cast<Eigen::Index>(i)).data();
    const std::size_t top = geometry.top(i);
    const std::size_t left = geometry.left(i);
    for (std::size_t y = 0; y < window; ++y) {
      const auto src = image.row(top + y).subspan(left, window);
      std::copy(src.begin(), src.end(), column + y * window);
    }
  }
  return PatchMatrix{geometry, std::move(data)};
}

GrayImage overlap_average(const PatchGeometry& geometry, const Eigen::MatrixXd& patches) {
  const std::size_t n = geometry.window();
  if (static_cast<std::size_t>(patches.rows()) != geometry.patch_length() ||
      static_cast<std::size_t>(patches.cols()) != geometry.count()) {
    throw ParameterError("patch matrix shape does not match its geometry");
  }
  const std::size_t height = geometry.height();
  const std::size_t width = geometry.width();
  std::vector<double> sums(height * width, 0.0);
  for (std::size_t i = 0; i < geometry.count(); ++i) {
    const double* column = patches.col(static_cast<Eigen::Index>(i)).data();
    const std::size_t top = geometry.top(i);
    const std::size_t left = geometry.left(i);
    for (std::size_t y = 0; y < n; ++y) {
      kernels::add(std::span<double>(sums.data() + (top + y) * width + left, n),
                   std::span<const double>(column + y * n, n));
    }
  }

  const std::vector<std::size_t> counts = geometry.coverage();
  std::vector<double> pixels(height * width);
  for (std::size_t p = 0; p < pixels.size(); ++p) {
    if (counts[p] > 0) pixels[p] = sums[p] / static_cast<double>(counts[p]);
  }

  const std::size_t covered_rows = (geometry.grid_rows() - 1) * geometry.step() + n;
  const std::size_t covered_cols = (geometry.grid_cols() - 1) * geometry.step() + n;
  const bool fully_covered = covered_rows == height && covered_cols == width && geometry.step() <= n;
  if (!fully_covered) {
    const auto near_row = nearest_covered(height, n, geometry.step(), geometry.grid_rows());
    const auto near_col = nearest_covered(width, n, geometry.step(), geometry.grid_cols());
    for (std::size_t r = 0; r < height; ++r) {
      for (std::size_t c = 0; c < width; ++c) {
        if (counts[r * width + c] == 0) pixels[r * width + c] = pixels[near_row[r] * width + near_col[c]];
      }
    }
  }
  return GrayImage::clamped(height, width, std::move(pixels));
}

}  // namespace lrrfuse
