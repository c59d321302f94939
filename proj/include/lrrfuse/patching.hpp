#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "lrrfuse/image.hpp"

namespace lrrfuse {

/// Sliding-window grid over an image. Windows are enumerated row-major over
/// the grid; window (r, c) has its top-left pixel at (r * step, c * step).
class PatchGeometry {
 public:
  /// Throws ParameterError unless 1 <= window <= min(height, width) and step >= 1.
  PatchGeometry(std::size_t height, std::size_t width, std::size_t window, std::size_t step);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t window() const { return window_; }
  std::size_t step() const { return step_; }
  std::size_t grid_rows() const { return grid_rows_; }
  std::size_t grid_cols() const { return grid_cols_; }
  /// Q, the number of windows.
  std::size_t count() const { return grid_rows_ * grid_cols_; }
  /// n^2, the length of a vectorized patch.
  std::size_t patch_length() const { return window_ * window_; }

  struct GridIndex {
    std::size_t row;
    std::size_t col;
    friend bool operator==(const GridIndex&, const GridIndex&) = default;
  };

  std::size_t column_of(GridIndex g) const { return g.row * grid_cols_ + g.col; }
  GridIndex grid_of(std::size_t column) const { return {column / grid_cols_, column % grid_cols_}; }
  std::size_t top(std::size_t column) const { return grid_of(column).row * step_; }
  std::size_t left(std::size_t column) const { return grid_of(column).col * step_; }

  /// Number of windows containing each pixel, row-major.
  std::vector<std::size_t> coverage() const;

  friend bool operator==(const PatchGeometry&, const PatchGeometry&) = default;

 private:
  std::size_t height_;
  std::size_t width_;
  std::size_t window_;
  std::size_t step_;
  std::size_t grid_rows_;
  std::size_t grid_cols_;
};

/// n^2 x Q matrix; column i is window i vectorized row-major.
struct PatchMatrix {
  PatchGeometry geometry;
  Eigen::MatrixXd data;
};

PatchMatrix extract_patches(const GrayImage& image, std::size_t window, std::size_t step);

/// Averages every patch entry onto the pixels it covers. Pixels no window
/// reaches take the value of the nearest covered pixel. Clamped to [0, 1].
/// Sums are taken in column order, so the result does not depend on threading
/// or kernel variant.
GrayImage overlap_average(const PatchGeometry& geometry, const Eigen::MatrixXd& patches);

inline GrayImage reconstruct_average(const PatchMatrix& patches) {
  return overlap_average(patches.geometry, patches.data);
}

}  // namespace lrrfuse
