#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lrrfuse {

/// Single-channel image with intensities in [0, 1], stored row-major.
class GrayImage {
 public:
  /// Uniform image. Throws ParameterError on zero dimensions or a fill value outside [0, 1].
  GrayImage(std::size_t height, std::size_t width, double fill = 0.0);
  /// Takes ownership of `pixels`. Every value must already lie in [0, 1].
  GrayImage(std::size_t height, std::size_t width, std::vector<double> pixels);

  /// Clamps every value into [0, 1]; non-finite values are rejected.
  static GrayImage clamped(std::size_t height, std::size_t width, std::vector<double> pixels);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return pixels_.size(); }

  double at(std::size_t row, std::size_t col) const { return pixels_[row * width_ + col]; }
  std::span<const double> pixels() const { return pixels_; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(pixels_).subspan(r * width_, width_);
  }

  bool same_shape(const GrayImage& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t height_;
  std::size_t width_;
  std::vector<double> pixels_;
};

/// Per-pixel flags marking the region that stays sharp in the first image of a focus pair.
class FocusMask {
 public:
  FocusMask(std::size_t height, std::size_t width, std::vector<std::uint8_t> sharp);

  /// Sharp where c < width/2 (floor).
  static FocusMask left_half(std::size_t height, std::size_t width);
  static FocusMask right_half(std::size_t height, std::size_t width);
  /// Sharp where r < height/2 (floor).
  static FocusMask top_half(std::size_t height, std::size_t width);
  static FocusMask bottom_half(std::size_t height, std::size_t width);
  /// Sharp where (r - cy)^2 + (c - cx)^2 <= radius^2.
  static FocusMask disk(std::size_t height, std::size_t width, double cx, double cy, double radius);
  /// Sharp where the image intensity is >= 0.5.
  static FocusMask from_image(const GrayImage& image);
  static FocusMask uniform(std::size_t height, std::size_t width, bool sharp);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  bool sharp(std::size_t row, std::size_t col) const { return flags_[row * width_ + col] != 0; }
  FocusMask complement() const;

 private:
  std::size_t height_;
  std::size_t width_;
  std::vector<std::uint8_t> flags_;
};

/// Normalized size x size Gaussian weights, row-major.
std::vector<double> gaussian_kernel(std::size_t size, double sigma);

/// Unclamped Gaussian convolution of an arbitrary real plane with replicated
/// borders. Linear in `plane`.
std::vector<double> blur_plane(std::span<const double> plane, std::size_t height,
                               std::size_t width, std::size_t size, double sigma);

/// Gaussian blur with replicated borders; the result is clamped to [0, 1].
GrayImage gaussian_blur(const GrayImage& image, std::size_t size, double sigma);

struct FocusPair {
  GrayImage a;  // sharp where the mask is set
  GrayImage b;  // sharp everywhere else
};

/// Splits `original` into two partially defocused views. Each pixel is the
/// original in exactly one output and the blurred original in the other.
FocusPair make_focus_pair(const GrayImage& original, const FocusMask& mask, std::size_t size,
                          double sigma);

}  // namespace lrrfuse
