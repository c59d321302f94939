#include "lrrfuse/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lrrfuse/errors.hpp"
#include "lrrfuse/kernels.hpp"

namespace lrrfuse {
namespace {

void check_dimensions(std::size_t height, std::size_t width) {
  if (height == 0 || width == 0) throw ParameterError("image dimensions must be positive");
}

// Normalized 1-D taps; their outer product is the normalized 2-D kernel.
std::vector<double> gaussian_taps(std::size_t size, double sigma) {
  if (size == 0 || size % 2 == 0) {
    throw ParameterError("Gaussian kernel size must be odd, got " + std::to_string(size));
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("Gaussian sigma must be positive");
  }
  const auto half = static_cast<long>(size / 2);
  std::vector<double> taps(size);
  double total = 0.0;
  for (long k = -half; k <= half; ++k) {
    const double x = static_cast<double>(k);
    taps[static_cast<std::size_t>(k + half)] = std::exp(-(x * x) / (2.0 * sigma * sigma));
  }
  for (double t : taps) total += t;
  for (double& t : taps) t /= total;
  return taps;
}

}  // namespace

GrayImage::GrayImage(std::size_t height, std::size_t width, double fill)
    : height_(height), width_(width) {
  check_dimensions(height, width);
  if (!(fill >= 0.0 && fill <= 1.0)) throw ParameterError("fill intensity outside [0, 1]");
  pixels_.assign(height * width, fill);
}

GrayImage::GrayImage(std::size_t height, std::size_t width, std::vector<double> pixels)
    : height_(height), width_(width), pixels_(std::move(pixels)) {
  check_dimensions(height, width);
  if (pixels_.size() != height * width) throw ParameterError("pixel count does not match dimensions");
  for (double v : pixels_) {
    if (!(v >= 0.0 && v <= 1.0)) throw ParameterError("intensity outside [0, 1]");
  }
}

GrayImage GrayImage::clamped(std::size_t height, std::size_t width, std::vector<double> pixels) {
  for (double& v : pixels) {
    if (!std::isfinite(v)) throw NumericError("non-finite intensity");
    v = std::clamp(v, 0.0, 1.0);
  }
  return GrayImage(height, width, std::move(pixels));
}

FocusMask::FocusMask(std::size_t height, std::size_t width, std::vector<std::uint8_t> sharp)
    : height_(height), width_(width), flags_(std::move(sharp)) {
  check_dimensions(height, width);
  if (flags_.size() != height * width) throw ParameterError("mask size does not match dimensions");
}

namespace {

template <typename Pred>
FocusMask mask_from(std::size_t height, std::size_t width, Pred pred) {
  std::vector<std::uint8_t> flags(height * width);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) flags[r * width + c] = pred(r, c) ? 1 : 0;
  }
  return FocusMask(height, width, std::move(flags));
}

}  // namespace

FocusMask FocusMask::left_half(std::size_t height, std::size_t width) {
  return mask_from(height, width, [&](std::size_t, std::size_t c) { return c < width / 2; });
}

FocusMask FocusMask::right_half(std::size_t height, std::size_t width) {
  return left_half(height, width).complement();
}

FocusMask FocusMask::top_half(std::size_t height, std::size_t width) {
  return mask_from(height, width, [&](std::size_t r, std::size_t) { return r < height / 2; });
}

FocusMask FocusMask::bottom_half(std::size_t height, std::size_t width) {
  return top_half(height, width).complement();
}

FocusMask FocusMask::disk(std::size_t height, std::size_t width, double cx, double cy,
                          double radius) {
  if (!(radius >= 0.0)) throw ParameterError("disk radius must be non-negative");
  return mask_from(height, width, [&](std::size_t r, std::size_t c) {
    const double dy = static_cast<double>(r) - cy;
    const double dx = static_cast<double>(c) - cx;
    return dx * dx + dy * dy <= radius * radius;
  });
}

FocusMask FocusMask::from_image(const GrayImage& image) {
  return mask_from(image.height(), image.width(),
                   [&](std::size_t r, std::size_t c) { return image.at(r, c) >= 0.5; });
}

FocusMask FocusMask::uniform(std::size_t height, std::size_t width, bool sharp) {
  return mask_from(height, width, [&](std::size_t, std::size_t) { return sharp; });
}

FocusMask FocusMask::complement() const {
  std::vector<std::uint8_t> flipped(flags_.size());
  std::transform(flags_.begin(), flags_.end(), flipped.begin(),
                 [](std::uint8_t f) -> std::uint8_t { return f ? 0 : 1; });
  return FocusMask(height_, width_, std::move(flipped));
}

std::vector<double> gaussian_kernel(std::size_t size, double sigma) {
  // Validates size and sigma.
  gaussian_taps(size, sigma);
  const auto half = static_cast<long>(size / 2);
  std::vector<double> weights(size * size);
  double total = 0.0;
  for (long y = -half; y <= half; ++y) {
    for (long x = -half; x <= half; ++x) {
      const double r2 = static_cast<double>(x * x + y * y);
      const double w = std::exp(-r2 / (2.0 * sigma * sigma));
      weights[static_cast<std::size_t>((y + half) * static_cast<long>(size) + (x + half))] = w;
      total += w;
    }
  }
  for (double& w : weights) w /= total;
  return weights;
}

std::vector<double> blur_plane(std::span<const double> plane, std::size_t height,
                               std::size_t width, std::size_t size, double sigma) {
  check_dimensions(height, width);
  if (plane.size() != height * width) throw ParameterError("plane size does not match dimensions");
  const std::vector<double> taps = gaussian_taps(size, sigma);
  const std::size_t half = size / 2;

  // Horizontal pass over a row padded by replication.
  std::vector<double> horizontal(height * width, 0.0);
  std::vector<double> padded(width + 2 * half);
  for (std::size_t r = 0; r < height; ++r) {
    const auto src = plane.subspan(r * width, width);
    std::fill(padded.begin(), padded.begin() + static_cast<long>(half), src.front());
    std::copy(src.begin(), src.end(), padded.begin() + static_cast<long>(half));
    std::fill(padded.end() - static_cast<long>(half), padded.end(), src.back());
    std::span<double> dst(horizontal.data() + r * width, width);
    for (std::size_t k = 0; k < size; ++k) {
      kernels::axpy(dst, std::span<const double>(padded.data() + k, width), taps[k]);
    }
  }

  // Vertical pass with clamped row indices.
  std::vector<double> out(height * width, 0.0);
  const auto last = static_cast<long>(height) - 1;
  for (std::size_t r = 0; r < height; ++r) {
    std::span<double> dst(out.data() + r * width, width);
    for (std::size_t k = 0; k < size; ++k) {
      const long src_row =
          std::clamp(static_cast<long>(r) + static_cast<long>(k) - static_cast<long>(half), 0L, last);
      kernels::axpy(dst,
                    std::span<const double>(horizontal.data() + static_cast<std::size_t>(src_row) * width,
                                            width),
                    taps[k]);
    }
  }
  return out;
}

GrayImage gaussian_blur(const GrayImage& image, std::size_t size, double sigma) {
  return GrayImage::clamped(image.height(), image.width(),
                            blur_plane(image.pixels(), image.height(), image.width(), size, sigma));
}

FocusPair make_focus_pair(const GrayImage& original, const FocusMask& mask, std::size_t size,
                          double sigma) {
  if (mask.height() != original.height() || mask.width() != original.width()) {
    throw ParameterError("focus mask dimensions do not match the image");
  }
  const GrayImage blurred = gaussian_blur(original, size, sigma);
  std::vector<double> a(original.size());
  std::vector<double> b(original.size());
  for (std::size_t r = 0; r < original.height(); ++r) {
    for (std::size_t c = 0; c < original.width(); ++c) {
      const std::size_t i = r * original.width() + c;
      const bool keep = mask.sharp(r, c);
      a[i] = keep ? original.at(r, c) : blurred.at(r, c);
      b[i] = keep ? blurred.at(r, c) : original.at(r, c);
    }
  }
  return FocusPair{GrayImage(original.height(), original.width(), std::move(a)),
                   GrayImage(original.height(), original.width(), std::move(b))};
}

}  // namespace lrrfuse
