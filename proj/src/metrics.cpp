#include "lrrfuse/metrics.hpp"

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "lrrfuse/errors.hpp"
#include "lrrfuse/kernels.hpp"

namespace lrrfuse {
namespace {

constexpr std::size_t kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

void require_same_shape(const GrayImage& a, const GrayImage& b) {
  if (!a.same_shape(b)) throw ParameterError("images differ in size");
}

std::vector<double> ssim_taps() {
  std::vector<double> taps(kSsimWindow);
  const double half = static_cast<double>(kSsimWindow / 2);
  double total = 0.0;
  for (std::size_t k = 0; k < kSsimWindow; ++k) {
    const double x = static_cast<double>(k) - half;
    taps[k] = std::exp(-(x * x) / (2.0 * kSsimSigma * kSsimSigma));
    total += taps[k];
  }
  for (double& t : taps) t /= total;
  return taps;
}

// Separable correlation keeping only positions where the window fits.
std::vector<double> filter_valid(std::span<const double> plane, std::size_t height, std::size_t width,
                                 const std::vector<double>& taps) {
  const std::size_t span = taps.size();
  const std::size_t out_w = width - span + 1;
  const std::size_t out_h = height - span + 1;
  std::vector<double> horizontal(height * out_w, 0.0);
  for (std::size_t r = 0; r < height; ++r) {
    std::span<double> dst(horizontal.data() + r * out_w, out_w);
    for (std::size_t k = 0; k < span; ++k) kernels::axpy(dst, plane.subspan(r * width + k, out_w), taps[k]);
  }
  std::vector<double> out(out_h * out_w, 0.0);
  for (std::size_t r = 0; r < out_h; ++r) {
    std::span<double> dst(out.data() + r * out_w, out_w);
    for (std::size_t k = 0; k < span; ++k) {
      kernels::axpy(dst, std::span<const double>(horizontal.data() + (r + k) * out_w, out_w), taps[k]);
    }
  }
  return out;
}

}  // namespace

double average_gradient(const GrayImage& image) {
  const std::size_t n = image.height();
  const std::size_t m = image.width();
  if (n < 2 || m < 2) throw ParameterError("average gradient needs at least a 2x2 image");
  double total = 0.0;
  for (std::size_t r = 0; r + 1 < n; ++r) total += kernels::gradient_row_sum(image.row(r), image.row(r + 1));
  return total / static_cast<double>((n - 1) * (m - 1));
}

double psnr(const GrayImage& image, const GrayImage& reference) {
  require_same_shape(image, reference);
  const double mse = kernels::sum_squared_diff(image.pixels(), reference.pixels()) / static_cast<double>(image.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

double ssim(const GrayImage& image, const GrayImage& reference) {
  require_same_shape(image, reference);
  const std::size_t h = image.height();
  const std::size_t w = image.width();
  if (h < kSsimWindow || w < kSsimWindow) throw ParameterError("SSIM needs images of at least 11x11");

  const auto x = image.pixels();
  const auto y = reference.pixels();
  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto taps = ssim_taps();
  const auto mu_x = filter_valid(x, h, w, taps);
  const auto mu_y = filter_valid(y, h, w, taps);
  const auto e_xx = filter_valid(xx, h, w, taps);
  const auto e_yy = filter_valid(yy, h, w, taps);
  const auto e_xy = filter_valid(xy, h, w, taps);

  double total = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double mx = mu_x[i];
    const double my = mu_y[i];
    const double var_x = e_xx[i] - mx * mx;
    const double var_y = e_yy[i] - my * my;
    const double cov = e_xy[i] - mx * my;
    const double numerator = (2.0 * mx * my + kC1) * (2.0 * cov + kC2);
    const double denominator = (mx * mx + my * my + kC1) * (var_x + var_y + kC2);
    total += numerator / denominator;
  }
  return total / static_cast<double>(mu_x.size());
}

MetricsReport evaluate(const GrayImage& image, const GrayImage& reference) {
  return MetricsReport{average_gradient(image), psnr(image, reference), ssim(image, reference)};
}

}  // namespace lrrfuse
