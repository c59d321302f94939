#pragma once

#include "lrrfuse/image.hpp"

namespace lrrfuse {

struct MetricsReport {
  double ag = 0.0;
  double psnr = 0.0;  // dB; +infinity for identical images
  double ssim = 0.0;
};

/// Mean over the (N-1)(M-1) forward-difference sites of
/// sqrt((dx^2 + dy^2) / 2). Requires N, M >= 2.
double average_gradient(const GrayImage& image);

/// 10 log10(1 / MSE) for unit-range images; +infinity when MSE = 0.
double psnr(const GrayImage& image, const GrayImage& reference);

/// Mean SSIM over all fully-contained 11x11 windows with Gaussian weights
/// (sigma 1.5), C1 = 0.01^2, C2 = 0.03^2. Requires min(N, M) >= 11.
double ssim(const GrayImage& image, const GrayImage& reference);

/// AG of `image`, PSNR and SSIM against `reference`.
MetricsReport evaluate(const GrayImage& image, const GrayImage& reference);

}  // namespace lrrfuse
