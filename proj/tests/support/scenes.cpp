#include "scenes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace lrrfuse::testing {
namespace {

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Bilinearly interpolated lattice noise with a given cell size.
std::vector<double> value_noise(std::size_t h, std::size_t w, double cell, std::mt19937_64& rng) {
  const auto gh = static_cast<std::size_t>(std::ceil(static_cast<double>(h) / cell)) + 2;
  const auto gw = static_cast<std::size_t>(std::ceil(static_cast<double>(w) / cell)) + 2;
  std::vector<double> lattice(gh * gw);
  for (double& v : lattice) v = uniform(rng);
  std::vector<double> out(h * w);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const double y = static_cast<double>(r) / cell;
      const double x = static_cast<double>(c) / cell;
      const auto y0 = static_cast<std::size_t>(y);
      const auto x0 = static_cast<std::size_t>(x);
      const double fy = y - static_cast<double>(y0);
      const double fx = x - static_cast<double>(x0);
      const double top = lattice[y0 * gw + x0] * (1 - fx) + lattice[y0 * gw + x0 + 1] * fx;
      const double bot = lattice[(y0 + 1) * gw + x0] * (1 - fx) + lattice[(y0 + 1) * gw + x0 + 1] * fx;
      out[r * w + c] = top * (1 - fy) + bot * fy;
    }
  }
  return out;
}

}  // namespace

GrayImage random_image(std::size_t height, std::size_t width, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> pixels(height * width);
  for (double& v : pixels) v = uniform(rng);
  return GrayImage(height, width, std::move(pixels));
}

GrayImage synthetic_scene(std::size_t height, std::size_t width, std::uint64_t seed, int kind) {
  std::mt19937_64 rng(seed * 7919 + static_cast<std::uint64_t>(kind));
  std::vector<double> px(height * width, 0.0);
  const auto coarse = value_noise(height, width, 24.0, rng);
  const auto medium = value_noise(height, width, 6.0, rng);
  const auto fine = value_noise(height, width, 2.0, rng);
  const double pi = std::numbers::pi;
  switch (((kind % 5) + 5) % 5) {
    case 0: {  // layered texture
      for (std::size_t i = 0; i < px.size(); ++i) px[i] = 0.45 * coarse[i] + 0.3 * medium[i] + 0.25 * fine[i];
      break;
    }
    case 1: {  // oriented gratings with drifting frequency
      const double theta = uniform(rng) * pi;
      for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
          const double u = std::cos(theta) * static_cast<double>(c) + std::sin(theta) * static_cast<double>(r);
          const double f = 0.6 + 0.5 * coarse[r * width + c];
          px[r * width + c] = 0.5 + 0.3 * std::sin(f * u) + 0.2 * (fine[r * width + c] - 0.5);
        }
      }
      break;
    }
    case 2: {  // blocks of random intensity over fine texture
      for (std::size_t i = 0; i < px.size(); ++i) px[i] = 0.25 + 0.35 * fine[i];
      for (int k = 0; k < 40; ++k) {
        const auto r0 = static_cast<std::size_t>(uniform(rng) * static_cast<double>(height));
        const auto c0 = static_cast<std::size_t>(uniform(rng) * static_cast<double>(width));
        const auto bh = 4 + static_cast<std::size_t>(uniform(rng) * 24);
        const auto bw = 4 + static_cast<std::size_t>(uniform(rng) * 24);
        const double level = uniform(rng) * 0.4;
        for (std::size_t r = r0; r < std::min(height, r0 + bh); ++r) {
          for (std::size_t c = c0; c < std::min(width, c0 + bw); ++c) px[r * width + c] += level * (0.5 + fine[r * width + c]) * 0.8;
        }
      }
      break;
    }
    case 3: {  // zone plate mixed with texture
      const double cy = static_cast<double>(height) * (0.3 + 0.4 * uniform(rng));
      const double cx = static_cast<double>(width) * (0.3 + 0.4 * uniform(rng));
      for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
          const double dy = static_cast<double>(r) - cy;
          const double dx = static_cast<double>(c) - cx;
          const double ring = std::sin((dx * dx + dy * dy) / 40.0);
          px[r * width + c] = 0.5 + 0.25 * ring + 0.25 * (medium[r * width + c] - 0.5) + 0.2 * (fine[r * width + c] - 0.5);
        }
      }
      break;
    }
    default: {  // discs and strokes over noise
      for (std::size_t i = 0; i < px.size(); ++i) px[i] = 0.3 * coarse[i] + 0.3 * fine[i];
      for (int k = 0; k < 25; ++k) {
        const double cy = uniform(rng) * static_cast<double>(height);
        const double cx = uniform(rng) * static_cast<double>(width);
        const double rad = 3.0 + uniform(rng) * 14.0;
        const double level = 0.15 + 0.35 * uniform(rng);
        for (std::size_t r = 0; r < height; ++r) {
          for (std::size_t c = 0; c < width; ++c) {
            const double dy = static_cast<double>(r) - cy;
            const double dx = static_cast<double>(c) - cx;
            if (dx * dx + dy * dy <= rad * rad) px[r * width + c] = level + 0.3 * fine[r * width + c];
          }
        }
      }
      break;
    }
  }
  for (double& v : px) v = std::clamp(v, 0.0, 1.0);
  return GrayImage(height, width, std::move(px));
}

}  // namespace lrrfuse::testing
