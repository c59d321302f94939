#include "oracles.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace lrrfuse::testing {

std::vector<double> hog_oracle(const std::vector<double>& patch, std::size_t n, std::size_t bins) {
  auto px = [&](long r, long c) {
    r = std::clamp<long>(r, 0, static_cast<long>(n) - 1);
    c = std::clamp<long>(c, 0, static_cast<long>(n) - 1);
    return patch[static_cast<std::size_t>(r) * n + static_cast<std::size_t>(c)];
  };
  std::vector<double> hist(bins, 0.0);
  for (long r = 0; r < static_cast<long>(n); ++r) {
    for (long c = 0; c < static_cast<long>(n); ++c) {
      const double gx = px(r, c + 1) - px(r, c - 1);
      const double gy = px(r + 1, c) - px(r - 1, c);
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      double deg = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
      while (deg < 0.0) deg += 180.0;
      // Bin edges j * 180 / L; an angle within 1e-9 degrees of an edge
      // belongs to the bin starting there.
      std::size_t bin = 0;
      for (std::size_t j = 1; j <= bins; ++j) {
        if (deg >= 180.0 * static_cast<double>(j) / static_cast<double>(bins) - 1e-9) bin = j;
      }
      hist[bin % bins] += mag;
    }
  }
  return hist;
}

std::size_t classify_oracle(const std::vector<double>& hist, double threshold) {
  double sum = 0.0;
  for (double v : hist) sum += v;
  if (sum == 0.0) return 0;
  std::size_t best = 0;
  for (std::size_t j = 1; j < hist.size(); ++j) {
    if (hist[j] > hist[best]) best = j;
  }
  return hist[best] / sum < threshold ? 0 : best + 1;
}

std::vector<std::size_t> coverage_oracle(std::size_t h, std::size_t w, std::size_t n, std::size_t s) {
  std::vector<std::size_t> count(h * w, 0);
  for (std::size_t top = 0; top + n <= h; top += s) {
    for (std::size_t left = 0; left + n <= w; left += s) {
      for (std::size_t r = top; r < top + n; ++r) {
        for (std::size_t c = left; c < left + n; ++c) ++count[r * w + c];
      }
    }
  }
  return count;
}

std::vector<double> window_average_oracle(const GrayImage& image, std::size_t n, std::size_t s) {
  const std::size_t h = image.height(), w = image.width();
  std::vector<double> sum(h * w, 0.0);
  for (std::size_t top = 0; top + n <= h; top += s) {
    for (std::size_t left = 0; left + n <= w; left += s) {
      for (std::size_t r = top; r < top + n; ++r) {
        for (std::size_t c = left; c < left + n; ++c) sum[r * w + c] += image.at(r, c);
      }
    }
  }
  const auto count = coverage_oracle(h, w, n, s);
  for (std::size_t i = 0; i < sum.size(); ++i) {
    sum[i] = count[i] == 0 ? std::numeric_limits<double>::quiet_NaN()
                           : sum[i] / static_cast<double>(count[i]);
  }
  return sum;
}

Eigen::MatrixXd svt_oracle(const Eigen::MatrixXd& m, double tau) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    s(i, i) = std::max(svd.singularValues()(i) - tau, 0.0);
  }
  return svd.matrixU() * s * svd.matrixV().transpose();
}

Eigen::VectorXd shrink_column_oracle(const Eigen::VectorXd& q, double tau) {
  const long double norm = q.cast<long double>().norm();
  if (norm == 0.0L) return Eigen::VectorXd::Zero(q.size());
  // Along x = t q / |q| the objective is tau t + (t - |q|)^2 / 2 for t >= 0.
  // Extended precision: a flat minimum limits golden section to sqrt(eps).
  auto f = [&](long double t) { return tau * t + 0.5L * (t - norm) * (t - norm); };
  const long double g = (std::sqrt(5.0L) - 1.0L) / 2.0L;
  long double lo = 0.0L, hi = norm;
  long double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  long double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < 200; ++i) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  long double t = 0.5L * (lo + hi);
  if (f(0.0L) <= f(t)) t = 0.0L;
  return q * static_cast<double>(t / norm);
}

double ag_oracle(const GrayImage& image) {
  double total = 0.0;
  std::size_t sites = 0;
  for (std::size_t r = 0; r + 1 < image.height(); ++r) {
    for (std::size_t c = 0; c + 1 < image.width(); ++c) {
      const double dx = image.at(r, c + 1) - image.at(r, c);
      const double dy = image.at(r + 1, c) - image.at(r, c);
      total += std::sqrt((dx * dx + dy * dy) / 2.0);
      ++sites;
    }
  }
  return total / static_cast<double>(sites);
}

double mse_oracle(const GrayImage& x, const GrayImage& y) {
  double total = 0.0;
  for (std::size_t r = 0; r < x.height(); ++r) {
    for (std::size_t c = 0; c < x.width(); ++c) {
      const double d = x.at(r, c) - y.at(r, c);
      total += d * d;
    }
  }
  return total / static_cast<double>(x.size());
}

double ssim_oracle(const GrayImage& x, const GrayImage& y) {
  constexpr int k = 11;
  constexpr double sigma = 1.5;
  double weights[k][k];
  double wsum = 0.0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const double di = i - 5, dj = j - 5;
      weights[i][j] = std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
      wsum += weights[i][j];
    }
  }
  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  double total = 0.0;
  std::size_t windows = 0;
  for (std::size_t top = 0; top + k <= x.height(); ++top) {
    for (std::size_t left = 0; left + k <= x.width(); ++left) {
      double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
          const double w = weights[i][j] / wsum;
          const double a = x.at(top + i, left + j), b = y.at(top + i, left + j);
          mx += w * a;
          my += w * b;
          sxx += w * a * a;
          syy += w * b * b;
          sxy += w * a * b;
        }
      }
      const double vx = sxx - mx * mx, vy = syy - my * my, cov = sxy - mx * my;
      total += ((2 * mx * my + c1) * (2 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

double matched_fraction(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& learned, double threshold) {
  const Eigen::MatrixXd sim = (truth.transpose() * learned).cwiseAbs();
  std::vector<bool> used_t(static_cast<std::size_t>(truth.cols()), false);
  std::vector<bool> used_l(static_cast<std::size_t>(learned.cols()), false);
  std::size_t matched = 0;
  while (true) {
    double best = threshold;
    Eigen::Index bi = -1, bj = -1;
    for (Eigen::Index i = 0; i < sim.rows(); ++i) {
      if (used_t[static_cast<std::size_t>(i)]) continue;
      for (Eigen::Index j = 0; j < sim.cols(); ++j) {
        if (!used_l[static_cast<std::size_t>(j)] && sim(i, j) > best) {
          best = sim(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    if (bi < 0) break;
    used_t[static_cast<std::size_t>(bi)] = true;
    used_l[static_cast<std::size_t>(bj)] = true;
    ++matched;
  }
  return static_cast<double>(matched) / static_cast<double>(truth.cols());
}

}  // namespace lrrfuse::testing
