#include <cmath>

#include "lrrfuse/kernels.hpp"

namespace lrrfuse::kernels {
namespace {

double sum_abs_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::fabs(x[i]);
  return acc;
}

double sum_squares_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

double sum_squared_diff_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void scale_scalar(double* x, std::size_t n, double factor) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= factor;
}

void add_scalar(double* dst, const double* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += src[i];
}

void axpy_scalar(double* dst, const double* src, double weight, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double t = weight * src[i];
    dst[i] += t;
  }
}

double gradient_row_sum_scalar(const double* row, const double* next, std::size_t n) {
  double acc = 0.0;
  for (std::size_t c = 0; c + 1 < n; ++c) {
    const double dx = row[c + 1] - row[c];
    const double dy = next[c] - row[c];
    acc += std::sqrt((dx * dx + dy * dy) * 0.5);
  }
  return acc;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{
      Isa::kScalar,    sum_abs_scalar, sum_squares_scalar, sum_squared_diff_scalar,
      scale_scalar,    add_scalar,     axpy_scalar,        gradient_row_sum_scalar,
  };
  return table;
}

}  // namespace lrrfuse::kernels
