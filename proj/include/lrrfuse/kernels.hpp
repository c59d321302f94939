#pragma once

// Data-parallel inner loops used across the pipeline. Every kernel has a
// portable scalar implementation and, on x86-64, an AVX2 one; the active
// table is picked once from cpuid and can be overridden for testing.
//
// Elementwise kernels (add, axpy, scale) round identically in all variants.
// Reductions accumulate in a different order per variant, so results agree
// to a few ulps rather than bit-exactly.

#include <cstddef>
#include <span>
#include <string_view>

namespace lrrfuse::kernels {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  Isa isa;
  double (*sum_abs)(const double* x, std::size_t n);
  double (*sum_squares)(const double* x, std::size_t n);
  double (*sum_squared_diff)(const double* a, const double* b, std::size_t n);
  void (*scale)(double* x, std::size_t n, double factor);
  void (*add)(double* dst, const double* src, std::size_t n);
  // dst[i] += weight * src[i], multiply then add (never fused).
  void (*axpy)(double* dst, const double* src, double weight, std::size_t n);
  // Sum over c in [0, n-1) of sqrt(((row[c+1]-row[c])^2 + (next[c]-row[c])^2) / 2).
  double (*gradient_row_sum)(const double* row, const double* next, std::size_t n);
};

const KernelTable& scalar_table();
/// nullptr when the variant was not compiled in.
const KernelTable* avx2_table();

bool cpu_supports(Isa isa);
const KernelTable& table(Isa isa);

/// Table used by the span wrappers below.
const KernelTable& active();
/// Throws ParameterError if the host cannot run `isa`.
void select(Isa isa);
/// Restores the cpuid-based default.
void select_best();

std::string_view name(Isa isa);

inline double sum_abs(std::span<const double> x) { return active().sum_abs(x.data(), x.size()); }
inline double sum_squares(std::span<const double> x) {
  return active().sum_squares(x.data(), x.size());
}
double sum_squared_diff(std::span<const double> a, std::span<const double> b);
inline void scale(std::span<double> x, double factor) { active().scale(x.data(), x.size(), factor); }
void add(std::span<double> dst, std::span<const double> src);
void axpy(std::span<double> dst, std::span<const double> src, double weight);
double gradient_row_sum(std::span<const double> row, std::span<const double> next);

}  // namespace lrrfuse::kernels
