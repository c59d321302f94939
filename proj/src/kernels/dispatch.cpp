#include <atomic>
#include <string>

#include "lrrfuse/errors.hpp"
#include "lrrfuse/kernels.hpp"

namespace lrrfuse::kernels {
namespace {

const KernelTable* best_table() {
  if (cpu_supports(Isa::kAvx2)) return avx2_table();
  return &scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> slot{best_table()};
  return slot;
}

void require_same_size(std::size_t a, std::size_t b) {
  if (a != b) throw ParameterError("kernel operands differ in length");
}

}  // namespace

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(__x86_64__) || defined(__i386__)
      return avx2_table() != nullptr && __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!cpu_supports(isa)) {
    throw ParameterError("kernel variant not available on this host: " + std::string(name(isa)));
  }
  return isa == Isa::kAvx2 ? *avx2_table() : scalar_table();
}

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

void select(Isa isa) { current().store(&table(isa), std::memory_order_relaxed); }

void select_best() { current().store(best_table(), std::memory_order_relaxed); }

std::string_view name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

double sum_squared_diff(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size());
  return active().sum_squared_diff(a.data(), b.data(), a.size());
}

void add(std::span<double> dst, std::span<const double> src) {
  require_same_size(dst.size(), src.size());
  active().add(dst.data(), src.data(), dst.size());
}

void axpy(std::span<double> dst, std::span<const double> src, double weight) {
  require_same_size(dst.size(), src.size());
  active().axpy(dst.data(), src.data(), weight, dst.size());
}

double gradient_row_sum(std::span<const double> row, std::span<const double> next) {
  require_same_size(row.size(), next.size());
  return active().gradient_row_sum(row.data(), next.data(), row.size());
}

}  // namespace lrrfuse::kernels
