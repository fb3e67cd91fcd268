#ifndef CODEMIX_KERNELS_KERNELS_H_
#define CODEMIX_KERNELS_KERNELS_H_

#include <cstddef>
#include <span>
#include <string_view>

// Dense double-precision loops used by EM training, alignment and the
// surrogate scorer. Each kernel has a scalar reference and, on x86-64, an
// AVX2 variant; the variant is chosen once at startup from CPUID.
// Setting CODEMIX_SIMD=scalar in the environment forces the reference path.
//
// Reductions (Sum, Dot) may differ from the reference in the last bits
// because lanes are summed in a different order. Elementwise kernels are
// bit-identical across variants, as are Max/ArgMax on NaN-free input.
namespace codemix::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view IsaName(Isa isa);

struct KernelTable {
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // out = x * y (elementwise); out may alias x or y
  void (*multiply)(const double* x, const double* y, double* out, std::size_t n);
  // x *= a
  void (*scale)(double a, double* x, std::size_t n);
  // -inf for n == 0
  double (*max)(const double* x, std::size_t n);
};

bool IsaAvailable(Isa isa);
const KernelTable& TableFor(Isa isa);

// The dispatched table for this process.
Isa ActiveIsa();
const KernelTable& Active();

inline double Sum(std::span<const double> x) { return Active().sum(x.data(), x.size()); }
inline double Dot(std::span<const double> x, std::span<const double> y) {
  return Active().dot(x.data(), y.data(), x.size());
}
inline void Axpy(double a, std::span<const double> x, std::span<double> y) {
  Active().axpy(a, x.data(), y.data(), x.size());
}
inline void Multiply(std::span<const double> x, std::span<const double> y,
                     std::span<double> out) {
  Active().multiply(x.data(), y.data(), out.data(), x.size());
}
inline void Scale(double a, std::span<double> x) { Active().scale(a, x.data(), x.size()); }
inline double Max(std::span<const double> x) { return Active().max(x.data(), x.size()); }

// Index of the first maximal element; 0 when empty.
std::size_t ArgMax(std::span<const double> x);

namespace internal {
const KernelTable& ScalarTable();
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& Avx2Table();
#endif
}  // namespace internal

}  // namespace codemix::kernels

#endif  // CODEMIX_KERNELS_KERNELS_H_
