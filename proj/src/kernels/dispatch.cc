#include <cstdlib>
#include <string>

#include "codemix/kernels/kernels.h"

namespace codemix::kernels {

std::string_view IsaName(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
  }
  return "scalar";
}

bool IsaAvailable(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& TableFor(Isa isa) {
#if defined(__x86_64__) || defined(_M_X64)
  if (isa == Isa::kAvx2 && IsaAvailable(Isa::kAvx2)) return internal::Avx2Table();
#endif
  (void)isa;
  return internal::ScalarTable();
}

namespace {

Isa DetectIsa() {
  if (const char* forced = std::getenv("CODEMIX_SIMD")) {
    if (std::string(forced) == "scalar") return Isa::kScalar;
  }
  return IsaAvailable(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar;
}

}  // namespace

Isa ActiveIsa() {
  static const Isa kIsa = DetectIsa();
  return kIsa;
}

const KernelTable& Active() {
  static const KernelTable& kTable = TableFor(ActiveIsa());
  return kTable;
}

std::size_t ArgMax(std::span<const double> x) {
  if (x.empty()) return 0;
  const double best = Max(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == best) return i;
  }
  return 0;  // all NaN
}

}  // namespace codemix::kernels
