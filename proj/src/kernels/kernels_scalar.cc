#include <limits>

#include "codemix/kernels/kernels.h"

namespace codemix::kernels::internal {

namespace {

double SumScalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double DotScalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void AxpyScalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void MultiplyScalar(const double* x, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * y[i];
}

void ScaleScalar(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

double MaxScalar(const double* x, std::size_t n) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] > best) best = x[i];
  }
  return best;
}

}  // namespace

const KernelTable& ScalarTable() {
  static const KernelTable kTable{SumScalar,      DotScalar,   AxpyScalar,
                                  MultiplyScalar, ScaleScalar, MaxScalar};
  return kTable;
}

}  // namespace codemix::kernels::internal
