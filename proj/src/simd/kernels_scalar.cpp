#include "pinlab/simd/kernels.hpp"

#include <cmath>
#include <limits>

namespace pinlab::simd {
namespace {

double dot_rev_s(const double* a, const double* bk, std::size_t n) {
  // Two accumulators: keeps the dependency chain short without changing the
  // result enough to matter against the vector variants.
  double s0 = 0.0, s1 = 0.0;
  std::size_t i = 0;
  for (; i + 1 < n; i += 2) {
    s0 += a[i] * bk[-(std::ptrdiff_t)i];
    s1 += a[i + 1] * bk[-(std::ptrdiff_t)(i + 1)];
  }
  if (i < n) s0 += a[i] * bk[-(std::ptrdiff_t)i];
  return s0 + s1;
}

double max_add_rev_s(const double* a, const double* bk, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double v = a[i] + bk[-(std::ptrdiff_t)i];
    if (v > m) m = v;
  }
  return m;
}

double sum_exp_add_rev_s(const double* a, const double* bk, std::size_t n,
                         double shift) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    s += std::exp(a[i] + bk[-(std::ptrdiff_t)i] - shift);
  return s;
}

double sum_exp_s(const double* a, std::size_t n, double shift) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(a[i] - shift);
  return s;
}

double dot_expax_s(const double* w, std::size_t n, double c0, double c1,
                   std::size_t i0) {
  // exp(c0 + c1*(i0+i)) via a running multiplier, refreshed every 512 steps so
  // the accumulated rounding of the recurrence stays near machine precision.
  double s = 0.0;
  const double step = std::exp(c1);
  std::size_t i = 0;
  while (i < n) {
    std::size_t stop = i + 512 < n ? i + 512 : n;
    double e = std::exp(c0 + c1 * (double)(i0 + i));
    for (; i < stop; ++i) {
      s += w[i] * e;
      e *= step;
    }
  }
  return s;
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k{dot_rev_s, max_add_rev_s, sum_exp_add_rev_s, sum_exp_s,
                         dot_expax_s};
  return k;
}

}  // namespace pinlab::simd
