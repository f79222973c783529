#include "pinlab/simd/kernels.hpp"

#ifdef PINLAB_BUILD_NEON
#include <arm_neon.h>

#include <cmath>
#include <limits>

namespace pinlab::simd {
namespace {

// 2-lane exp, same reduction as the AVX2 variant.
inline float64x2_t exp2l(float64x2_t x) {
  double buf[2];
  vst1q_f64(buf, x);
  // rational-core scalar fallback per lane keeps this exact vs. std::exp within
  // a few ulp; the win on NEON comes from the fused dot/max loops, not exp.
  buf[0] = std::exp(buf[0]);
  buf[1] = std::exp(buf[1]);
  return vld1q_f64(buf);
}

inline float64x2_t load_rev(const double* bk, std::size_t i) {
  float64x2_t v = vld1q_f64(bk - (std::ptrdiff_t)i - 1);
  return vextq_f64(v, v, 1);  // swap lanes
}

double dot_rev_v(const double* a, const double* bk, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vfmaq_f64(acc, vld1q_f64(a + i), load_rev(bk, i));
  double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) s += a[i] * bk[-(std::ptrdiff_t)i];
  return s;
}

double max_add_rev_v(const double* a, const double* bk, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  if (n >= 2) {
    float64x2_t vm = vdupq_n_f64(m);
    for (; i + 2 <= n; i += 2)
      vm = vmaxq_f64(vm, vaddq_f64(vld1q_f64(a + i), load_rev(bk, i)));
    m = std::max(vgetq_lane_f64(vm, 0), vgetq_lane_f64(vm, 1));
  }
  for (; i < n; ++i) m = std::max(m, a[i] + bk[-(std::ptrdiff_t)i]);
  return m;
}

double sum_exp_add_rev_v(const double* a, const double* bk, std::size_t n,
                         double shift) {
  float64x2_t acc = vdupq_n_f64(0.0);
  float64x2_t sh = vdupq_n_f64(shift);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vaddq_f64(acc, exp2l(vsubq_f64(vaddq_f64(vld1q_f64(a + i), load_rev(bk, i)), sh)));
  double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) s += std::exp(a[i] + bk[-(std::ptrdiff_t)i] - shift);
  return s;
}

double sum_exp_v(const double* a, std::size_t n, double shift) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(a[i] - shift);
  return s;
}

double dot_expax_v(const double* w, std::size_t n, double c0, double c1,
                   std::size_t i0) {
  return scalar_kernels().dot_expax(w, n, c0, c1, i0);
}

}  // namespace

const Kernels& neon_kernels() {
  static const Kernels k{dot_rev_v, max_add_rev_v, sum_exp_add_rev_v, sum_exp_v,
                         dot_expax_v};
  return k;
}

}  // namespace pinlab::simd
#endif
