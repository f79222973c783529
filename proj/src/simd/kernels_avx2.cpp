#include "pinlab/simd/kernels.hpp"

#ifdef PINLAB_BUILD_AVX2
#include <immintrin.h>

#include <cmath>
#include <limits>

namespace pinlab::simd {
namespace {

// exp on 4 lanes, Cephes-style: n = round(x/ln2), e^x = 2^n * e^r with the
// rational approximation of e^r on |r| <= ln2/2.  Inputs below -708 flush to
// zero, above +709 saturate to +inf; NaN propagates.
inline __m256d exp4(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d p0 = _mm256_set1_pd(1.26177193074810590878e-4);
  const __m256d p1 = _mm256_set1_pd(3.02994407707441961300e-2);
  const __m256d p2 = _mm256_set1_pd(9.99999999999999999910e-1);
  const __m256d q0 = _mm256_set1_pd(3.00198505138664455042e-6);
  const __m256d q1 = _mm256_set1_pd(2.52448340349684104192e-3);
  const __m256d q2 = _mm256_set1_pd(2.27265548208155028766e-1);
  const __m256d q3 = _mm256_set1_pd(2.00000000000000000005e0);
  const __m256d hi = _mm256_set1_pd(709.0);
  const __m256d lo = _mm256_set1_pd(-708.0);

  __m256d under = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  __m256d over = _mm256_cmp_pd(x, hi, _CMP_GT_OQ);
  __m256d xc = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

  __m256d n = _mm256_round_pd(_mm256_mul_pd(xc, log2e),
                              _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, c1, xc);
  r = _mm256_fnmadd_pd(n, c2, r);
  __m256d rr = _mm256_mul_pd(r, r);

  __m256d px = _mm256_fmadd_pd(p0, rr, p1);
  px = _mm256_fmadd_pd(px, rr, p2);
  px = _mm256_mul_pd(px, r);
  __m256d qx = _mm256_fmadd_pd(q0, rr, q1);
  qx = _mm256_fmadd_pd(qx, rr, q2);
  qx = _mm256_fmadd_pd(qx, rr, q3);
  __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));

  // scale by 2^n through the exponent bits
  __m128i n32 = _mm256_cvtpd_epi32(n);
  __m256i n64 = _mm256_cvtepi32_epi64(n32);
  __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
  e = _mm256_mul_pd(e, _mm256_castsi256_pd(bits));

  e = _mm256_blendv_pd(e, _mm256_setzero_pd(), under);
  e = _mm256_blendv_pd(e, _mm256_set1_pd(std::numeric_limits<double>::infinity()),
                       over);
  // propagate NaN inputs
  __m256d isnan = _mm256_cmp_pd(x, x, _CMP_UNORD_Q);
  e = _mm256_blendv_pd(e, x, isnan);
  return e;
}

inline __m256d load_rev(const double* bk, std::size_t i) {
  // bk[-i-3..-i] ascending in memory, reversed to pair with a[i..i+3]
  __m256d v = _mm256_loadu_pd(bk - (std::ptrdiff_t)i - 3);
  return _mm256_permute4x64_pd(v, _MM_SHUFFLE(0, 1, 2, 3));
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  double a = _mm_cvtsd_f64(lo);
  double b = _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
  return a > b ? a : b;
}

double dot_rev_v(const double* a, const double* bk, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), load_rev(bk, i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), load_rev(bk, i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), load_rev(bk, i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * bk[-(std::ptrdiff_t)i];
  return s;
}

double max_add_rev_v(const double* a, const double* bk, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  if (n >= 4) {
    __m256d vm = _mm256_set1_pd(m);
    for (; i + 4 <= n; i += 4)
      vm = _mm256_max_pd(vm, _mm256_add_pd(_mm256_loadu_pd(a + i), load_rev(bk, i)));
    m = hmax(vm);
  }
  for (; i < n; ++i) {
    double v = a[i] + bk[-(std::ptrdiff_t)i];
    if (v > m) m = v;
  }
  return m;
}

double sum_exp_add_rev_v(const double* a, const double* bk, std::size_t n,
                         double shift) {
  __m256d acc = _mm256_setzero_pd();
  const __m256d sh = _mm256_set1_pd(shift);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_sub_pd(_mm256_add_pd(_mm256_loadu_pd(a + i), load_rev(bk, i)), sh);
    acc = _mm256_add_pd(acc, exp4(v));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += std::exp(a[i] + bk[-(std::ptrdiff_t)i] - shift);
  return s;
}

double sum_exp_v(const double* a, std::size_t n, double shift) {
  __m256d acc = _mm256_setzero_pd();
  const __m256d sh = _mm256_set1_pd(shift);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, exp4(_mm256_sub_pd(_mm256_loadu_pd(a + i), sh)));
  double s = hsum(acc);
  for (; i < n; ++i) s += std::exp(a[i] - shift);
  return s;
}

double dot_expax_v(const double* w, std::size_t n, double c0, double c1,
                   std::size_t i0) {
  __m256d acc = _mm256_setzero_pd();
  const __m256d vc0 = _mm256_set1_pd(c0);
  const __m256d vc1 = _mm256_set1_pd(c1);
  const __m256d base = _mm256_set1_pd((double)i0);
  const __m256d lane = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d idx = _mm256_add_pd(_mm256_add_pd(base, _mm256_set1_pd((double)i)), lane);
    __m256d e = exp4(_mm256_fmadd_pd(vc1, idx, vc0));
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), e, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * std::exp(c0 + c1 * (double)(i0 + i));
  return s;
}

}  // namespace

const Kernels& avx2_kernels() {
  static const Kernels k{dot_rev_v, max_add_rev_v, sum_exp_add_rev_v, sum_exp_v,
                         dot_expax_v};
  return k;
}

}  // namespace pinlab::simd
#endif
