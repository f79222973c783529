#include "pinlab/simd/kernels.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

namespace pinlab::simd {

#ifdef PINLAB_BUILD_AVX2
const Kernels& avx2_kernels();
#endif
#ifdef PINLAB_BUILD_NEON
const Kernels& neon_kernels();
#endif

namespace {

Backend detect() {
#ifdef PINLAB_BUILD_AVX2
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return Backend::avx2;
#endif
#ifdef PINLAB_BUILD_NEON
  return Backend::neon;
#endif
  return Backend::scalar;
}

std::atomic<int> g_forced{-1};

Backend current() {
  int f = g_forced.load(std::memory_order_relaxed);
  if (f >= 0) return static_cast<Backend>(f);
  static const Backend b = detect();
  return b;
}

}  // namespace

Backend active_backend() { return current(); }

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "?";
}

void force_backend(Backend b) {
  switch (b) {
    case Backend::scalar: break;
    case Backend::avx2:
#ifdef PINLAB_BUILD_AVX2
      if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) break;
#endif
      throw std::runtime_error("avx2 backend unavailable");
    case Backend::neon:
#ifdef PINLAB_BUILD_NEON
      break;
#else
      throw std::runtime_error("neon backend unavailable");
#endif
  }
  g_forced.store(static_cast<int>(b), std::memory_order_relaxed);
}

void reset_backend() { g_forced.store(-1, std::memory_order_relaxed); }

const Kernels& kernels() {
  switch (current()) {
#ifdef PINLAB_BUILD_AVX2
    case Backend::avx2: return avx2_kernels();
#endif
#ifdef PINLAB_BUILD_NEON
    case Backend::neon: return neon_kernels();
#endif
    default: return scalar_kernels();
  }
}

double max_val(const double* a, std::size_t n) {
  double m = -HUGE_VAL;
  for (std::size_t i = 0; i < n; ++i)
    if (a[i] > m) m = a[i];
  return m;
}

double logsumexp(const double* a, std::size_t n) {
  if (n == 0) return -HUGE_VAL;
  double m = max_val(a, n);
  if (!std::isfinite(m)) return m;
  return m + std::log(kernels().sum_exp(a, n, m));
}

}  // namespace pinlab::simd
