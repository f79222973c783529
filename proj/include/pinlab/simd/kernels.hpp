#pragma once
#include <cstddef>
#include <string_view>

// Vector kernels behind the convolution-style inner loops.  Every kernel has a
// scalar reference implementation; wider variants are selected at runtime from
// what the CPU supports.  All of them share the reversed-second-argument
// convention used by renewal convolutions: `bk` points at the element paired
// with a[0] and is walked *backwards*, i.e. the i-th term pairs a[i] with
// bk[-i].

namespace pinlab::simd {

enum class Backend { scalar, avx2, neon };

Backend active_backend();
std::string_view backend_name(Backend b);

// Force a specific backend (tests / benchmarking).  Throws std::runtime_error
// if the requested backend is not compiled in or not supported by this CPU.
void force_backend(Backend b);
void reset_backend();  // back to auto-detect

struct Kernels {
  // sum_{i<n} a[i] * bk[-i]
  double (*dot_rev)(const double* a, const double* bk, std::size_t n);
  // max_{i<n} (a[i] + bk[-i]);  -inf when n == 0
  double (*max_add_rev)(const double* a, const double* bk, std::size_t n);
  // sum_{i<n} exp(a[i] + bk[-i] - shift)
  double (*sum_exp_add_rev)(const double* a, const double* bk, std::size_t n,
                            double shift);
  // sum_{i<n} exp(a[i] - shift)
  double (*sum_exp)(const double* a, std::size_t n, double shift);
  // sum_{i<n} w[i] * exp(c0 + c1*(i0+i))   (geometric-weighted dot)
  double (*dot_expax)(const double* w, std::size_t n, double c0, double c1,
                      std::size_t i0);
};

const Kernels& scalar_kernels();
const Kernels& kernels();  // dispatched

double max_val(const double* a, std::size_t n);  // -inf when n == 0
double logsumexp(const double* a, std::size_t n);

}  // namespace pinlab::simd
