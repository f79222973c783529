#pragma once
#include <cstdint>
#include <span>
#include <vector>

#include "pinlab/kernels.hpp"
#include "pinlab/rng.hpp"
#include "pinlab/stats.hpp"

namespace pinlab {

// mass renewal function u_0..N, u_m = sum_{j<m} u_j k(m-j); u_m = P(m in tau)
std::vector<double> mass_renewal(const Law& law, std::size_t N);

// u_N * L(N) N^{1-alpha} * pi / (alpha sin(pi alpha)) -> 1,  alpha in (0,1)
double doney_ratio(const Law& law, std::size_t N);

// -log E e^{-lam tau_1} against c_alpha lam^alpha L(1/lam),
// c_alpha = Gamma(1-alpha)/alpha; returns bracketed exponent and the ratio
struct LaplaceCheck {
  double lam = 0.0;
  Interval exponent{};
  double asymptote = 0.0;
  double ratio = 0.0;  // exponent.mid / asymptote
};
LaplaceCheck laplace_exponent_check(const Law& law, double lam);

// defective inter-arrival law q(n), zero below the offset k:
//   q(n) = scale * sum_{j<k} k(n-j)^gamma a[j]   for n >= k
// total mass rho < 1; the induced renewal terminates after a geometric
// number of points
struct TerminatingLaw {
  std::size_t k = 1;
  double gamma = 1.0;
  double scale = 1.0;
  double rho = 0.0;        // partial mass up to the table end
  Interval mass{};         // certified total mass bracket
  std::vector<double> q;   // q[0..len], q[n] = 0 for n < k
  const Law* base = nullptr;
};

// builds q up to len; a has k entries (a[0] corresponds to j = 0)
TerminatingLaw make_terminating(const Law& law, std::size_t k, double gamma,
                                std::span<const double> a, double scale,
                                std::size_t len);

// convenience: q(n) = e^{logw} k(n)  (offset 1, gamma 1, unit a)
TerminatingLaw make_terminating(const Law& law, double logw, std::size_t len);

// u_0..N for the defective law, u_m = sum_{k<=n<=m} q(n) u_{m-n}
std::vector<double> terminating_mass_renewal(const TerminatingLaw& t,
                                             std::size_t N);

// u_N (1-rho)^2 / q(N) -> 1; also reports (1-rho) sum_{n<=N} u_n -> 1
struct TerminatingCheck {
  double rho = 0.0;
  double pointwise_ratio = 0.0;
  double partial_sum_ratio = 0.0;
};
TerminatingCheck terminating_asymptotic_ratio(const TerminatingLaw& t,
                                              std::size_t N);

// inter-arrival sampler: inverse-CDF on the stored table, asymptotic tail
// inversion beyond it
class TauSampler {
 public:
  explicit TauSampler(const Law& law);
  std::uint64_t draw(Rng& rng) const;

 private:
  const Law* law_;
  std::vector<double> cum_;  // cum_[n] = P(tau <= n), n = 0..n_max
};

// contact epochs in [1, horizon] of one trajectory started at 0
std::vector<std::uint64_t> sample_contacts(const TauSampler& s, Rng& rng,
                                           std::uint64_t horizon);

// replica mean of |tau cap [1,N]| / N against both the table average
// (1/N) sum u_n (exact finite-N target) and 1/E(tau_1) (the limit; only
// finite for alpha > 1, reported as 0 with a warning otherwise)
struct ContactFractionCheck {
  MomentEstimate fraction{};
  double table_mean = 0.0;   // (1/N) sum_{n=1..N} u_n
  Interval limit{};          // 1/E(tau_1) bracket, or [0,0] for alpha <= 1
  bool limit_finite = false;
  bool table_consistent = false;  // |fraction - table_mean| <= 3 stderr
};
ContactFractionCheck contact_fraction_lln(const Law& law, std::size_t N,
                                          std::size_t replicas,
                                          std::uint64_t seed);

}  // namespace pinlab
