#include "pinlab/quenched.hpp"

#include <cmath>
#include <stdexcept>

#include "pinlab/homogeneous.hpp"
#include "pinlab/parallel.hpp"

namespace pinlab {

std::vector<double> make_env(const DisorderLaw& d, std::size_t len,
                             std::uint64_t seed, std::uint64_t stream) {
  std::vector<double> w(len);
  Rng rng(seed, stream);
  d.sample(w, rng);
  return w;
}

double quenched_log_partition(const Law& law, const DisorderLaw& d, double beta,
                              double h, std::span<const double> omega,
                              DpMode mode) {
  (void)d;
  const std::size_t N = omega.size();
  std::vector<double> lz(N + 1);
  lz[0] = 0.0;
  for (std::size_t m = 1; m <= N; ++m) lz[m] = h + beta * omega[m - 1];
  return pin_dp(law, lz, mode)[N];
}

namespace {

template <class PerReplica>
MomentEstimate replica_mean(std::size_t replicas, unsigned workers,
                            PerReplica&& f) {
  if (replicas == 0)
    throw std::invalid_argument("replica_mean: need at least one replica");
  std::vector<double> slot(replicas);
  parallel_for(replicas, workers, [&](std::size_t r) { slot[r] = f(r); });
  return mean_and_stderr(slot);
}

}  // namespace

MomentEstimate quenched_free_energy_mc(const Law& law, const DisorderLaw& d,
                                       double beta, double h, std::size_t N,
                                       const McOptions& opts) {
  if (opts.replicas == 0)
    throw std::invalid_argument("replica_mean: need at least one replica");
  if (beta == 0.0) {  // every replica is the pure value; no spread
    std::vector<double> none(N, 0.0);
    double v = quenched_log_partition(law, d, 0.0, h, none, opts.mode);
    return {v / (double)N, 0.0, opts.replicas, 0.99};
  }
  return replica_mean(opts.replicas, opts.workers, [&](std::size_t r) {
    std::vector<double> w = make_env(d, N, opts.seed, r);
    return quenched_log_partition(law, d, beta, h, w, opts.mode) / (double)N;
  });
}

MomentEstimate fractional_moment_mc(const Law& law, const DisorderLaw& d,
                                    double beta, double h, double gamma,
                                    std::size_t N, const McOptions& opts) {
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::invalid_argument("fractional_moment_mc: gamma in (0,1]");
  if (opts.replicas == 0)
    throw std::invalid_argument("replica_mean: need at least one replica");
  if (beta == 0.0) {
    std::vector<double> none(N, 0.0);
    double v = std::exp(
        gamma * quenched_log_partition(law, d, 0.0, h, none, opts.mode));
    return {v, 0.0, opts.replicas, 0.99};
  }
  return replica_mean(opts.replicas, opts.workers, [&](std::size_t r) {
    std::vector<double> w = make_env(d, N, opts.seed, r);
    return std::exp(gamma *
                    quenched_log_partition(law, d, beta, h, w, opts.mode));
  });
}

namespace {

// sum f(omega) 2^{-N} over all sign vectors; N <= 20
template <class F>
double rademacher_average(std::size_t N, F&& f) {
  if (N > 20)
    throw std::invalid_argument("exact enumeration capped at N = 20");
  std::vector<double> w(N);
  KahanSum acc;
  const std::uint64_t total = 1ULL << N;
  for (std::uint64_t code = 0; code < total; ++code) {
    for (std::size_t i = 0; i < N; ++i)
      w[i] = (code >> i) & 1 ? 1.0 : -1.0;
    acc.add(f(w));
  }
  return acc.value() / (double)total;
}

}  // namespace

double fractional_moment_exact(const Law& law, const DisorderLaw& d,
                               double beta, double h, double gamma,
                               std::size_t N) {
  if (d.kind != DisorderKind::rademacher)
    throw std::invalid_argument("exact moments need rademacher disorder");
  if (N == 0) return 1.0;
  return rademacher_average(N, [&](std::span<const double> w) {
    return std::exp(gamma * quenched_log_partition(law, d, beta, h, w,
                                                   DpMode::logspace));
  });
}

double annealed_mean_exact(const Law& law, const DisorderLaw& d, double beta,
                           double h, std::size_t N) {
  return fractional_moment_exact(law, d, beta, h, 1.0, N);
}

double annealed_log_partition(const Law& law, const DisorderLaw& d, double beta,
                              double h, std::size_t N) {
  return pure_log_partition(law, h + d.log_mgf(beta), N);
}

CompositionCheck composition_check(const Law& law, const DisorderLaw& d,
                                   double beta, double h, double gamma,
                                   std::size_t N, std::size_t k) {
  if (k < 1 || N < k)
    throw std::invalid_argument("composition_check: need 1 <= k <= N");
  std::vector<double> A(N + 1);
  A[0] = 1.0;
  for (std::size_t m = 1; m <= N; ++m)
    A[m] = fractional_moment_exact(law, d, beta, h, gamma, m);
  const double ez = std::exp(d.log_weight_moment(beta, h, gamma));
  KahanSum rhs;
  for (std::size_t n = k; n <= N; ++n) {
    KahanSum inner;
    for (std::size_t j = 0; j < k; ++j)
      inner.add(std::pow(law.k(n - j), gamma) * A[j]);
    rhs.add(A[N - n] * inner.value());
  }
  CompositionCheck c;
  c.lhs = A[N];
  c.rhs = ez * rhs.value();
  double scale = std::max(c.lhs, c.rhs);
  c.rel_gap = scale > 0 ? (c.rhs - c.lhs) / scale : 0.0;
  c.holds = c.lhs <= c.rhs * (1.0 + 1e-12) + 1e-300;
  return c;
}

AnnealedCheck annealed_identity_check(const Law& law, const DisorderLaw& d,
                                      double beta, double h, std::size_t N,
                                      const McOptions& opts) {
  AnnealedCheck c;
  if (beta == 0.0) {  // Z_{N,omega} is the pure partition, deterministically
    double v = std::exp(annealed_log_partition(law, d, 0.0, h, N));
    c.mc = {v, 0.0, opts.replicas, 0.99};
  } else {
    c.mc = replica_mean(opts.replicas, opts.workers, [&](std::size_t r) {
      std::vector<double> w = make_env(d, N, opts.seed, r);
      return std::exp(quenched_log_partition(law, d, beta, h, w, opts.mode));
    });
  }
  c.exact = std::exp(annealed_log_partition(law, d, beta, h, N));
  c.margin = 3.0 * c.mc.stderr_ - std::fabs(c.mc.point - c.exact);
  c.pass = c.margin >= 0.0;
  return c;
}

}  // namespace pinlab
