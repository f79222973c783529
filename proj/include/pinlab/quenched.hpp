#pragma once
#include <cstdint>
#include <span>
#include <vector>

#include "pinlab/disorder.hpp"
#include "pinlab/dp.hpp"
#include "pinlab/stats.hpp"

namespace pinlab {

// environment omega_1..len for one replica; replica r of a run always draws
// from substream r of the master seed, so results are independent of worker
// count and replay bit-identically
std::vector<double> make_env(const DisorderLaw& d, std::size_t len,
                             std::uint64_t seed, std::uint64_t stream);

// log Z_{N,omega} with z_m = e^{h + beta omega_m}; omega is omega_1..N
double quenched_log_partition(const Law& law, const DisorderLaw& d, double beta,
                              double h, std::span<const double> omega,
                              DpMode mode = DpMode::auto_select);

struct McOptions {
  std::size_t replicas = 200;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  DpMode mode = DpMode::auto_select;
};

// (1/N) E log Z_{N,omega} by replica average
MomentEstimate quenched_free_energy_mc(const Law& law, const DisorderLaw& d,
                                       double beta, double h, std::size_t N,
                                       const McOptions& opts);

// E[(Z_{N,omega})^gamma] by replica average
MomentEstimate fractional_moment_mc(const Law& law, const DisorderLaw& d,
                                    double beta, double h, double gamma,
                                    std::size_t N, const McOptions& opts);

// exact E[(Z_{N,omega})^gamma] for rademacher environments, by enumerating
// all 2^N sign vectors; N is capped at 20
double fractional_moment_exact(const Law& law, const DisorderLaw& d,
                               double beta, double h, double gamma,
                               std::size_t N);
// same enumeration at gamma = 1: the annealed mean E Z_{N,omega}
double annealed_mean_exact(const Law& law, const DisorderLaw& d, double beta,
                           double h, std::size_t N);

// log of the annealed partition function E Z_{N,omega} = Z_N(h + log M(beta))
double annealed_log_partition(const Law& law, const DisorderLaw& d, double beta,
                              double h, std::size_t N);

// the composition identity behind the moment bound, checked on exact
// rademacher moments:  at gamma = 1 it is an identity, at gamma < 1 an
// upper bound
struct CompositionCheck {
  double lhs = 0.0;       // A_N
  double rhs = 0.0;       // E[z^g] sum_{n=k}^N A_{N-n} sum_{j<k} k(n-j)^g A_j
  double rel_gap = 0.0;   // (rhs - lhs)/max(lhs, rhs)
  bool holds = false;     // lhs <= rhs up to fp slack
};
CompositionCheck composition_check(const Law& law, const DisorderLaw& d,
                                   double beta, double h, double gamma,
                                   std::size_t N, std::size_t k);

// MC mean of Z_{N,omega} against the closed form Z_N(h + log M(beta))
struct AnnealedCheck {
  MomentEstimate mc{};     // replica mean of Z (linear scale)
  double exact = 0.0;      // Z_N(h + log M(beta))
  double margin = 0.0;     // 3 stderr - |mc - exact|, >= 0 means pass
  bool pass = false;
};
AnnealedCheck annealed_identity_check(const Law& law, const DisorderLaw& d,
                                      double beta, double h, std::size_t N,
                                      const McOptions& opts);

}  // namespace pinlab
