#pragma once
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pinlab/disorder.hpp"
#include "pinlab/kernels.hpp"
#include "pinlab/quenched.hpp"

namespace pinlab {

// where a per-j moment bound comes from; only mc bounds carry statistical
// uncertainty
enum class BoundProvenance { exact, holder_deterministic, mc_upper_ci };

enum class ABackend { exact, holder, mc };

enum class ScheduleKind { zero, inv_sqrt, inv_sqrt_jlogj, explicit_values };

// tilt strength per index j; the built-in kinds fall back to an untilted
// (annealed) bound wherever the formula value is outside the admissible
// range, explicit values are rejected instead
struct LambdaSchedule {
  ScheduleKind kind = ScheduleKind::zero;
  std::vector<double> values;  // explicit_values only, one entry per j

  double at(std::size_t j) const;
  static LambdaSchedule zero() { return {}; }
  static LambdaSchedule inv_sqrt() {
    return {ScheduleKind::inv_sqrt, {}};
  }
  static LambdaSchedule inv_sqrt_jlogj() {
    return {ScheduleKind::inv_sqrt_jlogj, {}};
  }
  static LambdaSchedule explicit_list(std::vector<double> v) {
    return {ScheduleKind::explicit_values, std::move(v)};
  }
};

struct ABound {
  double log_value = 0.0;  // log of an upper bound on the j-th moment
  BoundProvenance provenance = BoundProvenance::exact;
  double lambda = 0.0;     // tilt that produced it (0 = annealed)
};

struct CertificateParams {
  std::size_t k = 1;
  double gamma = 0.5;
  std::vector<ABound> a_bounds;  // j = 0..k-1; a_bounds[0] = 1 exactly
  LambdaSchedule schedule{};
  ABackend backend = ABackend::holder;
  std::uint64_t seed = 0;        // mc backend provenance
  std::size_t replicas = 0;
};

enum class CertStatus { certified_delocalized, inconclusive };
enum class CertConfidence { exact, statistical };

std::string_view to_string(CertStatus s);
std::string_view to_string(CertConfidence c);
std::string_view to_string(ABackend b);
std::string_view to_string(ScheduleKind k);

struct CertificateResult {
  double rho_upper = 0.0;  // certified upper bound on the contraction mass
  CertStatus status = CertStatus::inconclusive;
  CertConfidence confidence = CertConfidence::exact;
  double confidence_level = 1.0;  // per-bound CI level when statistical
  double weight_moment = 0.0;     // E (z_1)^gamma
  std::vector<double> per_j;      // nonnegative addends, summing to rho_upper
};

// suffix sums of the gamma-th power of the inter-arrival law:
// upper(m) >= sum_{i >= m} k(i)^gamma, certified, m = 1..m_max
class GammaTailTable {
 public:
  GammaTailTable(const Law& law, double gamma, std::size_t m_max);
  double upper(std::size_t m) const;
  double gamma() const { return gamma_; }

 private:
  double gamma_;
  std::vector<double> t_;
};

// the contraction bound: rho = E[z^gamma] sum_{j<k} A_j T(k-j) with per-j
// upper bounds A_j and certified gamma-power tails T; rho <= 1 certifies
// zero free energy at (beta, h)
CertificateResult rho_upper(const Law& law, const DisorderLaw& d, double beta,
                            double h, const CertificateParams& params);

// deterministic log upper bound on the gamma-th moment of Z_{N,omega} by
// tilting the environment: gamma log Z_N(h_eff) + N * per-step factor.
// lam = 0 degenerates to the annealed (Jensen) bound; `relaxed` uses the
// quadratic curvature factor instead of the exact product
double holder_tilt_log_bound(const Law& law, const DisorderLaw& d, double beta,
                             double h, double gamma, double lam, std::size_t N,
                             bool relaxed = false);

std::vector<ABound> build_A_bounds(const Law& law, const DisorderLaw& d,
                                   double beta, double h, double gamma,
                                   std::size_t k, ABackend backend,
                                   const LambdaSchedule& schedule,
                                   const McOptions& mc = {});

// decay-law diagnostic: A_N / k(N)^gamma on a grid, fitted constant and
// log-log trend; `upward` flags a statistically significant growth
struct DecayCheck {
  std::vector<std::size_t> n;
  std::vector<double> ratio;
  double c_fit = 0.0;
  double slope = 0.0;
  double slope_se = 0.0;
  bool upward = false;
};
DecayCheck moment_decay_check(const Law& law, const DisorderLaw& d, double beta,
                              double h, double gamma,
                              std::span<const std::size_t> n_grid,
                              const McOptions& mc);

// shift-amplitude parameter sets for the three alpha regimes; `feasible`
// is false when the cutoff the construction demands exceeds the resource
// cap (required_k records what it would need)
struct ShiftConstruction {
  bool feasible = false;
  // infeasible because the demanded cutoff exceeds the resource cap (and
  // shrinking the amplitude only raises the demand); false for the opposite
  // failure, an amplitude too large for a valid construction
  bool cap_bound = false;
  double h = 0.0;
  double delta = 0.0;
  double a = 0.0;
  double epsilon = 0.0;
  double eta = 0.0;
  CertificateParams params;     // k, gamma, schedule; bounds not yet built
  double required_k = 0.0;
  double constraint1 = 0.0;     // lower bounds the gamma grid had to clear
  double constraint2 = 0.0;
  std::string note;
};

inline constexpr std::size_t kDefaultKCap = 20000;

// alpha > 1: shift a*beta^2, cutoff ~ 1/shift, gamma from the summability
// constraint (1+alpha)*gamma > 2, inverse-sqrt tilt schedule
ShiftConstruction construct_alpha_gt1(const Law& law, const DisorderLaw& d,
                                      double beta, double a,
                                      std::size_t k_cap = kDefaultKCap);

// alpha in (1/2,1): shift a*beta^{(2a/(2a-1))(1+eps)}, cutoff from the
// correlation length, gamma from the two epsilon-dependent constraints
ShiftConstruction construct_alpha_half_one(const Law& law,
                                           const DisorderLaw& d, double beta,
                                           double a, double epsilon,
                                           std::size_t k_cap = kDefaultKCap);

// alpha = 1/2 with logarithmic slow factor (log(1+n))^{-eta}:
// shift a*exp(-beta^{-1/(eta-1/2-eps)}), gamma = 1 - 1/log(cutoff),
// (j log j)^{-1/2} tilt schedule
ShiftConstruction construct_alpha_half(const Law& law, const DisorderLaw& d,
                                       double beta, double a, double epsilon,
                                       std::size_t k_cap = kDefaultKCap);

// throws when the construction hit the resource cap
void require_feasible(const ShiftConstruction& c);

// per-j decomposition of rho with a near-boundary split, for diagnosing
// which index range blocks certification
struct RhoProfile {
  std::vector<double> addends;
  double rho = 0.0;
  std::size_t split_j = 0;   // first index of the near-boundary block
  double far_sum = 0.0;      // j < split_j
  double near_sum = 0.0;     // j >= split_j
};
RhoProfile rho_profile(const Law& law, const DisorderLaw& d, double beta,
                       double h, const CertificateParams& params,
                       std::size_t boundary_width = 8);

}  // namespace pinlab
