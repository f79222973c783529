#pragma once
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pinlab/certificate.hpp"

namespace pinlab {

enum class ScanCase { alpha_gt1, alpha_half_one, alpha_half };

std::string_view to_string(ScanCase c);

struct ScanOptions {
  ScanCase scase = ScanCase::alpha_gt1;
  double a_max = 1.0;
  double epsilon = 0.0;  // required by the two fractional-alpha cases
  int bisect_iters = 8;
  int max_halvings = 24;  // exponential search floor: a_max * 2^-24
  std::size_t k_cap = kDefaultKCap;
  ABackend backend = ABackend::holder;
  McOptions mc{};  // used by the mc backend only
};

// one scanned disorder strength: the largest certified shift found, or a
// zero record with diagnostics when nothing fired
struct ShiftScanRecord {
  double beta = 0.0;
  double h_c_ann = 0.0;
  double delta_certified = 0.0;
  double a_witness = 0.0;
  std::size_t k = 0;
  double gamma = 0.0;
  ABackend backend = ABackend::holder;
  CertConfidence confidence = CertConfidence::exact;
  double rho = 0.0;        // contraction bound at the witness
  bool capped = false;     // some probe needed a cutoff beyond the cap
  double required_k = 0.0; // the largest such demand
  std::string note;        // construction-side context for capped records
  RhoProfile diagnostic{}; // populated when nothing fired but probes ran
  bool has_diagnostic = false;
  std::uint64_t seed = 0;  // mc backend provenance
  std::size_t replicas = 0;
  double runtime_seconds = 0.0;  // in-memory diagnostic, never persisted
};

ShiftConstruction construct_for(ScanCase scase, const Law& law,
                                const DisorderLaw& d, double beta, double a,
                                double epsilon, std::size_t k_cap);

std::vector<ShiftScanRecord> shift_scan(const Law& law, const DisorderLaw& d,
                                        std::span<const double> beta_grid,
                                        const ScanOptions& opts);

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  std::size_t n_used = 0;
  std::string warning;  // set when fewer than 4 firing records back the fit
};

// log(shift) against log(beta); slope estimates the shift exponent
ExponentFit exponent_fit(std::span<const ShiftScanRecord> records);
// log(log(1/shift)) against log(1/beta); for exponentially small shifts,
// slope targets 1/(eta - 1/2 - epsilon)
ExponentFit exponent_fit_loglog(std::span<const ShiftScanRecord> records);

struct FeProfileRow {
  double h = 0.0;
  MomentEstimate quenched{};
  double annealed = 0.0;  // exact per-step value at the same horizon
  double gap = 0.0;       // annealed - quenched point estimate
};

std::vector<FeProfileRow> fe_profile(const Law& law, const DisorderLaw& d,
                                     double beta,
                                     std::span<const double> h_grid,
                                     std::size_t N, const McOptions& mc);

}  // namespace pinlab
