#pragma once
#include <cstdint>
#include <span>
#include <string_view>

#include "pinlab/rng.hpp"

namespace pinlab {

enum class DisorderKind { gaussian, rademacher };

std::string_view disorder_name(DisorderKind k);

// IID environment with unit variance and mean zero; everything the tilt and
// moment machinery needs is expressed through the log moment generating
// function log M(t) = log E e^{t omega}.
struct DisorderLaw {
  DisorderKind kind = DisorderKind::gaussian;

  double log_mgf(double t) const;
  double log_mgf_d2(double t) const;  // (log M)''(t)
  // annealed critical shift: h at which the annealed model turns localized
  double h_c_ann(double beta) const { return -log_mgf(beta); }

  // E[(e^{h + beta omega})^g] = e^{g h} M(g beta)
  double log_weight_moment(double beta, double h, double g) const {
    return g * h + log_mgf(g * beta);
  }
  double weight_moment(double beta, double h, double g) const;

  // effective pure pinning strength after tilting the environment by -lam:
  // h + log M(beta - lam) - log M(-lam)
  double tilted_h(double beta, double h, double lam) const {
    return h + log_mgf(beta - lam) - log_mgf(-lam);
  }

  // per-step log factor of the interpolation bound:
  //   gamma log M(-lam) + (1-gamma) log M(lam gamma/(1-gamma))
  // `relaxed` replaces it by the curvature bound c gamma lam^2/(1-gamma),
  // c = max (log M)''/2 on [-1,1], which dominates the exact product.
  double holder_log_factor(double lam, double gamma, bool relaxed = false) const;

  // largest admissible tilt for a given gamma: min(1, (1-gamma)/gamma)
  static double lambda_cap(double gamma) {
    return gamma < 0.5 ? 1.0 : (1.0 - gamma) / gamma;
  }

  // grid minimum of (log M)'' over [-b0, b0] (step 1e-3); lower bound used by
  // the second-moment style estimates
  double curvature_min(double b0) const;
  // grid maximum of (log M)''/2 over [-1, 1]
  double curvature_half_max() const;

  // slack of M(beta-lam)/(M(beta)M(-lam)) <= e^{-C3 beta lam} on
  // 0 < lam <= beta <= b0, with C3 = min (log M)'' over [-b0, b0];
  // nonnegative by convexity, zero identically for the gaussian
  double mgf_ratio_margin(double beta, double lam, double b0) const;

  void sample(std::span<double> out, Rng& rng) const;
  // environment with the first `tilt_n` variables biased by -lam (the
  // measure-change experiment): gaussian -> mean -lam, rademacher ->
  // P(+1) = e^{-lam}/(2 cosh lam)
  void sample_tilted(std::span<double> out, std::size_t tilt_n, double lam,
                     Rng& rng) const;
};

}  // namespace pinlab
