#include "pinlab/disorder.hpp"

#include <cmath>
#include <stdexcept>

namespace pinlab {

std::string_view disorder_name(DisorderKind k) {
  return k == DisorderKind::gaussian ? "gaussian" : "rademacher";
}

double DisorderLaw::log_mgf(double t) const {
  switch (kind) {
    case DisorderKind::gaussian:
      return 0.5 * t * t;
    case DisorderKind::rademacher: {
      // log cosh t, stable for large |t|
      double a = std::fabs(t);
      return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
    }
  }
  throw std::logic_error("log_mgf: bad kind");
}

double DisorderLaw::log_mgf_d2(double t) const {
  switch (kind) {
    case DisorderKind::gaussian:
      return 1.0;
    case DisorderKind::rademacher: {
      double c = std::cosh(t);
      return 1.0 / (c * c);
    }
  }
  throw std::logic_error("log_mgf_d2: bad kind");
}

double DisorderLaw::holder_log_factor(double lam, double gamma,
                                      bool relaxed) const {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("holder factor: gamma must lie in (0,1)");
  if (!(std::fabs(lam) <= lambda_cap(gamma) + 1e-12))
    throw std::invalid_argument("holder factor: lam outside admissible range");
  if (relaxed) {
    return curvature_half_max() * gamma * lam * lam / (1.0 - gamma);
  }
  return gamma * log_mgf(-lam) +
         (1.0 - gamma) * log_mgf(lam * gamma / (1.0 - gamma));
}

double DisorderLaw::weight_moment(double beta, double h, double g) const {
  return std::exp(log_weight_moment(beta, h, g));
}

double DisorderLaw::mgf_ratio_margin(double beta, double lam, double b0) const {
  if (!(lam > 0.0 && lam <= beta && beta <= b0))
    throw std::invalid_argument(
        "mgf_ratio_margin: need 0 < lam <= beta <= b0");
  const double c3 = curvature_min(b0);
  const double lhs = std::exp(log_mgf(beta - lam) - log_mgf(beta) -
                              log_mgf(-lam));
  return std::exp(-c3 * beta * lam) - lhs;
}

double DisorderLaw::curvature_min(double b0) const {
  double m = log_mgf_d2(0.0);
  for (double t = -b0; t <= b0 + 1e-12; t += 1e-3)
    m = std::min(m, log_mgf_d2(t));
  return m;
}

double DisorderLaw::curvature_half_max() const {
  double m = 0.0;
  for (double t = -1.0; t <= 1.0 + 1e-12; t += 1e-3)
    m = std::max(m, 0.5 * log_mgf_d2(t));
  return m;
}

void DisorderLaw::sample(std::span<double> out, Rng& rng) const {
  if (kind == DisorderKind::gaussian) {
    for (auto& x : out) x = rng.next_gaussian();
  } else {
    for (auto& x : out) x = rng.next_sign();
  }
}

void DisorderLaw::sample_tilted(std::span<double> out, std::size_t tilt_n,
                                double lam, Rng& rng) const {
  if (tilt_n > out.size())
    throw std::invalid_argument("sample_tilted: tilt_n exceeds span");
  if (kind == DisorderKind::gaussian) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = rng.next_gaussian();
      if (i < tilt_n) out[i] -= lam;
    }
  } else {
    // P(+1) = e^{-lam} / (2 cosh lam) under the tilt
    const double p_plus = std::exp(-lam) / (2.0 * std::cosh(lam));
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (i < tilt_n)
        out[i] = rng.next_uniform() < p_plus ? 1.0 : -1.0;
      else
        out[i] = rng.next_sign();
    }
  }
}

}  // namespace pinlab
