#include "pinlab/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pinlab/errors.hpp"
#include "pinlab/homogeneous.hpp"
#include "pinlab/stats.hpp"

namespace pinlab {

std::string_view to_string(CertStatus s) {
  return s == CertStatus::certified_delocalized ? "certified_delocalized"
                                                : "inconclusive";
}
std::string_view to_string(CertConfidence c) {
  return c == CertConfidence::exact ? "exact" : "statistical";
}
std::string_view to_string(ABackend b) {
  switch (b) {
    case ABackend::exact: return "exact";
    case ABackend::holder: return "holder";
    case ABackend::mc: return "mc";
  }
  return "?";
}
std::string_view to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::zero: return "zero";
    case ScheduleKind::inv_sqrt: return "inv_sqrt";
    case ScheduleKind::inv_sqrt_jlogj: return "inv_sqrt_jlogj";
    case ScheduleKind::explicit_values: return "explicit";
  }
  return "?";
}

double LambdaSchedule::at(std::size_t j) const {
  switch (kind) {
    case ScheduleKind::zero:
      return 0.0;
    case ScheduleKind::inv_sqrt:
      return j >= 1 ? 1.0 / std::sqrt((double)j) : 0.0;
    case ScheduleKind::inv_sqrt_jlogj:
      return j >= 2 ? 1.0 / std::sqrt((double)j * std::log((double)j)) : 0.0;
    case ScheduleKind::explicit_values:
      if (j >= values.size())
        throw std::out_of_range("lambda schedule has no entry for this j");
      return values[j];
  }
  throw std::logic_error("lambda schedule: bad kind");
}

GammaTailTable::GammaTailTable(const Law& law, double gamma, std::size_t m_max)
    : gamma_(gamma) {
  if (m_max < 1)
    throw std::invalid_argument("gamma tail table: m_max must be >= 1");
  if (!((1.0 + law.alpha()) * gamma > 1.0))
    throw std::invalid_argument(
        "gamma tail table: (1+alpha)*gamma <= 1, power tail diverges");
  if (m_max > law.n_max())
    throw std::invalid_argument("gamma tail table: m_max exceeds law table");
  t_.assign(m_max + 1, 0.0);
  // certified remainder past the stored table, then a backward exact pass
  double beyond = law.tail_power_sum(law.n_max() + 1, gamma).hi;
  KahanSum acc;
  acc.add(beyond);
  std::span<const double> lk = law.log_table();
  for (std::size_t n = law.n_max(); n >= 1; --n) {
    acc.add(std::exp(gamma * lk[n]));
    if (n <= m_max) t_[n] = acc.value() * (1.0 + 1e-11);  // rounding slack
  }
}

double GammaTailTable::upper(std::size_t m) const {
  if (m < 1 || m >= t_.size())
    throw std::out_of_range("gamma tail table: m outside [1, m_max]");
  return t_[m];
}

CertificateResult rho_upper(const Law& law, const DisorderLaw& d, double beta,
                            double h, const CertificateParams& params) {
  const std::size_t k = params.k;
  const double g = params.gamma;
  if (k < 1) throw std::invalid_argument("certificate: k must be >= 1");
  if (!(g > 0.0 && g < 1.0))
    throw std::invalid_argument("certificate: gamma must lie in (0,1)");
  if (!((1.0 + law.alpha()) * g > 1.0))
    throw std::invalid_argument(
        "certificate: (1+alpha)*gamma <= 1, contraction sum diverges");
  if (params.a_bounds.size() != k)
    throw std::invalid_argument("certificate: need one moment bound per j < k");
  if (params.a_bounds[0].log_value != 0.0)
    throw std::invalid_argument("certificate: the j = 0 bound must equal 1");
  for (const ABound& b : params.a_bounds)
    if (std::isnan(b.log_value))
      throw std::invalid_argument("certificate: moment bound is NaN");

  GammaTailTable tails(law, g, k);
  CertificateResult res;
  res.weight_moment = d.weight_moment(beta, h, g);
  res.per_j.resize(k);
  KahanSum s;
  bool statistical = false;
  for (std::size_t j = 0; j < k; ++j) {
    const ABound& b = params.a_bounds[j];
    res.per_j[j] =
        res.weight_moment * std::exp(b.log_value) * tails.upper(k - j);
    s.add(res.per_j[j]);
    if (b.provenance == BoundProvenance::mc_upper_ci) statistical = true;
  }
  res.rho_upper = s.value();
  res.status = res.rho_upper <= 1.0 ? CertStatus::certified_delocalized
                                    : CertStatus::inconclusive;
  res.confidence =
      statistical ? CertConfidence::statistical : CertConfidence::exact;
  res.confidence_level = statistical ? 0.99 : 1.0;
  return res;
}

double holder_tilt_log_bound(const Law& law, const DisorderLaw& d, double beta,
                             double h, double gamma, double lam, std::size_t N,
                             bool relaxed) {
  if (N == 0) return 0.0;
  // admissibility is enforced inside the per-step factor
  double fac = d.holder_log_factor(lam, gamma, relaxed);
  double lz = pure_log_partition(law, d.tilted_h(beta, h, lam), N);
  return gamma * lz + (double)N * fac;
}

std::vector<ABound> build_A_bounds(const Law& law, const DisorderLaw& d,
                                   double beta, double h, double gamma,
                                   std::size_t k, ABackend backend,
                                   const LambdaSchedule& schedule,
                                   const McOptions& mc) {
  if (k < 1) throw std::invalid_argument("A bounds: k must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("A bounds: gamma must lie in (0,1)");
  std::vector<ABound> out(k);
  out[0] = {0.0, BoundProvenance::exact, 0.0};
  if (k == 1) return out;

  switch (backend) {
    case ABackend::exact: {
      if (d.kind != DisorderKind::rademacher)
        throw std::invalid_argument(
            "A bounds: exact backend needs sign disorder");
      if (k - 1 > 20)
        throw ResourceCapError("A bounds: exact backend capped at j <= 20",
                               (double)(k - 1));
      for (std::size_t j = 1; j < k; ++j)
        out[j] = {std::log(fractional_moment_exact(law, d, beta, h, gamma, j)),
                  BoundProvenance::exact, 0.0};
      return out;
    }
    case ABackend::mc: {
      if (mc.replicas < 2)
        throw std::invalid_argument("A bounds: mc backend needs replicas >= 2");
      for (std::size_t j = 1; j < k; ++j) {
        MomentEstimate e =
            fractional_moment_mc(law, d, beta, h, gamma, j, mc);
        out[j] = {std::log(e.upper()), BoundProvenance::mc_upper_ci, 0.0};
      }
      return out;
    }
    case ABackend::holder:
      break;
  }

  // deterministic backend: untilted (annealed) bound everywhere, improved
  // by tilted bounds where the schedule admits one
  const double cap = DisorderLaw::lambda_cap(gamma);
  std::vector<double> ann =
      pure_log_partition_curve(law, h + d.log_mgf(beta), k - 1);
  for (std::size_t j = 1; j < k; ++j)
    out[j] = {gamma * ann[j], BoundProvenance::holder_deterministic, 0.0};
  if (schedule.kind == ScheduleKind::zero) return out;

  if (schedule.kind == ScheduleKind::explicit_values) {
    if (schedule.values.size() < k)
      throw std::invalid_argument("A bounds: schedule shorter than k");
    for (std::size_t j = 1; j < k; ++j) {
      double lam = schedule.values[j];
      if (!(std::fabs(lam) <= cap + 1e-12))
        throw std::invalid_argument(
            "A bounds: schedule tilt outside admissible range at j = " +
            std::to_string(j));
      if (lam == 0.0) continue;
      double lb = holder_tilt_log_bound(law, d, beta, h, gamma, lam, j);
      if (lb < out[j].log_value)
        out[j] = {lb, BoundProvenance::holder_deterministic, lam};
    }
    return out;
  }

  // built-in schedules: geometric blocks share one tilt (one DP per block);
  // any admissible tilt upper-bounds every j, so blocking costs tightness
  // only, never validity
  std::size_t b0 = 1;
  while (b0 <= k - 1) {
    std::size_t b1 = std::min(k - 1, std::max(b0, b0 * 13 / 10));
    std::size_t jm = (std::size_t)std::sqrt((double)b0 * (double)b1);
    double lam = schedule.at(jm);
    if (lam > 0.0 && lam <= cap + 1e-12) {
      double fac = d.holder_log_factor(lam, gamma);
      std::vector<double> curve =
          pure_log_partition_curve(law, d.tilted_h(beta, h, lam), b1);
      for (std::size_t j = b0; j <= b1; ++j) {
        double lb = gamma * curve[j] + (double)j * fac;
        if (lb < out[j].log_value)
          out[j] = {lb, BoundProvenance::holder_deterministic, lam};
      }
    }
    b0 = b1 + 1;
  }
  return out;
}

DecayCheck moment_decay_check(const Law& law, const DisorderLaw& d, double beta,
                              double h, double gamma,
                              std::span<const std::size_t> n_grid,
                              const McOptions& mc) {
  if (n_grid.size() < 3)
    throw std::invalid_argument("decay check: need at least 3 grid points");
  DecayCheck c;
  c.n.assign(n_grid.begin(), n_grid.end());
  c.ratio.resize(c.n.size());
  std::vector<double> lx(c.n.size()), ly(c.n.size());
  for (std::size_t i = 0; i < c.n.size(); ++i) {
    std::size_t N = c.n[i];
    double a_n;
    if (beta == 0.0) {
      a_n = std::exp(gamma * pure_log_partition(law, h, N));
    } else if (d.kind == DisorderKind::rademacher && N <= 20) {
      a_n = fractional_moment_exact(law, d, beta, h, gamma, N);
    } else {
      a_n = fractional_moment_mc(law, d, beta, h, gamma, N, mc).point;
    }
    c.ratio[i] = a_n / std::exp(gamma * law.log_k(N));
    c.c_fit = std::max(c.c_fit, c.ratio[i]);
    lx[i] = std::log((double)N);
    ly[i] = std::log(c.ratio[i]);
  }
  LineFit f = fit_line(lx, ly);
  c.slope = f.slope;
  c.slope_se = f.slope_stderr;
  c.upward = (c.slope - 2.0 * c.slope_se) > 0.05;
  return c;
}

namespace {

struct GammaPick {
  double gamma = 0.0;
  double margin = 0.0;
  double step = 0.0;
  bool ok = false;
};

// smallest grid value above the margined constraint, preferring the coarse
// grid and the wide margin; refines deterministically when the standard
// (0.01, 0.05) choice leaves no room below 1
template <class LowerBound>
GammaPick pick_gamma(LowerBound&& lb) {
  const double lb0 = lb(0.0);
  for (double step : {1e-2, 1e-3, 1e-4, 1e-5}) {
    for (double m : {0.05, 0.02, 0.01, 5e-3, 2e-3, 1e-3, 5e-4, 2e-4, 1e-4,
                     0.0}) {
      double lo = lb(m);
      if (!(lo < 1.0)) continue;
      double g = std::ceil(lo / step - 1e-9) * step;
      g = std::round(g / step) * step;  // settle fp dust on the grid
      if (g <= lb0) g += step;
      if (g < 1.0 - 1e-12) return {g, m, step, true};
    }
  }
  return {};
}

std::string refine_note(const GammaPick& p) {
  if (p.margin == 0.05 && p.step == 1e-2) return {};
  return "gamma grid refined to step " + std::to_string(p.step) +
         ", margin " + std::to_string(p.margin) +
         " (standard 0.01/0.05 grid has no admissible value below 1)";
}

}  // namespace

ShiftConstruction construct_alpha_gt1(const Law& law, const DisorderLaw& d,
                                      double beta, double a,
                                      std::size_t k_cap) {
  if (!(law.alpha() > 1.0))
    throw std::invalid_argument("gt1 construction: needs alpha > 1");
  if (!(beta > 0.0) || !(a > 0.0))
    throw std::invalid_argument("gt1 construction: beta and a must be > 0");
  ShiftConstruction c;
  c.a = a;
  c.delta = a * beta * beta;
  c.h = d.h_c_ann(beta) + c.delta;
  c.constraint1 = 2.0 / (1.0 + law.alpha());
  GammaPick p =
      pick_gamma([&](double m) { return (2.0 + m) / (1.0 + law.alpha()); });
  if (!p.ok) {
    c.cap_bound = true;  // no amplitude fixes this
    c.note = "no admissible gamma < 1 for this alpha";
    return c;
  }
  c.params.gamma = p.gamma;
  c.params.schedule = LambdaSchedule::inv_sqrt();
  c.params.backend = ABackend::holder;
  double kd = std::ceil(1.0 / c.delta);
  if (kd > (double)k_cap) {
    c.required_k = kd;
    c.cap_bound = true;
    c.note = "cutoff 1/(a*beta^2) = " + std::to_string(kd) +
             " exceeds the cap " + std::to_string(k_cap) +
             "; increase a to at least " +
             std::to_string(1.0 / ((double)k_cap * beta * beta));
    return c;
  }
  c.params.k = (std::size_t)kd;
  c.feasible = true;
  c.note = refine_note(p);
  return c;
}

ShiftConstruction construct_alpha_half_one(const Law& law,
                                           const DisorderLaw& d, double beta,
                                           double a, double epsilon,
                                           std::size_t k_cap) {
  const double al = law.alpha();
  if (!(al > 0.5 && al < 1.0))
    throw std::invalid_argument("mid-range construction: needs alpha in (1/2,1)");
  if (!(beta > 0.0) || !(a > 0.0) || !(epsilon > 0.0))
    throw std::invalid_argument(
        "mid-range construction: beta, a, epsilon must be > 0");
  ShiftConstruction c;
  c.a = a;
  c.epsilon = epsilon;
  const double expnt = 2.0 * al / (2.0 * al - 1.0) * (1.0 + epsilon);
  c.delta = a * std::pow(beta, expnt);
  c.h = d.h_c_ann(beta) + c.delta;
  const double e2 = epsilon * epsilon;
  const double brace1 =
      (1.0 + al) + (1.0 - e2) * ((1.0 - al) + 0.5 * epsilon * (al - 0.5));
  const double brace2 = (1.0 + al) + (1.0 - e2) * (1.0 - al);
  c.constraint1 = 2.0 / brace1;
  c.constraint2 = (2.0 - e2) / brace2;
  GammaPick p = pick_gamma([&](double m) {
    return std::max((2.0 + m) / brace1, (2.0 - e2 + m) / brace2);
  });
  if (!p.ok)
    throw std::invalid_argument(
        "mid-range construction: no admissible gamma < 1; constraints demand "
        "gamma > " +
        std::to_string(c.constraint1) + " and gamma > " +
        std::to_string(c.constraint2));
  c.params.gamma = p.gamma;
  c.params.schedule = LambdaSchedule::inv_sqrt();
  c.params.backend = ABackend::holder;
  // the 1/sqrt(j) tilts must stay admissible from j = k^{1-eps^2} onward,
  // which pins the cutoff at or above (gamma/(1-gamma))^{2/(1-eps^2)}
  const double g = p.gamma;
  const double adm_floor =
      std::ceil(std::pow(g / (1.0 - g), 2.0 / (1.0 - e2)));
  double f = pure_free_energy(law, c.delta).f;
  double kd = f > 0.0 ? std::ceil(1.0 / f)
                      : std::numeric_limits<double>::infinity();
  if (adm_floor > (double)k_cap) {
    c.required_k = std::max(kd, adm_floor);
    c.cap_bound = true;
    c.note = "tilt admissibility for gamma = " + std::to_string(g) +
             " demands cutoff >= " + std::to_string(adm_floor) + " > cap " +
             std::to_string(k_cap) + "; no amplitude fixes this";
    return c;
  }
  if (!(kd <= (double)k_cap)) {
    c.required_k = kd;
    c.cap_bound = true;
    c.note = "correlation length demands cutoff " + std::to_string(kd) +
             " > cap " + std::to_string(k_cap);
    return c;
  }
  if (kd < adm_floor) {
    c.required_k = adm_floor;
    c.note = "amplitude too large: correlation length " + std::to_string(kd) +
             " sits below the tilt-admissibility floor " +
             std::to_string(adm_floor);
    return c;
  }
  c.params.k = (std::size_t)kd;
  c.feasible = true;
  c.note = refine_note(p);
  return c;
}

ShiftConstruction construct_alpha_half(const Law& law, const DisorderLaw& d,
                                       double beta, double a, double epsilon,
                                       std::size_t k_cap) {
  if (std::fabs(law.alpha() - 0.5) > 1e-9)
    throw std::invalid_argument("half construction: needs alpha = 1/2");
  if (law.spec().slow.kind != SlowKind::log_power)
    throw std::invalid_argument(
        "half construction: needs a logarithmic slow factor");
  const double eta = -law.spec().slow.b;
  if (!(eta > 0.5))
    throw std::invalid_argument(
        "half construction: slow exponent must be -eta with eta > 1/2");
  if (!(epsilon > 0.0 && epsilon < eta - 0.5))
    throw std::invalid_argument(
        "half construction: epsilon outside (0, eta - 1/2)");
  if (!(beta > 0.0) || !(a > 0.0))
    throw std::invalid_argument("half construction: beta and a must be > 0");
  ShiftConstruction c;
  c.a = a;
  c.epsilon = epsilon;
  c.eta = eta;
  c.delta = a * std::exp(-std::pow(beta, -1.0 / (eta - 0.5 - epsilon)));
  c.h = d.h_c_ann(beta) + c.delta;
  double f = pure_free_energy(law, c.delta).f;
  double kd = f > 0.0 ? std::ceil(1.0 / f)
                      : std::numeric_limits<double>::infinity();
  if (!(kd <= (double)k_cap)) {
    c.required_k = kd;
    c.cap_bound = true;
    c.note = "correlation length demands cutoff " +
             (std::isfinite(kd) ? std::to_string(kd) : std::string("inf")) +
             " > cap " + std::to_string(k_cap);
    return c;
  }
  std::size_t k = (std::size_t)kd;
  double gamma = 1.0 - 1.0 / std::log((double)k);
  if (!(k >= 3) || !((1.0 + law.alpha()) * gamma > 1.0)) {
    c.required_k = kd;
    c.note = "amplitude too large: cutoff " + std::to_string(kd) +
             " cannot carry the log-tied gamma";
    return c;
  }
  c.params.k = k;
  c.params.gamma = gamma;
  c.params.schedule = LambdaSchedule::inv_sqrt_jlogj();
  c.params.backend = ABackend::holder;
  c.feasible = true;
  double thr = gamma / (1.0 - gamma);
  c.note = "tilt active where j*log(j) >= " + std::to_string(thr * thr);
  return c;
}

void require_feasible(const ShiftConstruction& c) {
  if (!c.feasible)
    throw ResourceCapError(
        c.note.empty() ? "construction infeasible" : c.note, c.required_k);
}

RhoProfile rho_profile(const Law& law, const DisorderLaw& d, double beta,
                       double h, const CertificateParams& params,
                       std::size_t boundary_width) {
  CertificateResult r = rho_upper(law, d, beta, h, params);
  RhoProfile p;
  p.addends = std::move(r.per_j);
  p.rho = r.rho_upper;
  p.split_j = params.k > boundary_width ? params.k - boundary_width : 0;
  KahanSum far, near;
  for (std::size_t j = 0; j < p.addends.size(); ++j)
    (j < p.split_j ? far : near).add(p.addends[j]);
  p.far_sum = far.value();
  p.near_sum = near.value();
  return p;
}

}  // namespace pinlab
