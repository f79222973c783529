#include "pinlab/scan.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "pinlab/homogeneous.hpp"
#include "pinlab/stats.hpp"

namespace pinlab {

std::string_view to_string(ScanCase c) {
  switch (c) {
    case ScanCase::alpha_gt1: return "alpha_gt1";
    case ScanCase::alpha_half_one: return "alpha_half_one";
    case ScanCase::alpha_half: return "alpha_half";
  }
  return "?";
}

ShiftConstruction construct_for(ScanCase scase, const Law& law,
                                const DisorderLaw& d, double beta, double a,
                                double epsilon, std::size_t k_cap) {
  switch (scase) {
    case ScanCase::alpha_gt1:
      return construct_alpha_gt1(law, d, beta, a, k_cap);
    case ScanCase::alpha_half_one:
      return construct_alpha_half_one(law, d, beta, a, epsilon, k_cap);
    case ScanCase::alpha_half:
      return construct_alpha_half(law, d, beta, a, epsilon, k_cap);
  }
  throw std::logic_error("construct_for: bad case");
}

namespace {

struct Probe {
  bool capped = false;
  bool fired = false;
  ShiftConstruction con{};
  CertificateParams params{};
  CertificateResult res{};
};

Probe run_probe(const Law& law, const DisorderLaw& d, double beta, double a,
                const ScanOptions& o) {
  Probe p;
  p.con = construct_for(o.scase, law, d, beta, a, o.epsilon, o.k_cap);
  if (!p.con.feasible) {
    p.capped = true;
    return p;
  }
  p.params = p.con.params;
  p.params.backend = o.backend;
  if (o.backend == ABackend::mc) {
    p.params.seed = o.mc.seed;
    p.params.replicas = o.mc.replicas;
  }
  p.params.a_bounds =
      build_A_bounds(law, d, beta, p.con.h, p.params.gamma, p.params.k,
                     o.backend, p.params.schedule, o.mc);
  p.res = rho_upper(law, d, beta, p.con.h, p.params);
  p.fired = p.res.status == CertStatus::certified_delocalized;
  return p;
}

}  // namespace

std::vector<ShiftScanRecord> shift_scan(const Law& law, const DisorderLaw& d,
                                        std::span<const double> beta_grid,
                                        const ScanOptions& opts) {
  if (beta_grid.empty())
    throw std::invalid_argument("shift scan: empty beta grid");
  if (!(opts.a_max > 0.0))
    throw std::invalid_argument("shift scan: a_max must be > 0");
  std::vector<ShiftScanRecord> out;
  out.reserve(beta_grid.size());
  for (double beta : beta_grid) {
    auto t0 = std::chrono::steady_clock::now();
    ShiftScanRecord rec;
    rec.beta = beta;
    rec.h_c_ann = d.h_c_ann(beta);
    rec.backend = opts.backend;
    if (opts.backend == ABackend::mc) {
      rec.seed = opts.mc.seed;
      rec.replicas = opts.mc.replicas;
    }

    // exponential descent until something fires or the cap cuts us off
    Probe fire{}, last_fail{};
    bool have_fail = false;
    double a_fire = 0.0, a_fail = 0.0;
    for (int i = 0; i <= opts.max_halvings; ++i) {
      double a = opts.a_max * std::pow(0.5, i);
      Probe p = run_probe(law, d, beta, a, opts);
      if (p.capped) {
        if (p.con.cap_bound) {
          rec.capped = true;
          rec.required_k = std::max(rec.required_k, p.con.required_k);
          rec.note = p.con.note;
          break;  // smaller a only demands a larger cutoff
        }
        continue;  // amplitude too large for a valid construction; halve on
      }
      if (p.fired) {
        fire = std::move(p);
        a_fire = a;
        break;
      }
      last_fail = std::move(p);
      have_fail = true;
      a_fail = a;
    }

    if (a_fire > 0.0 && a_fail > 0.0) {
      // push the witness up toward the smallest failing amplitude
      double lo = a_fire, hi = a_fail;
      for (int i = 0; i < opts.bisect_iters; ++i) {
        double mid = std::sqrt(lo * hi);
        Probe p = run_probe(law, d, beta, mid, opts);
        if (p.capped) break;
        if (p.fired) {
          fire = std::move(p);
          lo = mid;
        } else {
          hi = mid;
        }
      }
      a_fire = lo;
    }

    if (a_fire > 0.0) {
      rec.a_witness = a_fire;
      rec.delta_certified = fire.con.delta;
      rec.k = fire.params.k;
      rec.gamma = fire.params.gamma;
      rec.rho = fire.res.rho_upper;
      rec.confidence = fire.res.confidence;
      rec.note = fire.con.note;
    } else if (have_fail) {
      rec.k = last_fail.params.k;
      rec.gamma = last_fail.params.gamma;
      rec.rho = last_fail.res.rho_upper;
      rec.diagnostic = rho_profile(law, d, beta, last_fail.con.h,
                                   last_fail.params);
      rec.has_diagnostic = true;
    }
    rec.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    out.push_back(std::move(rec));
  }
  return out;
}

namespace {

ExponentFit fit_records(std::span<const ShiftScanRecord> records,
                        bool loglog) {
  std::vector<double> x, y;
  for (const ShiftScanRecord& r : records) {
    if (!(r.delta_certified > 0.0)) continue;
    if (loglog) {
      if (!(r.delta_certified < 1.0)) continue;
      x.push_back(std::log(1.0 / r.beta));
      y.push_back(std::log(std::log(1.0 / r.delta_certified)));
    } else {
      x.push_back(std::log(r.beta));
      y.push_back(std::log(r.delta_certified));
    }
  }
  if (x.size() < 2)
    throw std::invalid_argument(
        "exponent fit: need at least 2 records with a positive certified "
        "shift");
  bool degenerate = true;
  for (std::size_t i = 1; i < x.size(); ++i)
    if (x[i] != x[0]) degenerate = false;
  if (degenerate)
    throw std::invalid_argument("exponent fit: degenerate grid");
  LineFit f = fit_line(x, y);
  ExponentFit e;
  e.slope = f.slope;
  e.intercept = f.intercept;
  e.slope_se = f.slope_stderr;
  e.n_used = x.size();
  if (x.size() < 4)
    e.warning = "fit backed by only " + std::to_string(x.size()) +
                " records; exponent is indicative";
  return e;
}

}  // namespace

ExponentFit exponent_fit(std::span<const ShiftScanRecord> records) {
  return fit_records(records, false);
}

ExponentFit exponent_fit_loglog(std::span<const ShiftScanRecord> records) {
  return fit_records(records, true);
}

std::vector<FeProfileRow> fe_profile(const Law& law, const DisorderLaw& d,
                                     double beta,
                                     std::span<const double> h_grid,
                                     std::size_t N, const McOptions& mc) {
  std::vector<FeProfileRow> rows;
  rows.reserve(h_grid.size());
  for (double h : h_grid) {
    FeProfileRow r;
    r.h = h;
    r.quenched = quenched_free_energy_mc(law, d, beta, h, N, mc);
    r.annealed =
        pure_log_partition(law, h + d.log_mgf(beta), N) / (double)N;
    r.gap = r.annealed - r.quenched.point;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace pinlab
