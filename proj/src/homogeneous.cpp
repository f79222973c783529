#include "pinlab/homogeneous.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pinlab/simd/kernels.hpp"

namespace pinlab {
namespace {

// bracket of sum_{n >= from} k(n) e^{-F n}: geometric blocks [A, A'), each
// enclosed by (k at the block edges) * (exact geometric sum of e^{-F n});
// k is decreasing there, so edge values bound the block.  Block growth 5e-4
// keeps the enclosure width ~1e-3 of the tail itself.
Interval laplace_tail_blocks(const Law& law, std::size_t from, double F) {
  const double emF = -std::expm1(-F);  // 1 - e^{-F}
  double lo = 0.0, hi = 0.0;
  double A = (double)from;
  const double stop = (double)from + 80.0 / F;
  while (A < stop) {
    double Anext = std::floor(std::max(A + 1.0, A * 1.0005));
    double geo = std::exp(-F * A) * (-std::expm1(-F * (Anext - A))) / emF;
    double kA = law.k((std::size_t)A);
    double kB = law.k((std::size_t)Anext);
    lo += kB * geo;
    hi += kA * geo;
    A = Anext;
    if (kA * geo < 1e-18 * hi) break;
  }
  // whatever is beyond the last block
  hi += law.k((std::size_t)A) * std::exp(-F * A) / emF;
  return {lo, hi};
}

}  // namespace

Interval ghat(const Law& law, double F) {
  if (F < 0) throw std::invalid_argument("ghat: F must be >= 0");
  if (F == 0.0) return law.mass();
  // exact head out to where the exponential has not yet bitten
  std::size_t C = law.n_max();
  if (2.0 / F > (double)C)
    C = (std::size_t)std::min(2.0 / F, 1.0e6);
  std::span<const double> d = law.dense(C);
  double head = simd::kernels().dot_expax(d.data() + 1, C, 0.0, -F, 1);
  double slack = head * 1e-14;
  Interval tail = laplace_tail_blocks(law, C + 1, F);
  return {head - slack + tail.lo, head + slack + tail.hi};
}

PureSolveResult pure_free_energy(const Law& law, double h,
                                 PureSolveOptions opts) {
  PureSolveResult r;
  r.h = h;
  if (h <= 0.0) {
    r.f = 0.0;
    r.f_bracket = {0.0, 0.0};
    r.correlation_length = std::numeric_limits<double>::infinity();
    return r;
  }
  const double target = std::exp(-h);

  // the root lies in [0, h]: ghat(h) <= e^{-h} * mass and mass ~ 1
  double f_lo = 0.0, f_hi = h;
  for (int guard = 0; guard < 60; ++guard) {
    Interval g = ghat(law, f_hi);
    if (g.lo <= target) break;
    f_lo = f_hi;
    f_hi *= 2.0;
  }

  int it = 0;
  bool stuck = false;
  for (; it < opts.max_iter; ++it) {
    if (f_hi - f_lo <= opts.f_rel_tol * f_hi) break;
    double mid = 0.5 * (f_lo + f_hi);
    Interval g = ghat(law, mid);
    if (g.lo > target) {
      f_lo = mid;
    } else if (g.hi < target) {
      f_hi = mid;
    } else {
      // the enclosure straddles the target: the series bracket itself is the
      // limiting resolution at this point
      stuck = true;
      break;
    }
  }
  r.iterations = it;
  r.f_bracket = {f_lo, f_hi};
  r.f = 0.5 * (f_lo + f_hi);
  if (stuck) {
    // center on the straddling point instead of the interval midpoint
    r.f = 0.5 * (f_lo + f_hi);
  }
  Interval g_at = ghat(law, r.f);
  r.residual = std::max(std::fabs(g_at.mid() - target), 0.5 * g_at.width());
  r.series_cutoff = std::max(law.n_max(), (std::size_t)std::min(
                                              r.f > 0 ? 2.0 / r.f : 0.0, 1.0e6));
  r.correlation_length =
      r.f > 0 ? 1.0 / r.f : std::numeric_limits<double>::infinity();

  if (opts.verify) {
    std::size_t M = law.n_max() / 2;
    double l1 = pure_log_partition(law, h, M);
    double l2 = pure_log_partition(law, h, 2 * M);
    r.dp_slope = (l2 - l1) / (double)M;
    r.dp_slope_rel_err = r.f != 0.0 ? std::fabs(r.dp_slope - r.f) / r.f
                                    : std::fabs(r.dp_slope);
    r.verified = true;
  }
  return r;
}

double pure_log_partition(const Law& law, double h, std::size_t N,
                          DpMode mode) {
  return pin_dp_const(law, N, h, mode)[N];
}

std::vector<double> pure_log_partition_curve(const Law& law, double h,
                                             std::size_t N, DpMode mode) {
  return pin_dp_const(law, N, h, mode);
}

PinnedBoundCheck pinned_partition_bound_check(const Law& law, double h,
                                              std::size_t horizon) {
  const double a = law.alpha();
  if (!(a > 0.0 && a < 1.0))
    throw std::invalid_argument(
        "pinned_partition_bound_check: needs alpha in (0,1)");
  if (!(h > 0.0 && h < 1.0))
    throw std::invalid_argument(
        "pinned_partition_bound_check: needs h in (0,1)");
  PinnedBoundCheck c;
  c.h = h;
  c.f = pure_free_energy(law, h).f;
  double cap = c.f > 0.0 ? 1.0 / c.f : (double)horizon;
  c.j_cap = (std::size_t)std::min((double)horizon, cap);
  if (c.j_cap < 1) c.j_cap = 1;
  std::vector<double> lw = pure_log_partition_curve(law, h, c.j_cap);
  for (std::size_t j = 1; j <= c.j_cap; ++j) {
    double v = std::exp(lw[j]) * std::pow((double)j, 1.0 - a) * law.c() *
               law.spec().slow.value((double)j);
    if (v > c.max_value) {
      c.max_value = v;
      c.argmax = j;
    }
  }
  return c;
}

double negative_drift_asymptotic_ratio(const Law& law, std::size_t N,
                                       DriftR rk) {
  const double a = law.alpha();
  if (!(a > 0.0 && a < 1.0))
    throw std::invalid_argument(
        "negative_drift_asymptotic_ratio: needs alpha in (0,1)");
  const double lg = std::log((double)N);
  double r = 0.0;
  switch (rk) {
    case DriftR::log_n: r = lg; break;
    case DriftR::log_log_n: r = std::log(lg); break;
    case DriftR::sqrt_log_n: r = std::sqrt(lg); break;
  }
  if (!(r > 1.0))
    throw std::invalid_argument(
        "negative_drift_asymptotic_ratio: r(N) too small at this N");
  const double L = law.c() * law.spec().slow.value((double)N);
  if (!(r * L * std::pow((double)N, -a) < 0.5))
    throw std::invalid_argument(
        "negative_drift_asymptotic_ratio: drift r(N)L(N)/N^alpha not small");
  const double h = -std::pow((double)N, -a) * L * r;
  std::vector<double> lw = pin_dp_const(law, N, h);
  return std::exp(lw[N]) * L * r * r * std::pow((double)N, 1.0 - a);
}

RAlphaTable::RAlphaTable(const Law& law, std::span<const double> b_grid) {
  const double a = law.alpha();
  if (!(a > 0.0 && a < 1.0))
    throw std::invalid_argument("RAlphaTable: needs alpha in (0,1)");
  y_.reserve(b_grid.size());
  b_.reserve(b_grid.size());
  double prev = -std::numeric_limits<double>::infinity();
  // walk the grid from small b up so y comes out increasing
  std::vector<double> bs(b_grid.begin(), b_grid.end());
  std::sort(bs.begin(), bs.end());
  for (double b : bs) {
    if (!(b > 0.0)) throw std::invalid_argument("RAlphaTable: b must be > 0");
    double y = std::pow(b, a) * law.spec().slow.value(1.0 / b);
    if (!(y > prev))
      throw std::invalid_argument(
          "RAlphaTable: map not monotone on the grid; refine the grid");
    y_.push_back(y);
    b_.push_back(b);
    prev = y;
  }
}

double RAlphaTable::eval(double y) const {
  if (y_.empty()) throw std::logic_error("RAlphaTable: empty");
  if (!(y > 0.0)) throw std::invalid_argument("RAlphaTable: y must be > 0");
  const double ly = std::log(y);
  if (y <= y_.front()) return b_.front();
  if (y >= y_.back()) return b_.back();
  auto it = std::lower_bound(y_.begin(), y_.end(), y);
  std::size_t i = (std::size_t)(it - y_.begin());
  double l0 = std::log(y_[i - 1]), l1 = std::log(y_[i]);
  double t = (ly - l0) / (l1 - l0);
  return std::exp((1.0 - t) * std::log(b_[i - 1]) + t * std::log(b_[i]));
}

}  // namespace pinlab
