#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "pinlab/homogeneous.hpp"
#include "pinlab/renewal.hpp"

using namespace pinlab;

namespace {

Law make_law(double alpha, std::size_t n_max = 16384,
             SlowKind kind = SlowKind::constant, double b = 0.0) {
  LawSpec s;
  s.alpha = alpha;
  s.n_max = n_max;
  s.slow.kind = kind;
  s.slow.b = b;
  return Law(s);
}

// independent route to Z_N(h): distribute mass over the number of renewals,
// P(tau_n = m) by repeated convolution with K
double conv_log_partition(const Law& law, double h, std::size_t N) {
  std::vector<double> p(N + 1, 0.0), nx(N + 1, 0.0);
  for (std::size_t m = 1; m <= N; ++m) p[m] = law.k(m);
  double z = 0.0;
  for (std::size_t n = 1; n <= N; ++n) {
    z += p[N] * std::exp(h * (double)n);
    if (n == N) break;
    std::fill(nx.begin(), nx.end(), 0.0);
    for (std::size_t m = n; m <= N; ++m) {
      if (p[m] == 0.0) continue;
      for (std::size_t g = 1; g + m <= N; ++g) nx[m + g] += p[m] * law.k(g);
    }
    p.swap(nx);
  }
  return std::log(z);
}

}  // namespace

TEST_CASE("partition basics and the h=0 renewal identity") {
  Law law = make_law(0.5, 4096);
  const double h = 0.37;
  auto curve = pure_log_partition_curve(law, h, 300);
  REQUIRE(curve.size() == 301);
  CHECK(curve[0] == 0.0);
  CHECK(curve[1] == doctest::Approx(std::log(law.k(1)) + h).epsilon(1e-12));
  CHECK(pure_log_partition(law, h, 300) == doctest::Approx(curve[300]).epsilon(1e-14));

  auto u = mass_renewal(law, 300);
  auto at0 = pure_log_partition_curve(law, 0.0, 300);
  for (std::size_t n = 1; n <= 300; ++n)
    CHECK(std::exp(at0[n]) == doctest::Approx(u[n]).epsilon(1e-10));
}

TEST_CASE("free energy: phase boundary, bracketing, monotonicity") {
  Law law = make_law(0.75);

  auto below = pure_free_energy(law, -0.3);
  CHECK(below.f == 0.0);
  CHECK(std::isinf(below.correlation_length));
  CHECK(pure_free_energy(law, 0.0).f == 0.0);

  double prev = 0.0;
  for (double h : {1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0}) {
    auto r = pure_free_energy(law, h);
    CHECK(r.f > 0.0);
    CHECK(r.f >= prev);
    CHECK(r.f_bracket.contains(r.f));
    // near h=0 the root is ~1e-5 and the series bracket floor dominates
    CHECK(r.f_bracket.rel_width() <= (h <= 1e-3 ? 5e-5 : 1e-9));
    // root straddling: the series is decreasing in F, so the bracket ends
    // must put the target e^{-h} between their series values
    double target = std::exp(-h);
    CHECK(ghat(law, r.f_bracket.lo).hi >= target);
    CHECK(ghat(law, r.f_bracket.hi).lo <= target);
    CHECK(r.residual <= 1e-8);
    prev = r.f;
  }

  // ghat at F=0 is the total mass; decreasing in F
  CHECK(ghat(law, 0.0).contains(1.0));
  CHECK(ghat(law, 0.05).hi < ghat(law, 0.0).hi);
  CHECK(ghat(law, 0.5).hi < ghat(law, 0.05).lo);
}

TEST_CASE("small-h exponents: linear response above alpha=1, 1/alpha below") {
  Law fin = make_law(1.5);
  auto r = pure_free_energy(fin, 1e-3);
  Interval m = fin.mean_tau();
  CHECK(m.valid());
  double lin = r.f / 1e-3 * m.mid();
  CHECK(lin > 0.9);
  CHECK(lin < 1.1);

  Law half = make_law(0.5);
  double f1 = pure_free_energy(half, 1e-3).f;
  double f2 = pure_free_energy(half, 0.5e-3).f;
  CHECK(f1 / f2 > 3.6);
  CHECK(f1 / f2 < 4.4);
}

TEST_CASE("solver cross-check against the partition slope") {
  PureSolveOptions o;
  o.verify = true;
  auto a = pure_free_energy(make_law(1.5), 1e-3, o);
  CHECK(a.verified);
  CHECK(a.dp_slope > 0.0);
  CHECK(a.dp_slope_rel_err <= 0.02);
  auto b = pure_free_energy(make_law(0.75), 0.5, o);
  CHECK(b.dp_slope_rel_err <= 0.02);
}

TEST_CASE("log-partition is log-convex in h") {
  Law law = make_law(0.75, 4096);
  const std::size_t N = 200;
  std::vector<double> hs = {-0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> lz;
  for (double h : hs) lz.push_back(pure_log_partition(law, h, N));
  for (std::size_t i = 0; i + 2 < hs.size(); ++i)
    CHECK(lz[i] + lz[i + 2] >= 2.0 * lz[i + 1] - 1e-9);
}

TEST_CASE("finite-size correction to the free energy is O(1/N)") {
  Law law = make_law(0.75);
  const double h = 0.5;
  auto r = pure_free_energy(law, h);
  double c3 = 1e3 * std::fabs(pure_log_partition(law, h, 1000) / 1e3 - r.f);
  double c4 = 1e4 * std::fabs(pure_log_partition(law, h, 10000) / 1e4 - r.f);
  CHECK(c3 > 0.0);
  CHECK(c4 / c3 > 0.8);
  CHECK(c4 / c3 < 1.2);
  MESSAGE("constrained-endpoint correction constant ~ ", c4);
}

TEST_CASE("correlation length: reciprocal, monotone, alpha-exponent scaling") {
  Law law = make_law(0.75);
  auto r = pure_free_energy(law, 0.1);
  CHECK(r.correlation_length == doctest::Approx(1.0 / r.f).epsilon(1e-12));

  double lo = 1e300, hi = 0.0, prev = 1e300;
  for (double d : {1e-4, 3e-4, 1e-3, 3e-3, 1e-2}) {
    auto s = pure_free_energy(law, d);
    CHECK(s.correlation_length < prev);
    prev = s.correlation_length;
    double v = s.correlation_length * std::pow(d, 4.0 / 3.0);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi / lo < 1.5);  // xi ~ Delta^{-1/alpha} up to slow drift
  CHECK(lo > 1.0);
  CHECK(hi < 10.0);
}

TEST_CASE("pinned partition bound stays flat as h drops") {
  Law law = make_law(0.75, 32768);
  auto a2 = pinned_partition_bound_check(law, 1e-2, 31000);
  auto a3 = pinned_partition_bound_check(law, 1e-3, 31000);
  CHECK(a2.j_cap < 31000);  // capped by the correlation length, not the horizon
  CHECK(a2.argmax <= a2.j_cap);
  CHECK(a3.j_cap <= 31000);
  CHECK(a2.max_value > 0.0);
  CHECK(a3.max_value > 0.0);
  CHECK(a2.max_value / a3.max_value <= 2.0);
  CHECK(a2.max_value / a3.max_value >= 0.5);
  CHECK(a2.max_value < 2.0);  // empirical constant is order one
  CHECK(a3.max_value < 2.0);

  CHECK_THROWS_AS(pinned_partition_bound_check(make_law(1.5), 0.1, 100),
                  std::invalid_argument);
  CHECK_THROWS_AS(pinned_partition_bound_check(law, 1.5, 100),
                  std::invalid_argument);
}

TEST_CASE("pinned bound at horizon 1 reduces to the single-contact term") {
  for (auto kind : {SlowKind::constant, SlowKind::log_power}) {
    Law law = make_law(0.6, 2048, kind, kind == SlowKind::constant ? 0.0 : -2.0);
    const double h = 0.3;
    auto c = pinned_partition_bound_check(law, h, 1);
    CHECK(c.argmax == 1);
    double expect = law.k(1) * std::exp(h) * law.c() * law.spec().slow.value(1.0);
    CHECK(c.max_value == doctest::Approx(expect).epsilon(1e-12));
    CHECK(c.max_value <= std::exp(1.0) * law.k(1) * law.c() * law.spec().slow.value(1.0));
  }
}

TEST_CASE("negative-drift scaling matches an independent convolution") {
  Law law = make_law(0.7, 2048);
  const std::size_t N = 500;
  const double r = std::log((double)N);
  const double Ln = law.c() * law.spec().slow.value((double)N);
  double drift = -std::pow((double)N, -0.7) * Ln * r;
  double direct = std::exp(conv_log_partition(law, drift, N)) * Ln * r * r *
                  std::pow((double)N, 0.3);
  double got = negative_drift_asymptotic_ratio(law, N, DriftR::log_n);
  CHECK(got == doctest::Approx(direct).epsilon(1e-9));
  // the exact finite-N value sits above 1 at desk scale; record, don't tune
  CHECK(got > 0.9);
  CHECK(got < 1.6);
  MESSAGE("drift ratio at N=500: ", got);
}

TEST_CASE("negative-drift precondition errors") {
  Law law = make_law(0.7, 2048);
  CHECK_THROWS_AS(negative_drift_asymptotic_ratio(make_law(1.5), 100),
                  std::invalid_argument);
  // log log 10 < 1: prefactor has not left its divergence regime
  CHECK_THROWS_AS(negative_drift_asymptotic_ratio(law, 10, DriftR::log_log_n),
                  std::invalid_argument);
  CHECK_NOTHROW(negative_drift_asymptotic_ratio(law, 200, DriftR::sqrt_log_n));
}

TEST_CASE("R_alpha inversion table") {
  Law law = make_law(0.5, 2048);
  std::vector<double> grid;
  for (double b = 0.5; b > 1e-4; b *= 0.7) grid.push_back(b);

  RAlphaTable t(law, grid);
  CHECK(t.size() == grid.size());
  // constant L: y = b^alpha, so R(y) = y^2 and the log-log interpolation is
  // exact between nodes too
  for (double y : {0.02, 0.05, 0.1, 0.3, 0.6})
    CHECK(t.eval(y) == doctest::Approx(y * y).epsilon(1e-9));
  CHECK(t.eval(0.1) < t.eval(0.2));

  Law lp = make_law(0.75, 2048, SlowKind::log_power, -1.0);
  RAlphaTable tl(lp, grid);
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    double b = grid[i];
    double y = std::pow(b, 0.75) * lp.spec().slow.value(1.0 / b);
    CHECK(tl.eval(y) == doctest::Approx(b).epsilon(0.01));
  }
}
