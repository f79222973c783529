#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "pinlab/errors.hpp"
#include "pinlab/scan.hpp"

using namespace pinlab;

namespace {

Law heavy_law() {
  LawSpec s;
  s.alpha = 1.5;
  s.n_max = 32768;
  return Law(s);
}

Law log_law() {
  LawSpec s;
  s.alpha = 0.5;
  s.slow = {SlowKind::log_power, -2.0};
  s.n_max = 65536;
  return Law(s);
}

// the quadratic-case scan over the standard grid is reused by several cases
const std::vector<ShiftScanRecord>& quad_scan() {
  static const std::vector<ShiftScanRecord> recs = [] {
    Law law = heavy_law();
    DisorderLaw d{DisorderKind::gaussian};
    ScanOptions o;
    o.scase = ScanCase::alpha_gt1;
    std::vector<double> grid{0.4, 0.6, 0.8, 1.0};
    return shift_scan(law, d, grid, o);
  }();
  return recs;
}

ShiftScanRecord synth(double beta, double delta) {
  ShiftScanRecord r;
  r.beta = beta;
  r.delta_certified = delta;
  return r;
}

}  // namespace

TEST_CASE("exponent fitter recovers synthetic power laws exactly") {
  std::vector<ShiftScanRecord> recs;
  for (double b : {0.2, 0.4, 0.7, 1.0}) recs.push_back(synth(b, 0.3 * b * b));
  ExponentFit f = exponent_fit(recs);
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(f.intercept == doctest::Approx(std::log(0.3)).epsilon(1e-9));
  CHECK(f.slope_se <= 1e-9);
  CHECK(f.n_used == 4);
  CHECK(f.warning.empty());

  // zero-shift records do not enter the fit
  recs.push_back(synth(0.5, 0.0));
  CHECK(exponent_fit(recs).n_used == 4);

  // thin fits carry a warning
  std::vector<ShiftScanRecord> three(recs.begin(), recs.begin() + 3);
  ExponentFit t = exponent_fit(three);
  CHECK(t.n_used == 3);
  CHECK_FALSE(t.warning.empty());

  // exponentially small shifts on the doubled log scale
  std::vector<ShiftScanRecord> es;
  for (double b : {0.2, 0.3, 0.5, 0.8})
    es.push_back(synth(b, std::exp(-std::pow(b, -2.0))));
  ExponentFit g = exponent_fit_loglog(es);
  CHECK(g.slope == doctest::Approx(2.0).epsilon(1e-10));
  // shifts at or above 1 have no doubled logarithm; skipped
  es.push_back(synth(0.9, 1.5));
  CHECK(exponent_fit_loglog(es).n_used == 4);

  std::vector<ShiftScanRecord> flat{synth(0.5, 0.1), synth(0.5, 0.2),
                                    synth(0.5, 0.3)};
  CHECK_THROWS_AS(exponent_fit(flat), std::invalid_argument);
  std::vector<ShiftScanRecord> lone{synth(0.5, 0.1), synth(0.7, 0.0)};
  CHECK_THROWS_AS(exponent_fit(lone), std::invalid_argument);
}

TEST_CASE("construction dispatcher routes each regime") {
  DisorderLaw d{DisorderKind::gaussian};
  Law hv = heavy_law();
  ShiftConstruction a = construct_for(ScanCase::alpha_gt1, hv, d, 1.0, 0.1,
                                      0.0, kDefaultKCap);
  ShiftConstruction b = construct_alpha_gt1(hv, d, 1.0, 0.1);
  CHECK(a.h == b.h);
  CHECK(a.delta == b.delta);
  CHECK(a.params.k == b.params.k);

  LawSpec ms;
  ms.alpha = 0.75;
  ms.n_max = 2048;
  Law mid(ms);
  ShiftConstruction m = construct_for(ScanCase::alpha_half_one, mid, d, 0.8,
                                      0.5, 0.1, kDefaultKCap);
  CHECK_FALSE(m.feasible);
  CHECK(m.cap_bound);

  ShiftConstruction h = construct_for(ScanCase::alpha_half, log_law(), d, 1.0,
                                      1.0, 0.5, kDefaultKCap);
  CHECK(h.delta == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("quadratic-shift scan certifies across the disorder grid") {
  const auto& recs = quad_scan();
  REQUIRE(recs.size() == 4);
  for (const ShiftScanRecord& r : recs) {
    CHECK(r.delta_certified > 0.0);
    CHECK(r.a_witness > 0.0);
    CHECK(r.delta_certified ==
          doctest::Approx(r.a_witness * r.beta * r.beta).epsilon(1e-12));
    CHECK(r.h_c_ann == doctest::Approx(-0.5 * r.beta * r.beta).epsilon(1e-12));
    // a certified shift cannot push past h = 0
    CHECK(r.delta_certified <= -r.h_c_ann);
    CHECK(r.rho <= 1.0);
    CHECK(r.gamma == doctest::Approx(0.82).epsilon(1e-12));
    CHECK(r.k >= 1);
    CHECK(r.confidence == CertConfidence::exact);
    CHECK_FALSE(r.capped);
    CHECK(r.runtime_seconds > 0.0);
  }
  // stronger disorder affords a shorter cutoff
  for (std::size_t i = 1; i < recs.size(); ++i)
    CHECK(recs[i].k < recs[i - 1].k);

  // deterministic backend: a rerun reproduces every record bit for bit
  Law law = heavy_law();
  DisorderLaw d{DisorderKind::gaussian};
  ScanOptions o;
  o.scase = ScanCase::alpha_gt1;
  std::vector<double> grid{0.4, 0.6, 0.8, 1.0};
  auto again = shift_scan(law, d, grid, o);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(again[i].delta_certified == recs[i].delta_certified);
    CHECK(again[i].a_witness == recs[i].a_witness);
    CHECK(again[i].rho == recs[i].rho);
    CHECK(again[i].k == recs[i].k);
  }
}

TEST_CASE("fitted exponent brackets the quadratic law") {
  ExponentFit f = exponent_fit(quad_scan());
  CHECK(f.n_used == 4);
  CHECK(f.warning.empty());
  CHECK(f.slope >= 1.7);
  CHECK(f.slope <= 2.3);
  CHECK(f.slope_se < 0.1);
}

TEST_CASE("normalized shift does not rise with disorder strength") {
  // trend of log(delta / beta^2) against log(beta) should be <= 0 at 95%
  ExponentFit f = exponent_fit(quad_scan());
  CHECK(f.slope - 2.0 <= 2.0 * f.slope_se);
}

TEST_CASE("cutoff cap truncates the search and says what it needed") {
  Law law = heavy_law();
  DisorderLaw d{DisorderKind::gaussian};
  ScanOptions o;
  o.scase = ScanCase::alpha_gt1;
  o.k_cap = 50;
  std::vector<double> grid{1.0};
  auto recs = shift_scan(law, d, grid, o);
  REQUIRE(recs.size() == 1);
  const ShiftScanRecord& r = recs[0];
  CHECK(r.delta_certified == 0.0);
  CHECK(r.capped);
  CHECK(r.required_k == 64.0);
  // the last completed probe leaves its contribution profile behind
  CHECK(r.has_diagnostic);
  CHECK(r.rho > 1.0);
  double s = 0.0;
  for (double x : r.diagnostic.addends) s += x;
  CHECK(s == doctest::Approx(r.diagnostic.rho).epsilon(1e-12));

  // a larger budget can only improve the certified shift
  CHECK(r.delta_certified <= quad_scan()[3].delta_certified);

  std::vector<double> none;
  CHECK_THROWS_AS(shift_scan(law, d, none, o), std::invalid_argument);
  ScanOptions bad = o;
  bad.a_max = 0.0;
  CHECK_THROWS_AS(shift_scan(law, d, grid, bad), std::invalid_argument);
}

TEST_CASE("log-kernel scan fires at strong disorder, caps at weak") {
  Law law = log_law();
  DisorderLaw d{DisorderKind::gaussian};
  ScanOptions o;
  o.scase = ScanCase::alpha_half;
  o.epsilon = 0.5;
  std::vector<double> grid{1.0, 0.3};
  auto recs = shift_scan(law, d, grid, o);
  REQUIRE(recs.size() == 2);

  const ShiftScanRecord& strong = recs[0];
  CHECK(strong.delta_certified > 0.0);
  CHECK(strong.rho <= 1.0);
  CHECK(strong.k >= 300);
  CHECK(strong.k <= 500);
  CHECK(strong.gamma ==
        doctest::Approx(1.0 - 1.0 / std::log((double)strong.k))
            .epsilon(1e-12));
  CHECK(strong.note.find("tilt active") != std::string::npos);

  const ShiftScanRecord& weak = recs[1];
  CHECK(weak.delta_certified == 0.0);
  CHECK(weak.capped);
  CHECK(weak.required_k > 20000.0);
  CHECK(weak.required_k < 1e5);
  CHECK(weak.note.find("cap") != std::string::npos);
}

TEST_CASE("stochastic backend stamps its provenance") {
  Law law = heavy_law();
  DisorderLaw d{DisorderKind::gaussian};
  ScanOptions o;
  o.scase = ScanCase::alpha_gt1;
  o.backend = ABackend::mc;
  o.a_max = 0.01;
  o.mc.replicas = 60;
  o.mc.seed = 9;
  std::vector<double> grid{1.0};
  auto recs = shift_scan(law, d, grid, o);
  REQUIRE(recs.size() == 1);
  const ShiftScanRecord& r = recs[0];
  CHECK(r.seed == 9);
  CHECK(r.replicas == 60);
  CHECK(r.backend == ABackend::mc);
  REQUIRE(r.delta_certified > 0.0);
  CHECK(r.a_witness == 0.01);
  CHECK(r.confidence == CertConfidence::statistical);
}

TEST_CASE("free-energy profile sits between annealed and zero") {
  Law law = heavy_law();
  DisorderLaw d{DisorderKind::gaussian};
  const double beta = 0.8;
  const double hca = d.h_c_ann(beta);
  const double delta = quad_scan()[2].delta_certified;
  std::vector<double> grid{-0.6, -0.45, hca, hca + delta / 2, -0.2, -0.05};
  McOptions mc;
  mc.replicas = 240;
  mc.seed = 5;
  auto rows = fe_profile(law, d, beta, grid, 400, mc);
  REQUIRE(rows.size() == grid.size());

  for (std::size_t i = 0; i < rows.size(); ++i) {
    const FeProfileRow& r = rows[i];
    CHECK(r.h == grid[i]);
    CHECK(r.gap == doctest::Approx(r.annealed - r.quenched.point)
                       .epsilon(1e-12));
    // Jensen: annealed dominates, up to estimator noise
    CHECK(r.gap >= -3.0 * r.quenched.stderr_);
    // shared replicas across h keep the column monotone
    if (i > 0) CHECK(r.quenched.point >= rows[i - 1].quenched.point - 1e-12);
  }
  // the annealed column changes sign at its critical point
  CHECK(rows[1].annealed < 0.0);
  CHECK(rows[2].annealed < 0.0);
  CHECK(rows[3].annealed > 0.0);
  CHECK(rows[4].annealed > 0.0);

  // inside the certified window the quenched estimate is consistent with a
  // flat free energy: never significantly positive, only finite-size low
  const FeProfileRow& cert = rows[3];
  CHECK(cert.quenched.point <= 3.0 * cert.quenched.stderr_);
  CHECK(cert.quenched.point > -0.05);
}
