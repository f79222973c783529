#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "pinlab/disorder.hpp"

using namespace pinlab;

namespace {
const DisorderLaw kGauss{DisorderKind::gaussian};
const DisorderLaw kRad{DisorderKind::rademacher};
}  // namespace

TEST_CASE("log MGF closed forms") {
  CHECK(kGauss.log_mgf(0.0) == 0.0);
  CHECK(kRad.log_mgf(0.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(kGauss.log_mgf(1.0) == 0.5);
  CHECK(kGauss.log_mgf(-2.0) == 2.0);
  CHECK(kRad.log_mgf(1.0) == doctest::Approx(std::log(std::cosh(1.0))).epsilon(1e-14));
  CHECK(kRad.log_mgf(1.0) == doctest::Approx(0.4337808304830271).epsilon(1e-12));
  // even functions, stable far out
  CHECK(kRad.log_mgf(-3.0) == doctest::Approx(kRad.log_mgf(3.0)).epsilon(1e-14));
  CHECK(kRad.log_mgf(40.0) == doctest::Approx(40.0 - std::log(2.0)).epsilon(1e-12));
  CHECK(disorder_name(DisorderKind::gaussian) == "gaussian");
  CHECK(disorder_name(DisorderKind::rademacher) == "rademacher");
}

TEST_CASE("log MGF is convex with unit curvature at zero") {
  for (const DisorderLaw& d : {kGauss, kRad}) {
    CHECK(d.log_mgf_d2(0.0) == doctest::Approx(1.0).epsilon(1e-12));
    // numeric first derivative at 0 vanishes (centered disorder)
    double fd = (d.log_mgf(1e-6) - d.log_mgf(-1e-6)) / 2e-6;
    CHECK(std::fabs(fd) <= 1e-8);
    for (double t = -2.0; t <= 2.0; t += 0.125) {
      CHECK(d.log_mgf_d2(t) > 0.0);
      // midpoint convexity
      CHECK(d.log_mgf(t) + d.log_mgf(t + 0.25) >=
            2.0 * d.log_mgf(t + 0.125) - 1e-12);
      // quadratic envelope on |t| <= 1 with the curvature constant
      if (std::fabs(t) <= 1.0) {
        CHECK(d.log_mgf(t) >= -1e-15);
        CHECK(d.log_mgf(t) <= d.curvature_half_max() * t * t + 1e-12);
      }
    }
  }
  CHECK(kRad.log_mgf_d2(1.0) ==
        doctest::Approx(0.41997434161402614).epsilon(1e-12));
}

TEST_CASE("curvature extrema on the reference windows") {
  CHECK(kGauss.curvature_half_max() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(kRad.curvature_half_max() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(kGauss.curvature_min(1.0) == doctest::Approx(1.0).epsilon(1e-12));
  // cosh^{-2} is minimized at the window edge
  CHECK(kRad.curvature_min(1.0) ==
        doctest::Approx(0.41997434161402614).epsilon(1e-9));
}

TEST_CASE("annealed critical shift") {
  CHECK(kGauss.h_c_ann(1.0) == -0.5);
  CHECK(kGauss.h_c_ann(0.0) == 0.0);
  CHECK(kRad.h_c_ann(0.0) == doctest::Approx(0.0).epsilon(1e-15));
  // small beta: -beta^2/2 to leading order for any unit-variance kind
  for (const DisorderLaw& d : {kGauss, kRad}) {
    double b = 0.05;
    CHECK(d.h_c_ann(b) / (-0.5 * b * b) == doctest::Approx(1.0).epsilon(1e-2));
  }
}

TEST_CASE("fractional weight moment") {
  // gamma = 1 is the plain annealed weight
  CHECK(kRad.weight_moment(0.7, 0.3, 1.0) ==
        doctest::Approx(std::exp(0.3) * std::cosh(0.7)).epsilon(1e-13));
  CHECK(kGauss.weight_moment(1.0, 0.0, 0.5) ==
        doctest::Approx(1.1331484530668263).epsilon(1e-13));
  double prev = 0.0;
  for (double h : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    double v = kGauss.weight_moment(0.8, h, 0.6);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("tilted effective pinning strength") {
  for (double b : {0.3, 0.8, 1.3}) {
    for (double lam : {0.0, 0.1, 0.3, b}) {
      CHECK(kGauss.tilted_h(b, 0.2, lam) ==
            doctest::Approx(0.2 + 0.5 * b * b - b * lam).epsilon(1e-13));
    }
    // lam = 0 recovers the annealed shift for both kinds
    for (const DisorderLaw& d : {kGauss, kRad}) {
      CHECK(d.tilted_h(b, -0.1, 0.0) ==
            doctest::Approx(-0.1 + d.log_mgf(b)).epsilon(1e-14));
      double prev = d.tilted_h(b, 0.0, 0.0);
      for (double lam = 0.1 * b; lam <= b + 1e-12; lam += 0.1 * b) {
        double cur = d.tilted_h(b, 0.0, lam);
        CHECK(cur <= prev + 1e-13);
        prev = cur;
      }
    }
  }
}

TEST_CASE("MGF ratio bound margin") {
  // gaussian algebra makes the bound an identity
  for (double b : {0.2, 0.6, 1.0})
    for (double lam : {0.1 * b, 0.5 * b, b})
      CHECK(std::fabs(kGauss.mgf_ratio_margin(b, lam, 1.0)) <= 1e-12);
  for (int bi = 1; bi <= 10; ++bi)
    for (int li = 1; li <= 10; ++li) {
      double b = 0.1 * bi, lam = b * 0.1 * li;
      CHECK(kRad.mgf_ratio_margin(b, std::min(lam, b), 1.0) >= 0.0);
    }
  CHECK_THROWS_AS(kRad.mgf_ratio_margin(0.5, 0.6, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(kRad.mgf_ratio_margin(1.2, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(kRad.mgf_ratio_margin(0.5, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("interpolation factor: exact form and its curvature relaxation") {
  for (const DisorderLaw& d : {kGauss, kRad}) {
    CHECK(d.holder_log_factor(0.0, 0.7) == doctest::Approx(0.0).epsilon(1e-15));
    for (double g : {0.3, 0.6, 0.8, 0.95}) {
      double cap = DisorderLaw::lambda_cap(g);
      for (double lam : {0.1 * cap, 0.5 * cap, cap}) {
        double exact = d.holder_log_factor(lam, g, false);
        double relax = d.holder_log_factor(lam, g, true);
        CHECK(exact == doctest::Approx(g * d.log_mgf(-lam) +
                                       (1.0 - g) * d.log_mgf(lam * g / (1.0 - g)))
                           .epsilon(1e-13));
        CHECK(relax >= exact - 1e-13);
      }
    }
  }
  CHECK(DisorderLaw::lambda_cap(0.3) == 1.0);
  CHECK(DisorderLaw::lambda_cap(0.8) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(kGauss.holder_log_factor(0.3, 0.8), std::invalid_argument);
  CHECK_THROWS_AS(kGauss.holder_log_factor(0.1, 1.0), std::invalid_argument);
}

TEST_CASE("sampling moments") {
  const std::size_t n = 200000;
  std::vector<double> buf(n);
  for (const DisorderLaw& d : {kGauss, kRad}) {
    Rng rng(1234, 0);
    d.sample(buf, rng);
    double m = 0.0, m2 = 0.0;
    for (double x : buf) {
      m += x;
      m2 += x * x;
    }
    m /= (double)n;
    m2 /= (double)n;
    double se = 1.0 / std::sqrt((double)n);
    CHECK(std::fabs(m) <= 3.0 * se);
    CHECK(std::fabs(m2 - 1.0) <= 3.0 * std::sqrt(2.0) * se);
  }
  Rng rng(77, 1);
  kRad.sample(buf, rng);
  for (double x : buf) CHECK(std::fabs(x) == 1.0);
}

TEST_CASE("tilted sampler: biased head, untouched tail") {
  const std::size_t len = 100, tilt_n = 50, reps = 4000;
  const double lam = 0.8;
  std::vector<double> buf(len);

  double head = 0.0, tail = 0.0;
  Rng rng(9, 0);
  for (std::size_t r = 0; r < reps; ++r) {
    kGauss.sample_tilted(buf, tilt_n, lam, rng);
    for (std::size_t i = 0; i < tilt_n; ++i) head += buf[i];
    for (std::size_t i = tilt_n; i < len; ++i) tail += buf[i];
  }
  double cnt = (double)(reps * tilt_n);
  double se = 1.0 / std::sqrt(cnt);
  CHECK(std::fabs(head / cnt + lam) <= 3.0 * se);
  CHECK(std::fabs(tail / cnt) <= 3.0 * se);

  // gaussian tilt is a deterministic shift: the tail draws match a plain
  // sample from the same stream bit for bit, and a zero tilt is the identity
  std::vector<double> a(len), b(len);
  Rng r1(42, 3), r2(42, 3);
  kGauss.sample_tilted(a, tilt_n, lam, r1);
  kGauss.sample(b, r2);
  for (std::size_t i = tilt_n; i < len; ++i) CHECK(a[i] == b[i]);
  Rng r3(42, 3);
  kGauss.sample_tilted(b, tilt_n, 0.0, r3);
  for (std::size_t i = 0; i < len; ++i) CHECK(a[i] == b[i] - (i < tilt_n ? lam : 0.0));

  // rademacher head frequency matches e^{-lam}/(2 cosh lam)
  const double p_plus = std::exp(-lam) / (2.0 * std::cosh(lam));
  std::size_t plus = 0, tail_plus = 0;
  Rng r4(5, 2);
  for (std::size_t r = 0; r < reps; ++r) {
    kRad.sample_tilted(buf, tilt_n, lam, r4);
    for (std::size_t i = 0; i < tilt_n; ++i) plus += buf[i] > 0;
    for (std::size_t i = tilt_n; i < len; ++i) tail_plus += buf[i] > 0;
  }
  double phat = (double)plus / cnt;
  CHECK(std::fabs(phat - p_plus) <= 3.0 * std::sqrt(p_plus * (1 - p_plus) / cnt));
  CHECK(std::fabs((double)tail_plus / cnt - 0.5) <= 3.0 * std::sqrt(0.25 / cnt));

  CHECK_THROWS_AS(kGauss.sample_tilted(buf, len + 1, 0.1, r4),
                  std::invalid_argument);
}
