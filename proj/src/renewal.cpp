#include "pinlab/renewal.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pinlab/simd/kernels.hpp"

namespace pinlab {

std::vector<double> mass_renewal(const Law& law, std::size_t N) {
  if (N > law.n_max())
    throw std::invalid_argument("mass_renewal: N exceeds law table length");
  const double* kt = law.table().data();
  const auto& kr = simd::kernels();
  std::vector<double> u(N + 1);
  u[0] = 1.0;
  for (std::size_t m = 1; m <= N; ++m)
    u[m] = kr.dot_rev(u.data(), kt + m, m);
  return u;
}

double doney_ratio(const Law& law, std::size_t N) {
  const double a = law.alpha();
  if (!(a > 0.0 && a < 1.0))
    throw std::invalid_argument("doney_ratio: needs alpha in (0,1)");
  std::vector<double> u = mass_renewal(law, N);
  const double pref =
      std::numbers::pi / (a * std::sin(std::numbers::pi * a));
  // the asymptotic constant is stated for the full slowly varying part of
  // the inter-arrival law, amplitude included
  return u[N] * law.c() * law.spec().slow.value((double)N) *
         std::pow((double)N, 1.0 - a) * pref;
}

LaplaceCheck laplace_exponent_check(const Law& law, double lam) {
  if (!(lam > 0)) throw std::invalid_argument("laplace check: lam must be > 0");
  LaplaceCheck c;
  c.lam = lam;
  Interval g = law.laplace(lam);
  c.exponent = {-std::log(g.hi), -std::log(g.lo)};
  const double a = law.alpha();
  c.asymptote = std::tgamma(1.0 - a) / a * std::pow(lam, a) * law.c() *
                law.spec().slow.value(1.0 / lam);
  c.ratio = c.exponent.mid() / c.asymptote;
  return c;
}

TerminatingLaw make_terminating(const Law& law, std::size_t k, double gamma,
                                std::span<const double> a, double scale,
                                std::size_t len) {
  if (k < 1) throw std::invalid_argument("make_terminating: k must be >= 1");
  if (a.size() != k)
    throw std::invalid_argument("make_terminating: need one entry per j < k");
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::invalid_argument("make_terminating: gamma in (0,1]");
  if ((1.0 + law.alpha()) * gamma <= 1.0)
    throw std::invalid_argument(
        "make_terminating: (1+alpha)*gamma <= 1, q not summable");
  if (len > law.n_max())
    throw std::invalid_argument("make_terminating: len exceeds law table");
  TerminatingLaw t;
  t.k = k;
  t.gamma = gamma;
  t.scale = scale;
  t.base = &law;
  t.q.assign(len + 1, 0.0);
  KahanSum part;
  for (std::size_t n = k; n <= len; ++n) {
    KahanSum s;
    for (std::size_t j = 0; j < k && j < n; ++j)
      s.add(std::exp(gamma * law.log_k(n - j)) * a[j]);
    t.q[n] = scale * s.value();
    part.add(t.q[n]);
  }
  // remainder: scale * sum_j a[j] * sum_{n>len} K(n-j)^gamma, bracketed by
  // the two extreme offsets
  Interval tail_hi = law.tail_power_sum(len + 1 - (k - 1), gamma);
  Interval tail_lo = law.tail_power_sum(len + 1, gamma);
  KahanSum asum;
  for (double v : a) {
    if (!(v >= 0.0))
      throw std::invalid_argument("make_terminating: weights must be >= 0");
    asum.add(v);
  }
  t.rho = part.value();
  t.mass = Interval{part.value() + scale * asum.value() * tail_lo.lo,
                    part.value() + scale * asum.value() * tail_hi.hi};
  return t;
}

TerminatingLaw make_terminating(const Law& law, double logw, std::size_t len) {
  double a[1] = {1.0};
  return make_terminating(law, 1, 1.0, std::span<const double>(a, 1),
                          std::exp(logw), len);
}

std::vector<double> terminating_mass_renewal(const TerminatingLaw& t,
                                             std::size_t N) {
  if (N + 1 > t.q.size())
    throw std::invalid_argument(
        "terminating_mass_renewal: N exceeds the q table");
  const auto& kr = simd::kernels();
  std::vector<double> u(N + 1);
  u[0] = 1.0;
  for (std::size_t m = 1; m <= N; ++m) {
    // sum_{n=k..m} q[n] u[m-n] = dot of q[k..m] against u[m-k..0]
    if (m < t.k) {
      u[m] = 0.0;
      continue;
    }
    u[m] = kr.dot_rev(t.q.data() + t.k, u.data() + (m - t.k), m - t.k + 1);
  }
  return u;
}

TerminatingCheck terminating_asymptotic_ratio(const TerminatingLaw& t,
                                              std::size_t N) {
  if (!(t.mass.hi < 1.0))
    throw std::invalid_argument(
        "terminating_asymptotic_ratio: law must be defective (mass < 1)");
  TerminatingCheck c;
  c.rho = t.mass.mid();
  std::vector<double> u = terminating_mass_renewal(t, N);
  const double omr = 1.0 - c.rho;
  c.pointwise_ratio = u[N] * omr * omr / t.q[N];
  KahanSum s;
  for (double v : u) s.add(v);
  c.partial_sum_ratio = s.value() * omr;
  return c;
}

TauSampler::TauSampler(const Law& law) : law_(&law) {
  cum_.resize(law.n_max() + 1);
  KahanSum s;
  cum_[0] = 0.0;
  for (std::size_t n = 1; n <= law.n_max(); ++n) {
    s.add(law.k(n));
    cum_[n] = std::min(s.value(), 1.0);
  }
}

std::uint64_t TauSampler::draw(Rng& rng) const {
  const double u = rng.next_uniform();
  if (u <= cum_.back()) {
    // first n with cum_[n] >= u
    std::size_t lo = 1, hi = cum_.size() - 1;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (cum_[mid] >= u)
        hi = mid;
      else
        lo = mid + 1;
    }
    return lo;
  }
  // tail inversion: P(tau > x) ~ c L(x) x^{-alpha} / alpha
  const double a = law_->alpha();
  const double t = 1.0 - u;  // target tail mass, < P(tau > n_max)
  double x = (double)law_->n_max();
  for (int it = 0; it < 3; ++it) {
    double lx = (law_->log_c() + law_->spec().slow.log_value(x) -
                 std::log(a) - std::log(t)) /
                a;
    x = std::exp(std::min(lx, 60.0));  // keep within integer range
  }
  double n = std::floor(x) + 1.0;
  if (n < (double)law_->n_max() + 1) n = (double)law_->n_max() + 1;
  return (std::uint64_t)n;
}

std::vector<std::uint64_t> sample_contacts(const TauSampler& s, Rng& rng,
                                           std::uint64_t horizon) {
  std::vector<std::uint64_t> out;
  std::uint64_t t = 0;
  for (;;) {
    std::uint64_t step = s.draw(rng);
    if (step > horizon || t > horizon - step) break;
    t += step;
    out.push_back(t);
  }
  return out;
}

ContactFractionCheck contact_fraction_lln(const Law& law, std::size_t N,
                                          std::size_t replicas,
                                          std::uint64_t seed) {
  if (N > law.n_max())
    throw std::invalid_argument("contact_fraction_lln: N exceeds law table");
  TauSampler s(law);
  std::vector<double> frac(replicas);
  for (std::size_t r = 0; r < replicas; ++r) {
    Rng rng(seed, r);
    frac[r] = (double)sample_contacts(s, rng, N).size() / (double)N;
  }
  ContactFractionCheck c;
  c.fraction = mean_and_stderr(frac);
  std::vector<double> u = mass_renewal(law, N);
  KahanSum t;
  for (std::size_t n = 1; n <= N; ++n) t.add(u[n]);
  c.table_mean = t.value() / (double)N;
  if (law.alpha() > 1.0) {
    Interval m = law.mean_tau();
    c.limit = Interval{1.0 / m.hi, 1.0 / m.lo};
    c.limit_finite = true;
  } else {
    c.limit = Interval{0.0, 0.0};
    c.limit_finite = false;  // infinite mean: limiting fraction is 0
  }
  c.table_consistent =
      std::abs(c.fraction.point - c.table_mean) <= 3.0 * c.fraction.stderr_;
  return c;
}

}  // namespace pinlab
