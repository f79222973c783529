#include "pinlab/kernels.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "pinlab/simd/kernels.hpp"
#include "pinlab/stats.hpp"

namespace pinlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// One-sided power envelopes for the slowly varying factor: for x >= A,
//   (log(1+x))^q <= (log(1+A))^q (x/A)^{d+},  d+ = max(0,q)/log(1+A)
//   (log(1+x))^q >= (log(1+A))^q (x/A)^{-d-}, d- = max(0,-q)/log(1+A)
// both from  loglog(1+x) - loglog(1+A) <= (log x - log A)/log(1+A)  and the
// fact that loglog is increasing.  Plugging them into the integral gives a
// closed-form enclosure; it is exact when q == 0.
Interval integral_envelope(double A, double q, double p) {
  const double lg = std::log1p(A);
  const double dplus = std::max(0.0, q) / lg;
  const double dminus = std::max(0.0, -q) / lg;
  const double head = std::exp(q * std::log(lg) + (1.0 - p) * std::log(A));
  double hi = (p - 1.0 - dplus > 0) ? head / (p - 1.0 - dplus) : kInf;
  double lo = head / (p - 1.0 + dminus);
  return {lo, hi};
}

// Enclosure of I_q(A) = int_A^inf (log(1+x))^q x^{-p} dx through `depth`
// rounds of integration by parts:
//   I_q(A) = (log(1+A))^q A^{1-p}/(p-1) + (q/(p-1)) J,
//   J = int (log(1+x))^{q-1} x^{-p} (x/(1+x)) dx  in  [A/(1+A), 1] * I_{q-1}(A)
// which terminates in the envelope above.  Each round trades one power of the
// log factor for a 1/log(1+A)-sized correction, so a handful of rounds is
// enough to push the enclosure width far below the leading term.
Interval ibp_integral(double A, double q, double p, int depth) {
  if (depth <= 0 || q == 0.0) return integral_envelope(A, q, p);
  Interval inner = ibp_integral(A, q - 1.0, p, depth - 1);
  if (!std::isfinite(inner.hi)) return integral_envelope(A, q, p);
  const double theta = A / (1.0 + A);
  Interval j{inner.lo * theta, inner.hi};
  const double lg = std::log1p(A);
  const double boundary = std::exp(q * std::log(lg) + (1.0 - p) * std::log(A)) / (p - 1.0);
  Interval r = j.scaled(q / (p - 1.0)) + boundary;
  if (r.lo < 0) r.lo = 0;  // the integral is positive
  return r;
}
}  // namespace

Interval tail_log_power_integral(double A, double q, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("tail integral needs p > 1");
  if (!(A >= 2.0)) throw std::invalid_argument("tail integral needs A >= 2");
  Interval best = integral_envelope(A, q, p);
  for (int d = 1; d <= 10; ++d) {
    Interval cand = ibp_integral(A, q, p, d);
    if (!cand.valid() || !std::isfinite(cand.hi)) continue;
    // all candidates are certified enclosures, so intersect
    Interval meet{std::max(best.lo, cand.lo), std::min(best.hi, cand.hi)};
    if (meet.valid()) best = meet;
  }
  return best;
}

Interval tail_log_power_sum(double C, double q, double p) {
  // f(x) = (log(1+x))^q x^{-p} is decreasing and convex from C on (checked
  // below), hence
  //   int_{C+1}^inf f  <=  sum_{n>C} f(n)  <=  int_{C+1/2}^inf f
  // (right endpoints resp. midpoint rule under convexity).
  const double lg = std::log1p(C);
  const double aq = std::fabs(q);
  bool decreasing = p * lg > aq;  // p > |q|/log(1+C) handles either sign of q
  bool convex = p * (p + 1.0) * lg > 2.0 * p * aq + aq * (aq + 1.0) + aq;
  if (!decreasing)
    throw std::invalid_argument("tail sum: cutoff too small for monotone tail");
  double lo = tail_log_power_integral(C + 1.0, q, p).lo;
  double hi;
  if (convex) {
    hi = tail_log_power_integral(C + 0.5, q, p).hi;
  } else {
    // decreasing alone: sum_{n>C} f(n) <= f(C+1) + int_{C+1}^inf f
    hi = std::exp(q * std::log(std::log1p(C + 1.0)) - p * std::log(C + 1.0)) +
         tail_log_power_integral(C + 1.0, q, p).hi;
  }
  return {lo, hi};
}

double SlowSpec::log_value(double x) const {
  if (kind == SlowKind::constant) return 0.0;
  return b * std::log(std::log1p(x));
}

double SlowSpec::value(double x) const { return std::exp(log_value(x)); }

std::string LawSpec::id() const {
  std::ostringstream os;
  os.precision(17);
  os << "alpha=" << alpha << ";slow=" << (slow.kind == SlowKind::constant ? "const" : "logpow")
     << ";b=" << slow.exponent() << ";n_max=" << n_max << ";tol=" << tol
     << ";cutoff=" << cutoff;
  return os.str();
}

double Law::log_f(double n) const {
  return spec_.slow.log_value(n) - (1.0 + spec_.alpha) * std::log(n);
}

Law::Law(LawSpec spec) : spec_(spec) {
  if (!(spec_.alpha > 0)) throw std::invalid_argument("law: alpha must be > 0");
  if (spec_.n_max < 2) throw std::invalid_argument("law: n_max too small");
  if (!(spec_.tol > 0)) throw std::invalid_argument("law: tol must be > 0");
  if (spec_.cutoff < spec_.n_max) spec_.cutoff = spec_.n_max;

  const double p = 1.0 + spec_.alpha;
  const double q = spec_.slow.exponent();

  // certified mass bracket: exact partial sum + tail enclosure, with the
  // cutoff pushed out until the bracket is narrow enough
  KahanSum part;
  std::size_t C = spec_.cutoff;
  std::size_t done = 0;
  Interval S{};
  for (;;) {
    for (std::size_t n = done + 1; n <= C; ++n) part.add(std::exp(log_f((double)n)));
    done = C;
    Interval T = tail_log_power_sum((double)C, q, p);
    double slack = part.value() * 5e-15;  // rounding allowance for the partial sum
    S = {part.value() - slack + T.lo, part.value() + slack + T.hi};
    if (S.rel_width() <= spec_.tol || C >= 64'000'000) break;
    C *= 4;
  }
  if (S.rel_width() > spec_.tol) {
    std::ostringstream os;
    os << "law: cannot certify normalization to tol=" << spec_.tol
       << " (achieved " << S.rel_width() << " at cutoff " << C << ")";
    throw std::runtime_error(os.str());
  }
  norm_cutoff_ = C;
  c_ = 2.0 / (S.lo + S.hi);
  log_c_ = -std::log(0.5 * (S.lo + S.hi));
  mass_ = S.scaled(c_);
  Interval Tk = tail_log_power_sum((double)C, q, p);
  tail_at_cutoff_ = Tk.scaled(c_);

  tab_.resize(spec_.n_max + 1);
  log_tab_.resize(spec_.n_max + 1);
  tab_[0] = 0.0;
  log_tab_[0] = -kInf;
  for (std::size_t n = 1; n <= spec_.n_max; ++n) {
    log_tab_[n] = log_c_ + log_f((double)n);
    tab_[n] = std::exp(log_tab_[n]);
  }
}

Law::Law(LawSpec spec, const LawTableCache& cache) : spec_(spec) {
  if (!(spec_.alpha > 0)) throw std::invalid_argument("law: alpha must be > 0");
  if (spec_.n_max < 2) throw std::invalid_argument("law: n_max too small");
  if (!(spec_.tol > 0)) throw std::invalid_argument("law: tol must be > 0");
  if (spec_.cutoff < spec_.n_max) spec_.cutoff = spec_.n_max;
  if (cache.table.size() != spec_.n_max)
    throw std::invalid_argument("law cache: table length mismatch");
  if (!(cache.c > 0.0) || !cache.mass.valid() ||
      !cache.tail_at_cutoff.valid() || cache.norm_cutoff < spec_.cutoff)
    throw std::invalid_argument("law cache: corrupt snapshot");
  c_ = cache.c;
  log_c_ = cache.log_c;
  mass_ = cache.mass;
  norm_cutoff_ = (std::size_t)cache.norm_cutoff;
  tail_at_cutoff_ = cache.tail_at_cutoff;
  tab_.resize(spec_.n_max + 1);
  log_tab_.resize(spec_.n_max + 1);
  tab_[0] = 0.0;
  log_tab_[0] = -kInf;
  for (std::size_t n = 1; n <= spec_.n_max; ++n) {
    tab_[n] = cache.table[n - 1];
    log_tab_[n] = log_c_ + log_f((double)n);
  }
}

LawTableCache Law::export_cache() const {
  LawTableCache c;
  c.c = c_;
  c.log_c = log_c_;
  c.mass = mass_;
  c.norm_cutoff = norm_cutoff_;
  c.tail_at_cutoff = tail_at_cutoff_;
  c.table.assign(tab_.begin() + 1, tab_.end());
  return c;
}

double Law::k(std::size_t n) const {
  if (n == 0) throw std::invalid_argument("law: index must be >= 1");
  if (n <= spec_.n_max) return tab_[n];
  return std::exp(log_k(n));
}

double Law::log_k(std::size_t n) const {
  if (n == 0) throw std::invalid_argument("law: index must be >= 1");
  if (n <= spec_.n_max) return log_tab_[n];
  return log_c_ + log_f((double)n);
}

std::span<const double> Law::dense(std::size_t upto) const {
  std::lock_guard<std::mutex> lock(dense_mu_);
  if (dense_.size() < upto + 1) {
    std::size_t old = dense_.empty() ? 0 : dense_.size() - 1;
    dense_.resize(upto + 1);
    if (old == 0) dense_[0] = 0.0;
    std::size_t from = old == 0 ? 1 : old + 1;
    for (std::size_t n = from; n <= upto; ++n)
      dense_[n] = n <= spec_.n_max ? tab_[n] : std::exp(log_c_ + log_f((double)n));
  }
  return {dense_.data(), upto + 1};
}

Interval Law::tail_power_sum(std::size_t m, double g) const {
  if (m == 0) m = 1;
  const double p = g * (1.0 + spec_.alpha);
  const double q = g * spec_.slow.exponent();
  if (!(p > 1.0))
    throw std::invalid_argument("tail_power_sum: g*(1+alpha) must exceed 1");
  const double cg = std::exp(g * log_c_);
  // far start: pure enclosure; otherwise exact partial out to the cutoff
  if (m > norm_cutoff_)
    return tail_log_power_sum((double)(m - 1), q, p).scaled(cg);
  KahanSum part;
  for (std::size_t n = m; n <= norm_cutoff_; ++n)
    part.add(std::exp(g * log_f((double)n)));
  Interval T = tail_log_power_sum((double)norm_cutoff_, q, p);
  double slack = part.value() * 5e-15;
  return Interval{part.value() - slack + T.lo, part.value() + slack + T.hi}.scaled(cg);
}

Interval Law::mean_tau() const {
  if (!(spec_.alpha > 1.0))
    throw std::invalid_argument("mean_tau: needs alpha > 1");
  const double p = spec_.alpha;  // n * n^{-(1+alpha)}
  const double q = spec_.slow.exponent();
  KahanSum part;
  for (std::size_t n = 1; n <= norm_cutoff_; ++n)
    part.add((double)n * std::exp(log_f((double)n)));
  Interval T = tail_log_power_sum((double)norm_cutoff_, q, p);
  double slack = part.value() * 5e-15;
  return Interval{part.value() - slack + T.lo, part.value() + slack + T.hi}.scaled(c_);
}

Interval Law::laplace(double lam) const {
  if (lam < 0) throw std::invalid_argument("laplace: lam must be >= 0");
  std::size_t C = norm_cutoff_;
  // adapt the truncation point: beyond n with lam*n >> 1 the remainder is
  // already far below the bracket we carry
  if (lam > 0) {
    double want = std::min((double)C, 64.0 / lam);
    C = (std::size_t)std::max(want, (double)spec_.n_max);
  }
  std::span<const double> d = dense(C);
  double part = simd::kernels().dot_expax(d.data() + 1, C, 0.0, -lam, 1);
  Interval rem = (C == norm_cutoff_ ? tail_at_cutoff_
                                    : tail_power_sum(C + 1, 1.0));
  double damp = std::exp(-lam * (double)(C + 1));
  return {part, part + rem.hi * damp};
}

}  // namespace pinlab
