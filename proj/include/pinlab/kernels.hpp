#pragma once
#include <cstddef>
#include <cstdint>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "pinlab/brackets.hpp"

namespace pinlab {

enum class SlowKind { constant, log_power };

// slowly varying factor: 1, or (log(1+x))^b
struct SlowSpec {
  SlowKind kind = SlowKind::constant;
  double b = 0.0;

  double log_value(double x) const;
  double value(double x) const;
  // exponent that actually multiplies log log(1+x); 0 for the constant kind
  double exponent() const { return kind == SlowKind::constant ? 0.0 : b; }
};

struct LawSpec {
  double alpha = 1.5;
  SlowSpec slow{};
  std::size_t n_max = 65536;      // dense table length kept in memory
  double tol = 1e-8;              // demanded relative width of the mass bracket
  std::size_t cutoff = 1'000'000; // series cutoff before integral enclosures

  std::string id() const;  // canonical text form, used for cache keys
};

// snapshot of everything the normalization pass produced, for byte-exact
// reuse of a law across runs
struct LawTableCache {
  double c = 0.0;
  double log_c = 0.0;
  Interval mass{};
  std::uint64_t norm_cutoff = 0;
  Interval tail_at_cutoff{};
  std::vector<double> table;  // k(1..n_max)
};

// Inter-arrival law k(n) = c * L(n) * n^{-(1+alpha)}, n >= 1, normalized so
// that the total mass is 1 up to a certified bracket of relative width <= tol.
class Law {
 public:
  explicit Law(LawSpec spec);
  // restore from a cache snapshot instead of renormalizing
  Law(LawSpec spec, const LawTableCache& cache);
  LawTableCache export_cache() const;

  const LawSpec& spec() const { return spec_; }
  double alpha() const { return spec_.alpha; }
  std::size_t n_max() const { return spec_.n_max; }
  double c() const { return c_; }
  double log_c() const { return log_c_; }
  // bracket on sum_n k(n); contains 1 by construction
  Interval mass() const { return mass_; }

  double k(std::size_t n) const;
  double log_k(std::size_t n) const;
  // [0] is 0 / -inf, entries 1..n_max usable
  std::span<const double> table() const { return tab_; }
  std::span<const double> log_table() const { return log_tab_; }

  // certified bracket on sum_{n>=m} k(n)^g, g*(1+alpha) > 1
  Interval tail_power_sum(std::size_t m, double g) const;
  // certified bracket on sum_n n*k(n); requires alpha > 1
  Interval mean_tau() const;
  // certified bracket on sum_n k(n) e^{-lam*n}, lam >= 0
  Interval laplace(double lam) const;

  // k(n) for n = 0..upto as a dense vector (lazily grown, cached)
  std::span<const double> dense(std::size_t upto) const;

 private:
  double log_f(double n) const;  // log of unnormalized L(n) n^{-(1+alpha)}
  LawSpec spec_;
  double c_ = 0.0, log_c_ = 0.0;
  Interval mass_{};
  std::size_t norm_cutoff_ = 0;     // cutoff the mass bracket was settled at
  Interval tail_at_cutoff_{};       // sum_{n>norm_cutoff} k(n), certified
  std::vector<double> tab_, log_tab_;
  mutable std::vector<double> dense_;
  mutable std::mutex dense_mu_;
};

// certified enclosure of sum_{n=C+1}^inf (log(1+n))^q n^{-p}, p > 1
Interval tail_log_power_sum(double C, double q, double p);
// certified enclosure of int_A^inf (log(1+x))^q x^{-p} dx, p > 1
Interval tail_log_power_integral(double A, double q, double p);

}  // namespace pinlab
