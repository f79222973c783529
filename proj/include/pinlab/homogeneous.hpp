#pragma once
#include <cstddef>

#include "pinlab/dp.hpp"
#include "pinlab/kernels.hpp"

namespace pinlab {

struct PureSolveOptions {
  double f_rel_tol = 1e-10;  // demanded relative width of the F bracket
  int max_iter = 200;
  bool verify = false;  // cross-check the root against a DP slope
};

struct PureSolveResult {
  double h = 0.0;
  double f = 0.0;            // free energy F(h); 0 for h <= 0
  Interval f_bracket{};      // certified enclosure of the root
  double residual = 0.0;     // series-equation defect at f, incl. truncation
  std::size_t series_cutoff = 0;
  int iterations = 0;
  double correlation_length = 0.0;  // 1/f; inf when f == 0
  // set when verify: two-point log-partition slope and its agreement
  double dp_slope = 0.0;
  double dp_slope_rel_err = 0.0;
  bool verified = false;
};

// Free energy of the pure model: the unique F >= 0 with
// sum_n k(n) e^{-F n} = e^{-h} (h > 0), else 0.  Root-finding by bisection on
// a certified enclosure of the Laplace series: exact head summation plus a
// geometric-block bracket of the tail, so the reported bracket is honest.
PureSolveResult pure_free_energy(const Law& law, double h,
                                 PureSolveOptions opts = {});

// log Z_N(h) with pinned endpoint, via the renewal DP
double pure_log_partition(const Law& law, double h, std::size_t N,
                          DpMode mode = DpMode::auto_select);
std::vector<double> pure_log_partition_curve(const Law& law, double h,
                                             std::size_t N,
                                             DpMode mode = DpMode::auto_select);

// certified enclosure of sum_n k(n) e^{-F n} for F >= 0
Interval ghat(const Law& law, double F);

// max over 1 <= j <= min(1/F(0,h), horizon) of Z_j(h) j^{1-alpha} L(j);
// stays bounded as h drops to 0 (alpha in (0,1))
struct PinnedBoundCheck {
  double h = 0.0;
  double f = 0.0;
  std::size_t j_cap = 0;      // min(1/F, horizon)
  double max_value = 0.0;     // empirical constant
  std::size_t argmax = 0;
};
PinnedBoundCheck pinned_partition_bound_check(const Law& law, double h,
                                              std::size_t horizon);

// divergent prefactor r(N) for the moderate-deviation check below
enum class DriftR { log_n, log_log_n, sqrt_log_n };

// Z_N(-N^{-alpha} L(N) r(N)) * L(N) r(N)^2 N^{1-alpha} -> 1, alpha in (0,1);
// requires r(N) L(N) / N^alpha small at the given N
double negative_drift_asymptotic_ratio(const Law& law, std::size_t N,
                                       DriftR r = DriftR::log_n);

// numeric inverse of b -> b^alpha L(1/b) on a decreasing b-grid
// (alpha in (0,1)); eval() interpolates R(y) ~ b with R(b^alpha L(1/b)) = b
class RAlphaTable {
 public:
  RAlphaTable(const Law& law, std::span<const double> b_grid);
  double eval(double y) const;  // linear interpolation in log-log
  std::size_t size() const { return y_.size(); }

 private:
  std::vector<double> y_, b_;  // increasing in y
};

}  // namespace pinlab
