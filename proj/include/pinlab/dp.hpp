#pragma once
#include <span>
#include <vector>

#include "pinlab/kernels.hpp"

namespace pinlab {

enum class DpMode { auto_select, logspace, blockscaled };

// Pinned-endpoint partition recursion
//   W_0 = 1,   W_m = z_m * sum_{j<m} W_j k(m-j),   m = 1..len
// computed in the log domain.  `logz` has size len+1; entry m is log z_m
// (entry 0 is ignored).  Returns log W_0..len.
//
// `logspace` is the direct log-sum-exp recursion.  `blockscaled` keeps
// finished 64-row blocks as linear-space weights normalized by the block
// maximum, so most of the inner loop is plain fused multiply-add; the two
// agree to ~1e-10 in log W and are equivalence-tested against each other.
std::vector<double> pin_dp(const Law& law, std::span<const double> logz,
                           DpMode mode = DpMode::auto_select);

// convenience: constant weight log z_m = logz_const
std::vector<double> pin_dp_const(const Law& law, std::size_t len,
                                 double logz_const,
                                 DpMode mode = DpMode::auto_select);

}  // namespace pinlab
