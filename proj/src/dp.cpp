#include "pinlab/dp.hpp"

#include <cmath>
#include <stdexcept>

#include "pinlab/simd/kernels.hpp"

namespace pinlab {
namespace {

constexpr std::size_t kBlock = 64;

std::vector<double> dp_logspace(const Law& law, std::span<const double> logz) {
  const std::size_t len = logz.size() - 1;
  const double* lk = law.log_table().data();
  const auto& kr = simd::kernels();
  std::vector<double> lw(len + 1);
  lw[0] = 0.0;
  for (std::size_t m = 1; m <= len; ++m) {
    double mx = kr.max_add_rev(lw.data(), lk + m, m);
    double s = kr.sum_exp_add_rev(lw.data(), lk + m, m, mx);
    lw[m] = logz[m] + mx + std::log(s);
  }
  return lw;
}

std::vector<double> dp_blockscaled(const Law& law, std::span<const double> logz) {
  const std::size_t len = logz.size() - 1;
  const double* kt = law.table().data();
  const double* lk = law.log_table().data();
  const auto& kr = simd::kernels();

  std::vector<double> lw(len + 1);
  lw[0] = 0.0;
  // finished blocks, rescaled into linear space: wn[j] = exp(lw[j] - cb[j/B])
  std::vector<double> wn(len + 1, 0.0);
  std::vector<double> cb;
  std::vector<double> dots;  // per-row scratch
  std::size_t sealed = 0;    // j < sealed live in wn/cb

  for (std::size_t m = 1; m <= len; ++m) {
    while (sealed + kBlock <= m) {
      double mx = simd::max_val(lw.data() + sealed, kBlock);
      for (std::size_t j = sealed; j < sealed + kBlock; ++j)
        wn[j] = std::exp(lw[j] - mx);
      cb.push_back(mx);
      sealed += kBlock;
    }
    const std::size_t nblocks = sealed / kBlock;
    dots.resize(nblocks);
    double cmax = -HUGE_VAL;
    for (std::size_t b = 0; b < nblocks; ++b) {
      std::size_t j0 = b * kBlock;
      dots[b] = kr.dot_rev(wn.data() + j0, kt + (m - j0), kBlock);
      if (dots[b] > 0.0 && cb[b] > cmax) cmax = cb[b];
    }
    double mant_b = 0.0;
    if (nblocks) {
      for (std::size_t b = 0; b < nblocks; ++b)
        if (dots[b] > 0.0) mant_b += dots[b] * std::exp(cb[b] - cmax);
    }
    // unfinished tail rows in log space
    double mant_p = 0.0, mp = -HUGE_VAL;
    if (sealed < m) {
      mp = kr.max_add_rev(lw.data() + sealed, lk + (m - sealed), m - sealed);
      mant_p = kr.sum_exp_add_rev(lw.data() + sealed, lk + (m - sealed),
                                  m - sealed, mp);
    }
    double top = std::max(cmax, mp);
    double mant = 0.0;
    if (mant_b > 0.0) mant += mant_b * std::exp(cmax - top);
    if (mant_p > 0.0) mant += mant_p * std::exp(mp - top);
    lw[m] = logz[m] + top + std::log(mant);
  }
  return lw;
}

}  // namespace

std::vector<double> pin_dp(const Law& law, std::span<const double> logz,
                           DpMode mode) {
  if (logz.empty()) throw std::invalid_argument("pin_dp: logz must have size len+1");
  const std::size_t len = logz.size() - 1;
  if (len > law.n_max())
    throw std::invalid_argument("pin_dp: window exceeds law table length");
  for (std::size_t m = 1; m <= len; ++m)
    if (!std::isfinite(logz[m]))
      throw std::invalid_argument("pin_dp: weights must be finite");
  if (mode == DpMode::auto_select)
    mode = len < 4 * kBlock ? DpMode::logspace : DpMode::blockscaled;
  return mode == DpMode::logspace ? dp_logspace(law, logz)
                                  : dp_blockscaled(law, logz);
}

std::vector<double> pin_dp_const(const Law& law, std::size_t len,
                                 double logz_const, DpMode mode) {
  std::vector<double> lz(len + 1, logz_const);
  lz[0] = 0.0;
  return pin_dp(law, lz, mode);
}

}  // namespace pinlab
