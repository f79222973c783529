#pragma once
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace pinlab {

// two-sided 99% normal quantile, used for every confidence interval we report
inline constexpr double kZ99 = 2.5758293035489004;

struct MomentEstimate {
  double point = 0.0;
  double stderr_ = 0.0;  // 0 for exact/deterministic values
  std::size_t replicas = 0;
  double confidence = 0.99;

  double upper() const { return point + kZ99 * stderr_; }
  double lower() const { return point - kZ99 * stderr_; }
  bool exact() const { return stderr_ == 0.0; }
};

inline MomentEstimate mean_and_stderr(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean_and_stderr: empty sample");
  double m = 0.0;
  for (double v : x) m += v;
  m /= (double)x.size();
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  double se = x.size() > 1
                  ? std::sqrt(ss / ((double)x.size() * (double)(x.size() - 1)))
                  : 0.0;
  return {m, se, x.size(), 0.99};
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  std::size_t n = 0;
};

// ordinary least squares y ~ a + b x with the usual residual-based stderr on b
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need >=2 paired points");
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= (double)n;
  my /= (double)n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate x");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.n = n;
  if (n > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = y[i] - (f.intercept + f.slope * x[i]);
      rss += r * r;
    }
    f.slope_stderr = std::sqrt(rss / ((double)(n - 2) * sxx));
  }
  return f;
}

// compensated (Kahan) accumulator for long series sums
struct KahanSum {
  double s = 0.0, c = 0.0;
  void add(double v) {
    double y = v - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  double value() const { return s; }
};

}  // namespace pinlab
