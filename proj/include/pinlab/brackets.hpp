#pragma once
#include <algorithm>
#include <cmath>

namespace pinlab {

// closed interval [lo, hi]; the certified-bracket primitive used everywhere a
// truncated series is replaced by an enclosure
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
  double rel_width() const {
    double m = std::fabs(mid());
    return m > 0 ? width() / m : width();
  }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool valid() const { return lo <= hi; }

  Interval operator+(const Interval& o) const { return {lo + o.lo, hi + o.hi}; }
  Interval operator+(double s) const { return {lo + s, hi + s}; }
  Interval scaled(double s) const {
    return s >= 0 ? Interval{lo * s, hi * s} : Interval{hi * s, lo * s};
  }
  Interval operator*(const Interval& o) const {
    double a = lo * o.lo, b = lo * o.hi, c = hi * o.lo, d = hi * o.hi;
    return {std::min(std::min(a, b), std::min(c, d)),
            std::max(std::max(a, b), std::max(c, d))};
  }
  static Interval point(double x) { return {x, x}; }
  static Interval hull(const Interval& a, const Interval& b) {
    return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
  }
};

}  // namespace pinlab
