#pragma once

#include <functional>

namespace deconv {

// Closed interval [lo, hi]. Results of every operation are widened outward
// by a relative 1e-13 unless built with DECONV_NO_INFLATION.
struct Interval {
  double lo = 0;
  double hi = 0;

  Interval() = default;
  Interval(double x) : lo(x), hi(x) {}  // NOLINT: implicit point intervals are convenient
  Interval(double a, double b);

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  double mag() const;  // max |x|
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains_zero() const { return lo <= 0.0 && 0.0 <= hi; }
};

Interval inflate(Interval x);

Interval iv_add(Interval a, Interval b);
Interval iv_neg(Interval a);
Interval iv_sub(Interval a, Interval b);
Interval iv_mul(Interval a, Interval b);
Interval iv_abs(Interval a);
// a^(2k) for k >= 1.
Interval iv_even_pow(Interval a, int k);
// Throws std::domain_error when 0 is inside a.
Interval iv_recip(Interval a);
Interval iv_div(Interval a, Interval b);
// g must be non-decreasing.
Interval iv_monotone(const std::function<double(double)>& g, Interval a);
Interval iv_exp(Interval a);
Interval iv_sqr(Interval a);
Interval iv_hull(Interval a, Interval b);
// Throws std::domain_error if the intersection is empty.
Interval iv_intersect(Interval a, Interval b);

inline Interval operator+(Interval a, Interval b) { return iv_add(a, b); }
inline Interval operator-(Interval a, Interval b) { return iv_sub(a, b); }
inline Interval operator-(Interval a) { return iv_neg(a); }
inline Interval operator*(Interval a, Interval b) { return iv_mul(a, b); }
inline Interval operator/(Interval a, Interval b) { return iv_div(a, b); }

}  // namespace deconv
