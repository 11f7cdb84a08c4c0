#include "deconv/interval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace deconv {

namespace {
#ifdef DECONV_NO_INFLATION
constexpr double kInflation = 0.0;
#else
constexpr double kInflation = 1e-13;
#endif
}  // namespace

Interval::Interval(double a, double b) : lo(a), hi(b) {
  if (!(a <= b)) throw std::invalid_argument("interval with lo > hi");
}

double Interval::mag() const { return std::max(std::abs(lo), std::abs(hi)); }

Interval inflate(Interval x) {
  x.lo -= std::abs(x.lo) * kInflation;
  x.hi += std::abs(x.hi) * kInflation;
  return x;
}

Interval iv_add(Interval a, Interval b) { return inflate({a.lo + b.lo, a.hi + b.hi}); }

Interval iv_neg(Interval a) { return {-a.hi, -a.lo}; }

Interval iv_sub(Interval a, Interval b) { return inflate({a.lo - b.hi, a.hi - b.lo}); }

Interval iv_mul(Interval a, Interval b) {
  const double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
  return inflate({std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})});
}

Interval iv_abs(Interval a) {
  if (a.lo >= 0.0) return a;
  if (a.hi <= 0.0) return iv_neg(a);
  return {0.0, std::max(-a.lo, a.hi)};
}

Interval iv_even_pow(Interval a, int k) {
  if (k < 1) throw std::invalid_argument("iv_even_pow needs k >= 1");
  const double x = std::pow(a.lo, 2 * k), y = std::pow(a.hi, 2 * k);
  if (a.contains_zero()) return inflate({0.0, std::max(x, y)});
  return inflate({std::min(x, y), std::max(x, y)});
}

Interval iv_recip(Interval a) {
  if (a.contains_zero()) throw std::domain_error("reciprocal of an interval containing 0");
  return inflate({1.0 / a.hi, 1.0 / a.lo});
}

Interval iv_div(Interval a, Interval b) { return iv_mul(a, iv_recip(b)); }

Interval iv_monotone(const std::function<double(double)>& g, Interval a) { return inflate({g(a.lo), g(a.hi)}); }

Interval iv_exp(Interval a) { return inflate({std::exp(a.lo), std::exp(a.hi)}); }

Interval iv_sqr(Interval a) { return iv_even_pow(a, 1); }

Interval iv_hull(Interval a, Interval b) { return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; }

Interval iv_intersect(Interval a, Interval b) {
  const double lo = std::max(a.lo, b.lo), hi = std::min(a.hi, b.hi);
  if (lo > hi) throw std::domain_error("empty interval intersection");
  return {lo, hi};
}

}  // namespace deconv
