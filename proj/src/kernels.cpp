#include "deconv/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "deconv/errors.hpp"

namespace deconv {

namespace {

constexpr double kSingularThreshold = 1e-12;

// Hermite-type factor h_n with d^n/du^n exp(-u^2/2) = (-1)^n h_n(u) exp(-u^2/2).
double hermite(int n, double u) {
  const double u2 = u * u;
  switch (n) {
    case 0: return 1.0;
    case 1: return u;
    case 2: return u2 - 1.0;
    case 3: return u * (u2 - 3.0);
    case 4: return u2 * u2 - 6.0 * u2 + 3.0;
    case 5: return u * (u2 * u2 - 10.0 * u2 + 15.0);
    case 6: return u2 * u2 * u2 - 15.0 * u2 * u2 + 45.0 * u2 - 15.0;
    default: throw std::invalid_argument("hermite order out of range");
  }
}

double gaussian_deriv(double u, int n) {
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return sign * hermite(n, u) * std::exp(-0.5 * u * u);
}

}  // namespace

KernelSpec make_kernel(KernelFamily family, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("kernel width must be positive");
  }
  return KernelSpec{family, sigma};
}

KernelFamily parse_family(const std::string& name) {
  if (name == "gaussian" || name == "Gaussian" || name == "G") return KernelFamily::Gaussian;
  if (name == "ricker" || name == "Ricker" || name == "R") return KernelFamily::Ricker;
  throw std::invalid_argument("unknown kernel family: " + name);
}

std::string family_name(KernelFamily family) {
  return family == KernelFamily::Gaussian ? "gaussian" : "ricker";
}

int max_order(KernelFamily family) { return family == KernelFamily::Gaussian ? 4 : 2; }

double kernel_unit(KernelFamily family, double u, int order) {
  if (order < 0) throw std::invalid_argument("negative derivative order");
  if (family == KernelFamily::Gaussian) {
    if (order > 6) throw std::invalid_argument("Gaussian derivative order too large");
    return gaussian_deriv(u, order);
  }
  // Ricker is minus the second derivative of the Gaussian.
  if (order > 4) throw std::invalid_argument("Ricker derivative order too large");
  return -gaussian_deriv(u, order + 2);
}

double kernel_eval(const KernelSpec& k, double t, int order) {
  if (order < 0 || order > max_order(k.family)) {
    throw std::invalid_argument("unsupported derivative order " + std::to_string(order));
  }
  return kernel_unit(k.family, t / k.sigma, order) / std::pow(k.sigma, order);
}

double denom(const KernelSpec& k, double s1, double s2) {
  const double u1 = s1 / k.sigma, u2 = s2 / k.sigma;
  const double e = std::exp(-0.5 * (u1 * u1 + u2 * u2));
  if (k.family == KernelFamily::Gaussian) return (u2 - u1) * e;
  const double d = u1 - u2;
  return (u2 - u1) * (3.0 - d * d + u1 * u1 * u2 * u2) * e;
}

BumpWaveCoeffs bump_wave_coeffs(const KernelSpec& k, double t_i, double s1, double s2) {
  const double u1 = (s1 - t_i) / k.sigma, u2 = (s2 - t_i) / k.sigma;
  if (k.family == KernelFamily::Ricker && (std::abs(u1) >= 1.0 || std::abs(u2) >= 1.0)) {
    throw std::domain_error("Ricker sample at or beyond the kernel root");
  }
  const double d = denom(k, s1 - t_i, s2 - t_i);
  if (!(std::abs(d) >= kSingularThreshold)) {
    throw SingularError("bump/wave denominator vanishes", std::abs(d));
  }
  const double k1 = kernel_unit(k.family, u1, 0), k2 = kernel_unit(k.family, u2, 0);
  const double d1 = kernel_unit(k.family, u1, 1), d2 = kernel_unit(k.family, u2, 1);
  BumpWaveCoeffs c;
  c.t_i = t_i;
  c.s1 = s1;
  c.s2 = s2;
  c.b1 = -d2 / d;
  c.b2 = d1 / d;
  // Unit slope in absolute units.
  c.w1 = -k2 / d * k.sigma;
  c.w2 = k1 / d * k.sigma;
  return c;
}

double eval_bump(const BumpWaveCoeffs& c, const KernelSpec& k, double t, int order) {
  return c.b1 * shifted_kernel(k, c.s1, t, order) + c.b2 * shifted_kernel(k, c.s2, t, order);
}

double eval_wave(const BumpWaveCoeffs& c, const KernelSpec& k, double t, int order) {
  return c.w1 * shifted_kernel(k, c.s1, t, order) + c.w2 * shifted_kernel(k, c.s2, t, order);
}

double kernel_abs_max(KernelFamily family, int order) {
  // Gaussian orders 0..5; rounded up in the last digit.
  static constexpr double kGauss[] = {1.0, 0.60653066, 1.0, 1.38011905, 3.0, 5.78305696};
  const int g = family == KernelFamily::Gaussian ? order : order + 2;
  if (order < 0 || g > 5) throw std::invalid_argument("order out of range for kernel_abs_max");
  return kGauss[g];
}

}  // namespace deconv
