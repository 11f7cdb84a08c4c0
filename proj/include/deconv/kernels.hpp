#pragma once

#include <string>

namespace deconv {

enum class KernelFamily { Gaussian, Ricker };

struct KernelSpec {
  KernelFamily family = KernelFamily::Gaussian;
  double sigma = 1.0;
};

KernelSpec make_kernel(KernelFamily family, double sigma);
KernelFamily parse_family(const std::string& name);
std::string family_name(KernelFamily family);

// Highest derivative order kernel_eval supports for the family.
int max_order(KernelFamily family);

// Derivative of the unit-width kernel at u.
double kernel_unit(KernelFamily family, double u, int order);

// K^(order)(t) for a kernel of width sigma.
double kernel_eval(const KernelSpec& k, double t, int order = 0);

// Denominator of the bump/wave coefficients; s1, s2 are offsets from the
// spike, divided by sigma internally.
double denom(const KernelSpec& k, double s1, double s2);

struct BumpWaveCoeffs {
  double b1 = 0, b2 = 0;
  double w1 = 0, w2 = 0;
  double t_i = 0;
  double s1 = 0, s2 = 0;
};

// Throws SingularError when |denom| < 1e-12 and std::domain_error when a
// Ricker sample sits at or beyond the kernel root.
BumpWaveCoeffs bump_wave_coeffs(const KernelSpec& k, double t_i, double s1, double s2);

// d^order/dt^order of b1 K(s1-t) + b2 K(s2-t).
double eval_bump(const BumpWaveCoeffs& c, const KernelSpec& k, double t, int order = 0);
double eval_wave(const BumpWaveCoeffs& c, const KernelSpec& k, double t, int order = 0);

// d^order/dt^order K(s - t).
inline double shifted_kernel(const KernelSpec& k, double s, double t, int order) {
  const double v = kernel_eval(k, s - t, order);
  return (order % 2 == 0) ? v : -v;
}

// Upper bound on sup_u |K^(order)(u)| for the unit-width kernel.
double kernel_abs_max(KernelFamily family, int order);

}  // namespace deconv
