#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "deconv/interval.hpp"
#include "deconv/kernels.hpp"

namespace deconv {

// All lengths in units of sigma. Sample cells V_k split [-gamma, gamma] into
// 2*N2 pieces; t-cells U_j split [0, 10) into N1 pieces.
struct BoundConfig {
  double gamma = 0.3;
  double kappa = 0.05;
  double Delta = 3.5;
  int N1 = 875;
  int N2 = 150;
  // Sparse mode: sample grid step tau in [tau1, tau2]; gamma and kappa are
  // then taken as tau2 and tau1.
  bool sparse = false;
  double tau1 = 0;
  double tau2 = 0;
  double lambda = 2.0;
};

// Partition counts for the default widths (t-cell 8/700, sample cell
// 1/500 Gaussian or 0.7/500 Ricker) coarsened by `coarsen` (4 = quarter resolution).
void set_default_partition(KernelFamily family, BoundConfig& cfg, double coarsen = 1.0);

// Throws ConfigError when the invariants do not hold.
void validate_config(KernelFamily family, const BoundConfig& cfg);

// phi_n(u) = P_n(u) exp(-u^2/2) where P_n(u) exp(-u^2/2) is d^n/dt^n K(s - t)
// at u = s - t. Exact range over an interval up to rounding.
Interval phi_range(KernelFamily family, int n, Interval u);
double phi_point(KernelFamily family, int n, double u);

struct BoundTable {
  KernelFamily family = KernelFamily::Gaussian;
  double gamma = 0, kappa = 0;
  int N1 = 0, N2 = 0;
  double t_width = 0;
  double epsilon = 0;
  double tail_constant = 0;  // C in C t^4 exp(t - t^2/2) / kappa beyond t = 10
  // Indexed [order][cell].
  std::array<std::vector<double>, 3> abs_b, abs_w, signed_b;
  std::array<std::vector<double>, 3> mono_b, mono_w;
  // Sparse mode.
  bool has_d = false;
  double tau1 = 0, tau2 = 0;
  double epsilon_d = 0;
  std::array<std::vector<double>, 3> abs_d, mono_d;

  int cell_of(double t) const;
  // Monotonized bound at t >= 0: sup over u >= t. Beyond 10 this is the
  // analytic tail envelope, which stays below epsilon.
  double mono_b_at(int order, double t) const;
  double mono_w_at(int order, double t) const;
  double mono_d_at(int order, double t) const;
  double tail_envelope(double t) const;
  double tail_envelope_d(double t) const;
};

BoundTable piecewise_tables(const KernelSpec& k, const BoundConfig& cfg);

// Suffix maximum from the right, floored at epsilon.
std::vector<double> monotonize(const std::vector<double>& table, double epsilon);

struct BlockNorms {
  double I_B = 0;   // ||I - B||
  double W = 0;     // ||W||
  double B1 = 0;    // ||B'||
  double I_W1 = 0;  // ||I - W'||
};

BlockNorms block_norm_bounds(const BoundTable& table, double Delta);

struct SchurResult {
  bool invertible = false;
  double norm_W1inv = 0;
  double norm_IC = 0;
  double norm_Cinv = 0;
  double alpha_inf = 0;
  double beta_inf = 0;
  double alpha_minus_psi = 0;
};

// rhs = (||psi||, ||zeta||); defaults to the noiseless (1, 0).
SchurResult schur_bounds(const BlockNorms& norms, std::optional<std::array<double, 2>> rhs = std::nullopt);

struct QBounds {
  std::vector<double> lo, hi;  // cells covering (0, Delta/2]
  std::vector<double> abs_q, d1_upper, d2_upper;
};

// noise[p] is added to the order-p bound (sparse mode, else zeros).
QBounds q_function_bounds(const BoundTable& table, const SchurResult& coeffs, double alpha_lb, double Delta,
                          const std::array<double, 3>& noise = {0, 0, 0});

struct RegionReport {
  double Delta = 0, gamma = 0, kappa = 0;
  bool invertible = false;
  bool certified = false;
  std::string stage;  // where a failure happened, or "certified"
  BlockNorms norms;
  SchurResult schur;
  double alpha_minus_rho = 0;
  double alpha_lb = 0;
  double u1 = 0, u2 = 0, eta = 0;
  double q_bound = 0;
  double curvature_bound = 0;
  double gap_bound = 0;
  // Sparse mode.
  double psi_bound = 0, zeta_bound = 0;
  double contradiction = 0;       // with q_{i+1} K(tau) >= -||beta||/tau1
  double contradiction_tau2 = 0;  // same with tau2 in that one term
  bool sparse_q_ok = true;
};

// Region test on precomputed tables. Used by certify_point and region_sweep.
RegionReport certify_with_table(const BoundTable& table, double Delta);

RegionReport certify_point(const KernelSpec& k, const BoundConfig& cfg);

RegionReport certify_sparse_point(const KernelSpec& k, const BoundConfig& cfg);

// One table per gamma; partitions follow set_default_partition(coarsen).
std::vector<RegionReport> region_sweep(const KernelSpec& k, const std::vector<double>& Delta_grid,
                                       const std::vector<double>& gamma_grid, double kappa, double coarsen = 1.0);

void write_region_csv(std::ostream& out, const std::vector<RegionReport>& rows);
void write_region_report(std::ostream& out, const RegionReport& r);

}  // namespace deconv
