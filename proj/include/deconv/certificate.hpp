#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "deconv/kernels.hpp"
#include "deconv/signal_model.hpp"

namespace deconv {

// Dual combination Q(t) = sum_i q_i K(s_i - t) built from one bump and one
// wave per spike. samples[2j], samples[2j+1] belong to support[j].
struct Certificate {
  std::vector<double> support;
  std::vector<double> samples;
  std::vector<int> rho;
  Eigen::VectorXd alpha, beta;
  Eigen::VectorXd q;
  std::vector<BumpWaveCoeffs> coeffs;
  double condition = 0;
};

// Two samples per spike: the pair within gamma with the largest gap (at
// least kappa), ties going to the pair nearer the spike.
std::vector<double> select_certificate_samples(const SampleSet& S, const std::vector<double>& T, double gamma,
                                               double kappa);

// Solves Q(t_j) = rho_j, Q'(t_j) = 0. Entries of rho may be 0.
Certificate build_certificate(const KernelSpec& k, const std::vector<double>& T, const std::vector<double>& samples,
                              const std::vector<int>& rho);

// Same system with arbitrary right-hand sides Q(t_j) = values_j, Q'(t_j) = slopes_j.
Certificate build_interpolant(const KernelSpec& k, const std::vector<double>& T, const std::vector<double>& samples,
                              const Eigen::VectorXd& values, const Eigen::VectorXd& slopes);

// Only bumps, fitted to Q(t_j) = rho_j; the derivative conditions are dropped.
Certificate build_bumps_only(const KernelSpec& k, const std::vector<double>& T, const std::vector<double>& samples,
                             const std::vector<int>& rho);

double eval_Q(const Certificate& cert, const KernelSpec& k, double t, int order = 0);

// sum_j alpha_j B_j(t) + beta_j W_j(t), evaluated through the bumps and waves.
double eval_bump_wave_sum(const Certificate& cert, const KernelSpec& k, double t, int order = 0);

struct VerificationReport {
  bool pass = false;
  bool interpolation_ok = false;
  bool off_support_ok = false;
  bool concavity_ok = false;
  bool tail_ok = false;
  // Sparse certificates only; true otherwise.
  bool noise_equality_ok = true;
  bool coefficient_bound_ok = true;

  double max_abs_off_support = 0;  // continuum bound, including the tail
  double worst_location = 0;
  double grid_step = 0;
  double excl_radius = 0;
  double second_derivative_bound = 0;
  double third_derivative_bound = 0;
  double tail_bound = 0;
  double interpolation_residual = 0;
  double derivative_residual = 0;
  // Measured stand-ins for the existential constants of the robustness analysis.
  double min_curvature = 0;     // min_j -rho_j Q''(t_j) over rho_j != 0
  double off_support_gap = 0;   // 1 - max_abs_off_support
  double q_inf = 0;
  double max_clean_q = 0;       // sparse: max |q_l| off the noise set
};

// grid_step and excl_radius are absolute lengths.
VerificationReport verify_certificate(const Certificate& cert, const KernelSpec& k, double grid_step,
                                      double excl_radius);

// K(s_i - t) - B_{s_i}(t; s_prev, s_next), differentiated order times.
double dampened_kernel(const KernelSpec& k, double s_i, double s_prev, double s_next, double t, int order = 0);

struct SparseCertificate {
  Certificate base;  // the part supported on the interpolation samples
  std::vector<double> sample_locations;  // all of S
  std::vector<std::size_t> noise;        // indices into S
  std::vector<int> rho_prime;
  double lambda = 0;
  std::vector<std::size_t> interp_idx;   // two per spike
  std::vector<std::size_t> clean_idx;    // previous and next clean sample per corruption
  std::vector<BumpWaveCoeffs> noise_bumps;
  Eigen::VectorXd psi, zeta;
  Eigen::VectorXd q;  // over all of S
};

// noise holds indices into S, rho_prime one sign per corruption. S must be
// sorted (SampleSet guarantees this).
SparseCertificate build_sparse_certificate(const KernelSpec& k, const std::vector<double>& T, const SampleSet& S,
                                           const std::vector<std::size_t>& noise, const std::vector<int>& rho,
                                           const std::vector<int>& rho_prime, double lambda);

double eval_sparse_Q(const SparseCertificate& sc, const KernelSpec& k, double t, int order = 0);

// Sum of the dampened kernels lambda rho'_i D_{s_i}.
double eval_dampened_sum(const SparseCertificate& sc, const KernelSpec& k, double t, int order = 0);

VerificationReport verify_sparse_certificate(const SparseCertificate& sc, const KernelSpec& k, double grid_step,
                                             double excl_radius);

void write_certificate_csv(std::ostream& out, const std::vector<double>& samples, const Eigen::VectorXd& q);
void write_report(std::ostream& out, const VerificationReport& r);

}  // namespace deconv
