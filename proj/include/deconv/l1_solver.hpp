#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace deconv {

enum class Program { BasisPursuit, Bpdn, SparseNoise };

struct SolveOptions {
  int max_iters = 200000;
  // Stopping tolerance on relative primal infeasibility and duality gap.
  double tol = 1e-8;
  // Ratio of primal to dual step; both steps multiply to 0.95 / ||K||^2.
  double step_ratio = 1.0;
  // Equality constraints are a ball of this radius times ||y||.
  double eq_radius_rel = 1e-9;
  int power_iters = 200;
  // Support-restricted refinement attempted every check_every iterations.
  bool polish = true;
  int check_every = 50;
  double recovery_rel_tol = 1e-4;
  double support_threshold = 1e-7;
  // Equality programs with at most exact_max_size matrix entries that have
  // not converged after exact_after iterations are finished by simplex.
  int exact_after = 20000;
  long exact_max_size = 200000;
};

struct SolveResult {
  Eigen::VectorXd x;
  std::optional<Eigen::VectorXd> w;
  // Dual vector in the convention max q'y s.t. |A'q| <= 1, scaled to be feasible.
  Eigen::VectorXd q;
  double objective = 0;
  int iterations = 0;
  bool converged = false;
  bool polished = false;
  double primal_residual = 0;
  double gap = 0;
};

struct ProgramSpec {
  Program kind = Program::BasisPursuit;
  double xi_bar = 0;
  double lambda = 0;
};

// Throws InfeasibleError if y is not in the range of A.
SolveResult basis_pursuit(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const SolveOptions& opts = {});
SolveResult bpdn(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, double xi_bar, const SolveOptions& opts = {});
SolveResult sparse_bp(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, double lambda, const SolveOptions& opts = {});
SolveResult solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const ProgramSpec& spec, const SolveOptions& opts = {});

struct KktReport {
  double max_dual_response = 0;  // max_j |(A'q)_j|
  double q_inf = 0;
  double lambda = 0;
  double dual_violation = 0;     // amount by which the dual constraints are exceeded
  double primal_objective = 0;
  double dual_objective = 0;
  double gap = 0;
  double constraint_residual = 0;
  double complementary_slackness = 0;
};

KktReport kkt_report(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const SolveResult& result,
                     const ProgramSpec& spec);

// Indices with |x_j| >= rel * ||x||_inf (empty for x = 0).
std::vector<std::size_t> support_of(const Eigen::VectorXd& x, double rel = 1e-7);

// Largest singular value of A by power iteration on A A'.
double operator_norm(const Eigen::MatrixXd& A, int iters = 200);

}  // namespace deconv
