#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "deconv/kernels.hpp"
#include "deconv/l1_solver.hpp"
#include "deconv/signal_model.hpp"

namespace deconv {

// A synthetic problem on [0, 1]. Spikes sit on grid points so that exact
// recovery on the grid is possible.
struct RecoveryInstance {
  KernelSpec kernel;
  Grid grid;
  AtomicMeasure mu;
  SampleSet samples;
  Eigen::VectorXd noise;  // sparse corruption per sample; empty when noiseless
  std::vector<std::size_t> spike_index;  // grid index of each spike
};

Eigen::VectorXd measurements(const RecoveryInstance& inst);
Eigen::VectorXd true_coefficients(const RecoveryInstance& inst);

// Two samples per spike at distance gamma (jittered by 1%), spikes Delta
// apart (jittered by 1%), alternating signs. Delta and gamma in units of sigma.
RecoveryInstance worst_case_instance(const KernelSpec& k, std::size_t grid_n, std::size_t num_spikes,
                                     double delta, double gamma, std::uint64_t seed, std::uint64_t cell = 0,
                                     std::uint64_t trial = 0);

// Same spikes, samples on a uniform grid of the given step (units of sigma).
RecoveryInstance uniform_instance(const KernelSpec& k, std::size_t grid_n, std::size_t num_spikes, double delta,
                                  double step, std::uint64_t seed, std::uint64_t cell = 0, std::uint64_t trial = 0);

// Gaussian amplitudes, uniform samples of the given step, and `corruptions`
// randomly chosen samples per segment of length Delta carrying N(0,1) noise.
RecoveryInstance sparse_instance(const KernelSpec& k, std::size_t grid_n, std::size_t num_spikes, double delta,
                                 double step, std::size_t corruptions, std::uint64_t seed, std::uint64_t cell = 0,
                                 std::uint64_t trial = 0);

struct RecoveryOutcome {
  bool recovered = false;
  double rel_error = 0;  // relative l2 error of the grid coefficients
  SolveResult result;
  KktReport kkt;
};

// BasisPursuit when lambda is empty, SparseNoise otherwise.
RecoveryOutcome run_recovery(const RecoveryInstance& inst, std::optional<double> lambda, double tol,
                             const SolveOptions& opts = {});

// Instances with one spike or one corruption removed (measurements recomputed).
std::vector<RecoveryInstance> trimmed_instances(const RecoveryInstance& inst);

struct ConditioningRow {
  int m = 0;
  double delta0 = 0;
  double step = 0;
  double sv_min = 0;
  double sv_mid = 0;
};

// m points at spacing delta0/2 (jitter up to 2.5% of delta0), n = 10m
// uniform samples over the support padded by 3 sigma on each side, or at
// `step` when given. Singular values averaged over trials. Units of sigma.
ConditioningRow conditioning_point(KernelFamily family, int m, double delta0, std::optional<double> step,
                                   int trials, std::uint64_t seed, std::uint64_t cell = 0);

struct PhaseCell {
  double x = 0, y = 0;
  double fraction = 0;
  double fraction_monotonized = 0;
};

// fraction_monotonized(x, y) = min over x' >= x, y' <= y. Cells must form a
// full grid.
void monotonize_phase(std::vector<PhaseCell>& cells);

}  // namespace deconv
