#include "deconv/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "deconv/rng.hpp"

namespace deconv {

namespace {

double standard_normal(Rng& rng) {
  double a = 0.0;
  while (a == 0.0) {
    const double u1 = rng.uniform(), u2 = rng.uniform();
    a = std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  return a;
}

double spikes_origin(std::size_t num_spikes, double delta_abs) {
  const double span = static_cast<double>(num_spikes) * delta_abs;
  if (!(span < 1.0)) throw std::invalid_argument("spikes do not fit in [0, 1]");
  return 0.5 * (1.0 - span) + 0.5 * delta_abs;
}

std::vector<double> uniform_samples(double step_abs) {
  if (!(step_abs > 0.0)) throw std::invalid_argument("sample step must be positive");
  std::vector<double> s;
  for (std::size_t i = 0;; ++i) {
    const double x = static_cast<double>(i) * step_abs;
    if (x > 1.0 + 1e-12) break;
    s.push_back(x);
  }
  return s;
}

// Snaps spikes to the grid and records their indices.
void place_on_grid(RecoveryInstance& inst, const std::vector<Spike>& spikes) {
  std::vector<Spike> snapped;
  for (const auto& sp : spikes) {
    const std::size_t idx = inst.grid.nearest(sp.location);
    snapped.push_back({inst.grid[idx], sp.amplitude});
  }
  inst.mu = AtomicMeasure(snapped);
  inst.spike_index.clear();
  for (const auto& sp : inst.mu.spikes()) inst.spike_index.push_back(inst.grid.nearest(sp.location));
}

}  // namespace

Eigen::VectorXd measurements(const RecoveryInstance& inst) {
  Eigen::VectorXd y = convolve_samples(inst.kernel, inst.mu, inst.samples);
  if (inst.noise.size() > 0) y += inst.noise;
  return y;
}

Eigen::VectorXd true_coefficients(const RecoveryInstance& inst) {
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(inst.grid.size()));
  for (std::size_t j = 0; j < inst.mu.size(); ++j) {
    x0[static_cast<Eigen::Index>(inst.spike_index[j])] = inst.mu[j].amplitude;
  }
  return x0;
}

RecoveryInstance worst_case_instance(const KernelSpec& k, std::size_t grid_n, std::size_t num_spikes,
                                     double delta, double gamma, std::uint64_t seed, std::uint64_t cell,
                                     std::uint64_t trial) {
  RecoveryInstance inst;
  inst.kernel = k;
  inst.grid = Grid::uniform(0.0, 1.0, grid_n);
  const double d = delta * k.sigma, g = gamma * k.sigma;
  Rng rng(seed, cell, trial);
  const auto pat = worst_case_pattern(num_spikes, d, g, 0.01, rng.next(), spikes_origin(num_spikes, d));
  place_on_grid(inst, pat.mu.spikes());
  // Move each sample pair with its spike so the proximity is unchanged.
  std::vector<double> s = pat.samples.locations();
  for (std::size_t j = 0; j < num_spikes; ++j) {
    const double shift = inst.mu[j].location - pat.mu[j].location;
    s[2 * j] += shift;
    s[2 * j + 1] += shift;
  }
  inst.samples = SampleSet(s);
  return inst;
}

RecoveryInstance uniform_instance(const KernelSpec& k, std::size_t grid_n, std::size_t num_spikes, double delta,
                                  double step, std::uint64_t seed, std::uint64_t cell, std::uint64_t trial) {
  RecoveryInstance inst;
  inst.kernel = k;
  inst.grid = Grid::uniform(0.0, 1.0, grid_n);
  const double d = delta * k.sigma;
  Rng rng(seed, cell, trial);
  const double origin = spikes_origin(num_spikes, d);
  std::vector<Spike> spikes;
  for (std::size_t j = 0; j < num_spikes; ++j) {
    const double t = origin + d * static_cast<double>(j) + rng.uniform(-1.0, 1.0) * 0.01 * d;
    spikes.push_back({t, (j % 2 == 0) ? 1.0 : -1.0});
  }
  place_on_grid(inst, spikes);
  inst.samples = SampleSet(uniform_samples(step * k.sigma));
  return inst;
}

RecoveryInstance sparse_instance(const KernelSpec& k, std::size_t grid_n, std::size_t num_spikes, double delta,
                                 double step, std::size_t corruptions, std::uint64_t seed, std::uint64_t cell,
                                 std::uint64_t trial) {
  RecoveryInstance inst;
  inst.kernel = k;
  inst.grid = Grid::uniform(0.0, 1.0, grid_n);
  const double d = delta * k.sigma;
  Rng rng(seed, cell, trial);
  const double origin = spikes_origin(num_spikes, d);
  std::vector<Spike> spikes;
  for (std::size_t j = 0; j < num_spikes; ++j) {
    const double t = origin + d * static_cast<double>(j) + rng.uniform(-1.0, 1.0) * 0.01 * d;
    spikes.push_back({t, standard_normal(rng)});
  }
  place_on_grid(inst, spikes);
  const std::vector<double> s = uniform_samples(step * k.sigma);
  inst.noise = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.size()));
  std::vector<std::size_t> noisy;
  // Segments of length Delta tile [0, 1]; each gets `corruptions` distinct samples.
  for (double a = 0.0; a < 1.0; a += d) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] >= a && s[i] < a + d) idx.push_back(i);
    }
    for (std::size_t c = 0; c < corruptions && !idx.empty(); ++c) {
      const std::size_t pick = static_cast<std::size_t>(rng.below(idx.size()));
      noisy.push_back(idx[pick]);
      inst.noise[static_cast<Eigen::Index>(idx[pick])] = standard_normal(rng);
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(pick));
    }
  }
  std::sort(noisy.begin(), noisy.end());
  inst.samples = SampleSet(s, noisy);
  return inst;
}

RecoveryOutcome run_recovery(const RecoveryInstance& inst, std::optional<double> lambda, double tol,
                             const SolveOptions& opts) {
  const Eigen::MatrixXd A = design_matrix(inst.kernel, inst.samples, inst.grid);
  const Eigen::VectorXd y = measurements(inst);
  RecoveryOutcome out;
  ProgramSpec spec;
  if (lambda) {
    spec.kind = Program::SparseNoise;
    spec.lambda = *lambda;
    out.result = sparse_bp(A, y, *lambda, opts);
  } else {
    out.result = basis_pursuit(A, y, opts);
  }
  out.kkt = kkt_report(A, y, out.result, spec);
  out.rel_error = relative_error(out.result.x, true_coefficients(inst));
  out.recovered = out.rel_error < tol;
  return out;
}

std::vector<RecoveryInstance> trimmed_instances(const RecoveryInstance& inst) {
  std::vector<RecoveryInstance> out;
  for (std::size_t j = 0; j < inst.mu.size(); ++j) {
    RecoveryInstance t = inst;
    std::vector<Spike> spikes = inst.mu.spikes();
    spikes.erase(spikes.begin() + static_cast<std::ptrdiff_t>(j));
    t.mu = AtomicMeasure(spikes);
    t.spike_index.erase(t.spike_index.begin() + static_cast<std::ptrdiff_t>(j));
    out.push_back(std::move(t));
  }
  const auto& noisy = inst.samples.noise_indices();
  for (std::size_t c = 0; c < noisy.size(); ++c) {
    RecoveryInstance t = inst;
    t.noise[static_cast<Eigen::Index>(noisy[c])] = 0.0;
    std::vector<std::size_t> rest = noisy;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(c));
    t.samples = SampleSet(inst.samples.locations(), rest);
    out.push_back(std::move(t));
  }
  return out;
}

ConditioningRow conditioning_point(KernelFamily family, int m, double delta0, std::optional<double> step,
                                   int trials, std::uint64_t seed, std::uint64_t cell) {
  if (m < 2 || trials < 1 || !(delta0 > 0.0)) throw std::invalid_argument("invalid conditioning parameters");
  const KernelSpec k = make_kernel(family, 1.0);
  ConditioningRow row;
  row.m = m;
  row.delta0 = delta0;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(seed, cell, static_cast<std::uint64_t>(trial));
    std::vector<double> t(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) t[static_cast<std::size_t>(j)] = 0.5 * delta0 * j + rng.uniform(-1.0, 1.0) * 0.0125 * delta0;
    const double a = t.front() - 3.0, b = t.back() + 3.0;
    std::vector<double> s;
    if (step) {
      for (double x = a; x <= b + 1e-12; x += *step) s.push_back(x);
    } else {
      const int n = 10 * m;
      for (int i = 0; i < n; ++i) s.push_back(a + (b - a) * i / (n - 1));
    }
    row.step = s.size() > 1 ? s[1] - s[0] : 0.0;
    Eigen::MatrixXd M(static_cast<Eigen::Index>(s.size()), m);
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (int j = 0; j < m; ++j) M(static_cast<Eigen::Index>(i), j) = kernel_eval(k, s[i] - t[static_cast<std::size_t>(j)]);
    }
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues();
    row.sv_min += sv[sv.size() - 1] / trials;
    row.sv_mid += sv[sv.size() / 2] / trials;
  }
  return row;
}

void monotonize_phase(std::vector<PhaseCell>& cells) {
  for (auto& c : cells) {
    double v = c.fraction;
    for (const auto& o : cells) {
      if (o.x >= c.x && o.y <= c.y) v = std::min(v, o.fraction);
    }
    c.fraction_monotonized = v;
  }
}

}  // namespace deconv
