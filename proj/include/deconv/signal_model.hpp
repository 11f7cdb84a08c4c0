#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "deconv/kernels.hpp"

namespace deconv {

struct Spike {
  double location = 0;
  double amplitude = 0;
};

class AtomicMeasure {
 public:
  AtomicMeasure() = default;
  // Spikes are sorted by location; duplicates or zero amplitudes throw.
  explicit AtomicMeasure(std::vector<Spike> spikes);

  const std::vector<Spike>& spikes() const { return spikes_; }
  std::size_t size() const { return spikes_.size(); }
  bool empty() const { return spikes_.empty(); }
  const Spike& operator[](std::size_t i) const { return spikes_[i]; }

  std::vector<double> locations() const;
  Eigen::VectorXd amplitudes() const;

 private:
  std::vector<Spike> spikes_;
};

class SampleSet {
 public:
  SampleSet() = default;
  SampleSet(std::vector<double> locations, std::vector<std::size_t> noise_indices = {});

  const std::vector<double>& locations() const { return locations_; }
  const std::vector<std::size_t>& noise_indices() const { return noise_; }
  std::size_t size() const { return locations_.size(); }
  double operator[](std::size_t i) const { return locations_[i]; }
  bool is_noise(std::size_t i) const;

 private:
  std::vector<double> locations_;
  std::vector<std::size_t> noise_;
};

class Grid {
 public:
  Grid() = default;
  explicit Grid(std::vector<double> points);
  // n points on [a, b] inclusive.
  static Grid uniform(double a, double b, std::size_t n);

  const std::vector<double>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }
  // Index of the grid point nearest to x.
  std::size_t nearest(double x) const;

 private:
  std::vector<double> points_;
};

// +infinity for fewer than two spikes.
double min_separation(const AtomicMeasure& mu);
double min_separation(const std::vector<double>& locations);

double sample_proximity(const SampleSet& S, const std::vector<double>& T);
double sample_proximity(const SampleSet& S, const AtomicMeasure& mu);

double sample_separation(const SampleSet& S, const std::vector<double>& T, double gamma);
double sample_separation(const SampleSet& S, const AtomicMeasure& mu, double gamma);

Eigen::VectorXd convolve_samples(const KernelSpec& k, const AtomicMeasure& mu, const SampleSet& S);

Eigen::MatrixXd design_matrix(const KernelSpec& k, const SampleSet& S, const Grid& G);

struct ErrorReport {
  double eta_sigma = 0;
  // |a_j - sum of estimated amplitudes within eta_sigma of t_j|, per spike.
  std::vector<double> amplitude_error;
  // sum over attached estimates of |a_hat| (t_hat - t_j)^2.
  double clustered_mass = 0;
  // total |a_hat| of estimates farther than eta_sigma from every spike.
  double far_mass = 0;
  // distance from each spike to its nearest estimate (inf if none).
  std::vector<double> nearest_distance;

  double max_amplitude_error() const;
};

ErrorReport error_report(const AtomicMeasure& mu_hat, const AtomicMeasure& mu, double eta_sigma);

struct WorstCasePattern {
  AtomicMeasure mu;
  SampleSet samples;
};

// Spikes origin + j*delta with uniform jitter of jitter_frac*delta, alternating
// unit amplitudes, and two samples at distance gamma(1 +- jitter_frac) on
// either side of each spike.
WorstCasePattern worst_case_pattern(std::size_t num_spikes, double delta, double gamma,
                                    double jitter_frac = 0.01, std::uint64_t seed = 0,
                                    double origin = 0.0);

// Relative l2 error between amplitude vectors: ||x - x0|| / ||x0||.
double relative_error(const Eigen::VectorXd& x, const Eigen::VectorXd& x0);

}  // namespace deconv
