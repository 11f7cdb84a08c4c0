#include "deconv/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "deconv/rng.hpp"

namespace deconv {

AtomicMeasure::AtomicMeasure(std::vector<Spike> spikes) : spikes_(std::move(spikes)) {
  std::sort(spikes_.begin(), spikes_.end(),
            [](const Spike& a, const Spike& b) { return a.location < b.location; });
  for (std::size_t i = 0; i < spikes_.size(); ++i) {
    const Spike& s = spikes_[i];
    if (!std::isfinite(s.location) || !std::isfinite(s.amplitude)) {
      throw std::invalid_argument("spike with non-finite location or amplitude");
    }
    if (s.amplitude == 0.0) throw std::invalid_argument("spike with zero amplitude");
    if (i > 0 && !(spikes_[i - 1].location < s.location)) {
      throw std::invalid_argument("duplicate spike location");
    }
  }
}

std::vector<double> AtomicMeasure::locations() const {
  std::vector<double> out;
  out.reserve(spikes_.size());
  for (const auto& s : spikes_) out.push_back(s.location);
  return out;
}

Eigen::VectorXd AtomicMeasure::amplitudes() const {
  Eigen::VectorXd a(static_cast<Eigen::Index>(spikes_.size()));
  for (std::size_t i = 0; i < spikes_.size(); ++i) a[static_cast<Eigen::Index>(i)] = spikes_[i].amplitude;
  return a;
}

SampleSet::SampleSet(std::vector<double> locations, std::vector<std::size_t> noise_indices)
    : locations_(std::move(locations)), noise_(std::move(noise_indices)) {
  for (std::size_t i = 0; i < locations_.size(); ++i) {
    if (!std::isfinite(locations_[i])) throw std::invalid_argument("non-finite sample location");
    if (i > 0 && !(locations_[i - 1] < locations_[i])) {
      throw std::invalid_argument("sample locations must be strictly increasing");
    }
  }
  std::sort(noise_.begin(), noise_.end());
  if (std::adjacent_find(noise_.begin(), noise_.end()) != noise_.end()) {
    throw std::invalid_argument("duplicate noise index");
  }
  if (!noise_.empty() && noise_.back() >= locations_.size()) {
    throw std::invalid_argument("noise index out of range");
  }
}

bool SampleSet::is_noise(std::size_t i) const {
  return std::binary_search(noise_.begin(), noise_.end(), i);
}

Grid::Grid(std::vector<double> points) : points_(std::move(points)) {
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i - 1] < points_[i])) throw std::invalid_argument("grid must be strictly increasing");
  }
}

Grid Grid::uniform(double a, double b, std::size_t n) {
  if (n == 0) throw std::invalid_argument("empty grid");
  if (n == 1) return Grid({a});
  if (!(b > a)) throw std::invalid_argument("grid interval must have b > a");
  std::vector<double> p(n);
  const double h = (b - a) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) p[i] = a + h * static_cast<double>(i);
  p.back() = b;
  return Grid(std::move(p));
}

std::size_t Grid::nearest(double x) const {
  if (points_.empty()) throw std::logic_error("nearest on empty grid");
  auto it = std::lower_bound(points_.begin(), points_.end(), x);
  if (it == points_.end()) return points_.size() - 1;
  const auto i = static_cast<std::size_t>(it - points_.begin());
  if (i > 0 && x - points_[i - 1] <= points_[i] - x) return i - 1;
  return i;
}

double min_separation(const std::vector<double>& locations) {
  std::vector<double> t = locations;
  std::sort(t.begin(), t.end());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < t.size(); ++i) best = std::min(best, t[i] - t[i - 1]);
  return best;
}

double min_separation(const AtomicMeasure& mu) { return min_separation(mu.locations()); }

namespace {

// Distance from t to its second-nearest sample; samples are sorted.
double second_nearest(const std::vector<double>& s, double t) {
  const auto it = std::lower_bound(s.begin(), s.end(), t);
  const auto idx = static_cast<std::ptrdiff_t>(it - s.begin());
  const auto n = static_cast<std::ptrdiff_t>(s.size());
  double d[4];
  int m = 0;
  for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, idx - 2); j < std::min(n, idx + 2); ++j) {
    d[m++] = std::abs(t - s[static_cast<std::size_t>(j)]);
  }
  std::sort(d, d + m);
  return d[1];
}

}  // namespace

double sample_proximity(const SampleSet& S, const std::vector<double>& T) {
  if (S.size() < 2) throw std::invalid_argument("sample proximity needs at least two samples");
  double gamma = 0.0;
  for (double t : T) gamma = std::max(gamma, second_nearest(S.locations(), t));
  return gamma;
}

double sample_proximity(const SampleSet& S, const AtomicMeasure& mu) {
  return sample_proximity(S, mu.locations());
}

double sample_separation(const SampleSet& S, const std::vector<double>& T, double gamma) {
  if (T.empty()) return std::numeric_limits<double>::infinity();
  if (gamma < sample_proximity(S, T)) {
    throw std::invalid_argument("gamma is below the sample proximity");
  }
  const auto& s = S.locations();
  double kappa = std::numeric_limits<double>::infinity();
  for (double t : T) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double x : s) {
      if (std::abs(t - x) <= gamma) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
    kappa = std::min(kappa, hi - lo);
  }
  return kappa;
}

double sample_separation(const SampleSet& S, const AtomicMeasure& mu, double gamma) {
  return sample_separation(S, mu.locations(), gamma);
}

Eigen::VectorXd convolve_samples(const KernelSpec& k, const AtomicMeasure& mu, const SampleSet& S) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(S.size()));
  for (std::size_t i = 0; i < S.size(); ++i) {
    double acc = 0.0;
    for (const auto& sp : mu.spikes()) acc += sp.amplitude * kernel_eval(k, S[i] - sp.location, 0);
    y[static_cast<Eigen::Index>(i)] = acc;
  }
  return y;
}

Eigen::MatrixXd design_matrix(const KernelSpec& k, const SampleSet& S, const Grid& G) {
  Eigen::MatrixXd A(static_cast<Eigen::Index>(S.size()), static_cast<Eigen::Index>(G.size()));
  for (std::size_t j = 0; j < G.size(); ++j) {
    for (std::size_t i = 0; i < S.size(); ++i) {
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = kernel_eval(k, S[i] - G[j], 0);
    }
  }
  return A;
}

double ErrorReport::max_amplitude_error() const {
  double m = 0.0;
  for (double e : amplitude_error) m = std::max(m, e);
  return m;
}

ErrorReport error_report(const AtomicMeasure& mu_hat, const AtomicMeasure& mu, double eta_sigma) {
  if (!(eta_sigma > 0.0)) throw std::invalid_argument("eta_sigma must be positive");
  if (!(eta_sigma < min_separation(mu) / 2.0)) {
    throw std::invalid_argument("eta_sigma must be below half the minimum separation");
  }
  const auto T = mu.locations();
  ErrorReport r;
  r.eta_sigma = eta_sigma;
  std::vector<double> cluster(T.size(), 0.0);
  r.nearest_distance.assign(T.size(), std::numeric_limits<double>::infinity());
  for (const auto& est : mu_hat.spikes()) {
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < T.size(); ++j) {
      const double d = std::abs(est.location - T[j]);
      if (d < bd) {  // strict: ties stay with the left spike
        bd = d;
        best = j;
      }
      r.nearest_distance[j] = std::min(r.nearest_distance[j], d);
    }
    if (!T.empty() && bd <= eta_sigma) {
      cluster[best] += est.amplitude;
      const double off = est.location - T[best];
      r.clustered_mass += std::abs(est.amplitude) * off * off;
    } else {
      r.far_mass += std::abs(est.amplitude);
    }
  }
  r.amplitude_error.resize(T.size());
  for (std::size_t j = 0; j < T.size(); ++j) r.amplitude_error[j] = std::abs(mu[j].amplitude - cluster[j]);
  return r;
}

WorstCasePattern worst_case_pattern(std::size_t num_spikes, double delta, double gamma,
                                    double jitter_frac, std::uint64_t seed, double origin) {
  if (!(delta > 2.0 * gamma)) throw std::invalid_argument("worst-case pattern needs delta > 2 gamma");
  if (!(gamma > 0.0) || jitter_frac < 0.0) throw std::invalid_argument("invalid pattern parameters");
  Rng rng(seed);
  std::vector<Spike> spikes;
  std::vector<double> samples;
  for (std::size_t j = 0; j < num_spikes; ++j) {
    const double t = origin + delta * static_cast<double>(j) + rng.uniform(-1.0, 1.0) * jitter_frac * delta;
    spikes.push_back({t, (j % 2 == 0) ? 1.0 : -1.0});
    const double left = gamma * (1.0 + rng.uniform(-1.0, 1.0) * jitter_frac);
    const double right = gamma * (1.0 + rng.uniform(-1.0, 1.0) * jitter_frac);
    samples.push_back(t - left);
    samples.push_back(t + right);
  }
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i - 1] < samples[i])) throw std::invalid_argument("sample pairs overlap");
  }
  return {AtomicMeasure(std::move(spikes)), SampleSet(std::move(samples))};
}

double relative_error(const Eigen::VectorXd& x, const Eigen::VectorXd& x0) {
  const double n0 = x0.norm();
  if (n0 == 0.0) return x.norm();
  return (x - x0).norm() / n0;
}

}  // namespace deconv
