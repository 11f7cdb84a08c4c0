#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "deconv/csv_io.hpp"
#include "deconv/errors.hpp"
#include "deconv/signal_model.hpp"

using namespace deconv;

namespace {

const KernelSpec kG{KernelFamily::Gaussian, 1.0};

// Exhaustive reading of the proximity and separation definitions.
double brute_proximity(const std::vector<double>& s, const std::vector<double>& T) {
  double g = 0;
  for (double t : T) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < s.size(); ++a) {
      for (std::size_t b = a + 1; b < s.size(); ++b) {
        best = std::min(best, std::max(std::abs(s[a] - t), std::abs(s[b] - t)));
      }
    }
    g = std::max(g, best);
  }
  return g;
}

double brute_separation(const std::vector<double>& s, const std::vector<double>& T, double gamma) {
  double k = std::numeric_limits<double>::infinity();
  for (double t : T) {
    double best = 0;
    for (std::size_t a = 0; a < s.size(); ++a) {
      for (std::size_t b = a + 1; b < s.size(); ++b) {
        if (std::abs(s[a] - t) <= gamma && std::abs(s[b] - t) <= gamma) best = std::max(best, std::abs(s[a] - s[b]));
      }
    }
    k = std::min(k, best);
  }
  return k;
}

}  // namespace

TEST_CASE("measure and sample invariants") {
  CHECK_THROWS_AS(AtomicMeasure({{0.0, 1.0}, {0.0, 2.0}}), std::invalid_argument);
  CHECK_THROWS_AS(AtomicMeasure({{0.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(SampleSet({0.2, 0.1}), std::invalid_argument);
  const AtomicMeasure mu({{3.0, 1.0}, {0.0, -1.0}});
  CHECK(mu[0].location == 0.0);
}

TEST_CASE("min_separation examples") {
  CHECK(min_separation(AtomicMeasure({{0, 1}, {1, 1}, {3, 1}})) == 1.0);
  CHECK(std::isinf(min_separation(AtomicMeasure({{0.5, 1}}))));
  CHECK(min_separation(std::vector<double>{0, 0.4, 0.8}) == doctest::Approx(0.4));
}

TEST_CASE("sample_proximity examples") {
  CHECK(sample_proximity(SampleSet({-0.3, 0.5, 2}), std::vector<double>{0}) == doctest::Approx(0.5));
  CHECK(sample_proximity(SampleSet({-0.1, 0.1, 4.9, 5.2}), std::vector<double>{0, 5}) == doctest::Approx(0.2));
  CHECK_THROWS_AS(sample_proximity(SampleSet({0.1}), std::vector<double>{0}), std::invalid_argument);
}

TEST_CASE("sample_separation examples") {
  CHECK(sample_separation(SampleSet({-0.1, 0.1}), std::vector<double>{0}, 0.1) == doctest::Approx(0.2));
  CHECK(sample_separation(SampleSet({-0.1, 0.09, 0.1}), std::vector<double>{0}, 0.1) == doctest::Approx(0.2));
  CHECK(sample_separation(SampleSet({-0.1, 0.1, 0.95, 1.0}), std::vector<double>{0, 1}, 0.1) ==
        doctest::Approx(0.05));
  CHECK_THROWS_AS(sample_separation(SampleSet({-0.3, 0.3}), std::vector<double>{0}, 0.1), std::invalid_argument);
}

TEST_CASE("proximity and separation match exhaustive enumeration") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> U(0.0, 10.0);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> s(2 + gen() % 29), T(1 + gen() % 8);
    for (auto& x : s) x = U(gen);
    for (auto& x : T) x = U(gen);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    if (s.size() < 2) continue;
    const SampleSet S(s);
    const double g = sample_proximity(S, T);
    CHECK(g == brute_proximity(s, T));
    CHECK(sample_separation(S, T, g) == brute_separation(s, T, g));
    CHECK(sample_separation(S, T, g + 0.5) == brute_separation(s, T, g + 0.5));
  }
}

TEST_CASE("convolve_samples examples") {
  const SampleSet S({0.0, 1.0, 2.0});
  CHECK(convolve_samples(kG, AtomicMeasure(), S).isZero(0.0));
  CHECK(convolve_samples(kG, AtomicMeasure({{1.0, 1.0}}), S)[1] == doctest::Approx(1.0));
  CHECK(std::abs(convolve_samples(kG, AtomicMeasure({{0, 1}, {2, -1}}), SampleSet({1.0}))[0]) < 1e-15);
}

TEST_CASE("design_matrix examples and consistency") {
  const Eigen::MatrixXd A1 = design_matrix(kG, SampleSet({0.3}), Grid({0.3}));
  CHECK(A1(0, 0) == 1.0);
  CHECK(design_matrix(kG, SampleSet({0.0}), Grid({1.0}))(0, 0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  const KernelSpec k{KernelFamily::Gaussian, 0.1};
  const Grid G = Grid::uniform(0, 1, 101);
  const SampleSet S({0.05, 0.21, 0.33, 0.48, 0.62, 0.9});
  const Eigen::MatrixXd A = design_matrix(k, S, G);
  CHECK(A.cwiseAbs().maxCoeff() <= 1.0);
  const AtomicMeasure mu({{G[20], 1.5}, {G[55], -0.7}, {G[80], 2.0}});
  Eigen::VectorXd a = Eigen::VectorXd::Zero(101);
  a[20] = 1.5;
  a[55] = -0.7;
  a[80] = 2.0;
  CHECK((A * a - convolve_samples(k, mu, S)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("error_report examples") {
  const AtomicMeasure mu({{0.0, 1.0}, {1.0, -1.0}});
  const auto same = error_report(mu, mu, 0.05);
  CHECK(same.max_amplitude_error() == 0.0);
  CHECK(same.clustered_mass == 0.0);
  CHECK(same.far_mass == 0.0);
  const auto far = error_report(AtomicMeasure({{0.0, 1.0}, {0.5, 0.1}, {1.0, -1.0}}), mu, 0.05);
  CHECK(far.far_mass == doctest::Approx(0.1));
  CHECK(far.max_amplitude_error() == 0.0);
  CHECK(far.clustered_mass == 0.0);
  const auto split = error_report(AtomicMeasure({{0.01, 0.6}, {-0.02, 0.5}}), AtomicMeasure({{0.0, 1.0}}), 0.05);
  CHECK(split.amplitude_error[0] == doctest::Approx(0.1));
  CHECK(split.clustered_mass == doctest::Approx(0.6 * 1e-4 + 0.5 * 4e-4));
  CHECK(split.far_mass == 0.0);
  CHECK_THROWS_AS(error_report(mu, mu, 0.6), std::invalid_argument);
}

TEST_CASE("worst_case_pattern") {
  const auto p0 = worst_case_pattern(5, 4.0, 0.3, 0.0, 1);
  for (std::size_t j = 0; j < 5; ++j) {
    CHECK(p0.mu[j].location == doctest::Approx(4.0 * j));
    CHECK(p0.samples[2 * j] == doctest::Approx(4.0 * j - 0.3));
    CHECK(p0.samples[2 * j + 1] == doctest::Approx(4.0 * j + 0.3));
    CHECK(p0.mu[j].amplitude == (j % 2 == 0 ? 1.0 : -1.0));
  }
  const auto p1 = worst_case_pattern(10, 4.0, 0.3, 0.01, 9);
  const auto p2 = worst_case_pattern(10, 4.0, 0.3, 0.01, 9);
  CHECK(p1.samples.locations() == p2.samples.locations());
  CHECK(p1.mu.locations() == p2.mu.locations());
  CHECK(sample_proximity(p1.samples, p1.mu) <= 0.3 * 1.01 + 1e-15);
  CHECK_THROWS_AS(worst_case_pattern(3, 0.5, 0.3), std::invalid_argument);
}

TEST_CASE("csv round trips") {
  const AtomicMeasure mu({{0.125, 1.0 / 3.0}, {0.5, -2.0}});
  std::stringstream ss;
  write_measure(ss, mu);
  const AtomicMeasure back = read_measure(ss);
  CHECK(back.locations() == mu.locations());
  CHECK(back[0].amplitude == mu[0].amplitude);
  const SampleSet S({0.1, 0.2, 0.3}, {1});
  std::stringstream st;
  write_samples(st, S);
  const SampleSet Sb = read_samples(st);
  CHECK(Sb.locations() == S.locations());
  CHECK(Sb.is_noise(1));
  CHECK_FALSE(Sb.is_noise(0));
  std::stringstream bad("location,amplitude\n0.1,abc\n");
  CHECK_THROWS_AS(read_measure(bad), ParseError);
  std::stringstream comment("# note\nlocation\n0.5\n");
  CHECK(read_samples(comment).size() == 1);
}
