#include <doctest.h>

#include <cmath>
#include <random>

#include "deconv/bound_engine.hpp"
#include "deconv/certificate.hpp"
#include "deconv/errors.hpp"
#include "deconv/experiments.hpp"
#include "deconv/l1_solver.hpp"

using namespace deconv;

namespace {

const KernelSpec kG{KernelFamily::Gaussian, 1.0};
const KernelSpec kR{KernelFamily::Ricker, 1.0};

struct Pattern {
  std::vector<double> T, samples;
  std::vector<int> rho;
};

Pattern pattern(std::size_t n, double delta, double gamma, std::uint64_t seed, bool random_signs = false) {
  const auto p = worst_case_pattern(n, delta, gamma, 0.01, seed);
  Pattern out{p.mu.locations(), p.samples.locations(), {}};
  std::mt19937_64 gen(seed);
  for (std::size_t j = 0; j < n; ++j) {
    out.rho.push_back(random_signs ? (gen() % 2 ? 1 : -1) : (p.mu[j].amplitude > 0 ? 1 : -1));
  }
  return out;
}

}  // namespace

TEST_CASE("sample selection examples") {
  CHECK(select_certificate_samples(SampleSet({-0.3, -0.1, 0.1}), {0.0}, 0.3, 0.05) ==
        std::vector<double>{-0.3, 0.1});
  CHECK_THROWS_AS(select_certificate_samples(SampleSet({0.01, 0.02}), {0.0}, 0.1, 0.05), SelectionError);
  const auto p = worst_case_pattern(6, 4.0, 0.3, 0.01, 3);
  const auto sel = select_certificate_samples(p.samples, p.mu.locations(), 0.3 * 1.01, 0.05);
  CHECK(sel == p.samples.locations());
}

TEST_CASE("single spike certificate is the bump") {
  const auto c = build_certificate(kG, {0.0}, {-0.4, 0.3}, {1});
  CHECK(c.alpha[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(c.beta[0]) < 1e-12);
}

TEST_CASE("interpolation and symmetry of Q") {
  const auto p = pattern(3, 3.5, 0.3, 1);
  const auto c = build_certificate(kG, p.T, p.samples, {1, -1, 1});
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(std::abs(eval_Q(c, kG, p.T[j]) - c.rho[j]) < 1e-8);
    CHECK(std::abs(eval_Q(c, kG, p.T[j], 1)) < 1e-8);
  }
  const auto s = build_certificate(kG, {0.0}, {-0.25, 0.25}, {1});
  for (double t = 0.1; t < 5; t += 0.3) CHECK(std::abs(eval_Q(s, kG, t) - eval_Q(s, kG, -t)) < 1e-12);
}

TEST_CASE("Q_j targets") {
  const auto p = pattern(4, 4.0, 0.3, 2);
  for (std::size_t j = 0; j < 4; ++j) {
    std::vector<int> e(4, 0);
    e[j] = 1;
    const auto c = build_certificate(kR, p.T, p.samples, e);
    for (std::size_t l = 0; l < 4; ++l) {
      CHECK(std::abs(eval_Q(c, kR, p.T[l]) - (l == j ? 1.0 : 0.0)) < 1e-8);
      CHECK(std::abs(eval_Q(c, kR, p.T[l], 1)) < 1e-8);
    }
  }
}

TEST_CASE("coefficients respect the bound engine at a certified point") {
  BoundConfig cfg;
  set_default_partition(KernelFamily::Gaussian, cfg, 4.0);
  const auto rep = certify_point(kG, cfg);
  REQUIRE(rep.certified);
  const auto p = pattern(3, 3.5, 0.3, 4);
  const auto c = build_certificate(kG, p.T, p.samples, {1, -1, 1});
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(c.alpha[j] - c.rho[static_cast<std::size_t>(j)]) <= rep.alpha_minus_rho);
    CHECK(std::abs(c.beta[j]) <= rep.schur.beta_inf);
  }
}

TEST_CASE("q expands alpha and beta") {
  const auto p = pattern(5, 4.0, 0.25, 6, true);
  for (const auto& k : {kG, kR}) {
    const auto c = build_certificate(k, p.T, p.samples, p.rho);
    for (double t = -3; t < 22; t += 0.173) {
      for (int order = 0; order <= 2; ++order) {
        CHECK(std::abs(eval_Q(c, k, t, order) - eval_bump_wave_sum(c, k, t, order)) < 1e-10);
      }
    }
  }
}

TEST_CASE("verification of the reference certificates") {
  for (const auto& [k, delta] : {std::pair{kG, 3.5}, std::pair{kR, 4.7}}) {
    const auto p = pattern(10, delta, 0.3, 7);
    const auto c = build_certificate(k, p.T, p.samples, p.rho);
    const auto r = verify_certificate(c, k, 1e-3, 1e-2);
    CHECK(r.pass);
    CHECK(r.max_abs_off_support <= 1 - 1e-6);
    CHECK(r.min_curvature > 0);
  }
}

TEST_CASE("bumps only is not a certificate") {
  const auto p = pattern(3, 3.5, 0.3, 8);
  const auto c = build_bumps_only(kG, p.T, p.samples, p.rho);
  CHECK_FALSE(verify_certificate(c, kG, 1e-3, 1e-2).pass);
}

TEST_CASE("far samples around a single spike give no certificate") {
  const auto c = build_certificate(kG, {0.0}, {-1.3, 1.3}, {1});
  const auto r = verify_certificate(c, kG, 1e-3, 1e-2);
  CHECK_FALSE(r.pass);
  CHECK_FALSE(r.concavity_ok);
}

TEST_CASE("certified region yields passing certificates") {
  for (std::uint64_t seed = 20; seed < 30; ++seed) {
    const auto p = pattern(8, 3.6, 0.28, seed, true);
    const auto c = build_certificate(kG, p.T, p.samples, p.rho);
    CHECK(verify_certificate(c, kG, 1e-3, 1e-2).pass);
  }
}

TEST_CASE("a passing certificate implies grid recovery") {
  const KernelSpec k{KernelFamily::Gaussian, 0.02};
  int checked = 0;
  for (std::uint64_t t = 0; t < 10; ++t) {
    const auto inst = worst_case_instance(k, 500, 4, 4.0, 0.3, 77, 0, t);
    std::vector<int> rho;
    for (const auto& sp : inst.mu.spikes()) rho.push_back(sp.amplitude > 0 ? 1 : -1);
    const auto c = build_certificate(k, inst.mu.locations(), inst.samples.locations(), rho);
    if (!verify_certificate(c, k, 1e-3 * k.sigma, 1e-2 * k.sigma).pass) continue;
    ++checked;
    CHECK(run_recovery(inst, std::nullopt, 1e-4).recovered);
  }
  CHECK(checked == 10);
}

TEST_CASE("dampened kernel") {
  CHECK(std::abs(dampened_kernel(kG, 0.4, 0.2, 0.6, 0.4)) < 1e-12);
  CHECK(std::abs(dampened_kernel(kG, 0.4, 0.2, 0.6, 0.4, 1)) < 1e-12);
  const double tau = 0.15;
  const double oracle = std::exp(-0.5) - 0.5 * std::exp(0.5 * tau * tau) *
                                             (std::exp(-0.5 * 1.15 * 1.15) + std::exp(-0.5 * 0.85 * 0.85));
  CHECK(dampened_kernel(kG, 0.0, -tau, tau, 1.0) == doctest::Approx(oracle).epsilon(1e-12));
}

namespace {

struct SparseSetup {
  SampleSet S;
  std::vector<double> T;
  std::vector<std::size_t> noise;
};

// One spike at 0.05 between samples on a 0.2 grid over [-3, 3].
SparseSetup one_spike(std::size_t corrupted) {
  std::vector<double> s;
  for (int i = -15; i <= 15; ++i) s.push_back(0.2 * i);
  return {SampleSet(s), {0.05}, {corrupted}};
}

}  // namespace

TEST_CASE("sparse certificate without corruptions reduces to the plain one") {
  const auto p = pattern(3, 4.0, 0.3, 9);
  const SampleSet S(p.samples);
  const auto sc = build_sparse_certificate(kG, p.T, S, {}, p.rho, {}, 2.0);
  const auto c = build_certificate(kG, p.T, p.samples, p.rho);
  REQUIRE(sc.q.size() == c.q.size());
  CHECK((sc.q - c.q).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sparse certificate with one corruption") {
  const auto su = one_spike(23);  // sample at 1.6
  const auto sc = build_sparse_certificate(kG, su.T, su.S, su.noise, {1}, {-1}, 2.0);
  CHECK(sc.q[23] == -2.0);
  CHECK(std::abs(eval_sparse_Q(sc, kG, 0.05) - 1.0) < 1e-8);
  CHECK(std::abs(eval_sparse_Q(sc, kG, 0.05, 1)) < 1e-8);
  const auto r = verify_sparse_certificate(sc, kG, 1e-3, 1e-2);
  CHECK(r.noise_equality_ok);
  CHECK(r.pass);
}

TEST_CASE("sparse certificate structure errors") {
  const auto su = one_spike(15);  // next to the spike
  CHECK_THROWS_AS(build_sparse_certificate(kG, su.T, su.S, su.noise, {1}, {1}, 2.0), StructureError);
  CHECK_THROWS_AS(build_sparse_certificate(kG, su.T, su.S, {0}, {1}, {1}, 2.0), StructureError);
}

TEST_CASE("small lambda violates the coefficient bound") {
  const auto su = one_spike(19);  // sample at 0.8, close to the spike
  const auto sc = build_sparse_certificate(kG, su.T, su.S, su.noise, {1}, {1}, 0.5);
  const auto r = verify_sparse_certificate(sc, kG, 1e-3, 1e-2);
  CHECK_FALSE(r.coefficient_bound_ok);
  CHECK_FALSE(r.pass);
}

TEST_CASE("clean data with lambda 2 passes with the base certificate") {
  const auto p = pattern(3, 4.0, 0.3, 10);
  const SampleSet S(p.samples);
  const auto sc = build_sparse_certificate(kG, p.T, S, {}, p.rho, {}, 2.0);
  const auto base = verify_certificate(build_certificate(kG, p.T, p.samples, p.rho), kG, 1e-3, 1e-2);
  CHECK(verify_sparse_certificate(sc, kG, 1e-3, 1e-2).pass == base.pass);
}
