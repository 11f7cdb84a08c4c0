#include "deconv/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "deconv/csv_io.hpp"
#include "deconv/errors.hpp"

namespace deconv {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kInterpTol = 1e-8;
constexpr double kMaxCondition = 1e12;
constexpr double kWindowSigmas = 10.0;

double combination(const std::vector<double>& s, const VectorXd& q, const KernelSpec& k, double t, int order) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double qi = q[static_cast<Index>(i)];
    if (qi != 0.0) acc += qi * shifted_kernel(k, s[i], t, order);
  }
  return acc;
}

// sup over |u| >= d of |K(u)| for the unit-width kernel.
double tail_sup(KernelFamily f, double d) {
  if (f == KernelFamily::Gaussian) return std::exp(-0.5 * d * d);
  if (d < std::sqrt(3.0)) return 1.0;
  return (d * d - 1.0) * std::exp(-0.5 * d * d);
}

Certificate solve_system(const KernelSpec& k, const std::vector<double>& T, const std::vector<double>& samples,
                         const VectorXd& values, const VectorXd& slopes, bool with_waves) {
  const std::size_t n = T.size();
  if (samples.size() != 2 * n) throw std::invalid_argument("need two samples per spike");
  if (static_cast<std::size_t>(values.size()) != n || static_cast<std::size_t>(slopes.size()) != n) {
    throw std::invalid_argument("right-hand side has the wrong length");
  }
  Certificate c;
  c.support = T;
  c.samples = samples;
  for (std::size_t j = 0; j < n; ++j) c.coeffs.push_back(bump_wave_coeffs(k, T[j], samples[2 * j], samples[2 * j + 1]));

  const Index N = static_cast<Index>(n);
  c.alpha = VectorXd::Zero(N);
  c.beta = VectorXd::Zero(N);
  if (n > 0) {
    if (with_waves) {
      MatrixXd M(2 * N, 2 * N);
      for (Index i = 0; i < N; ++i) {
        for (Index j = 0; j < N; ++j) {
          const auto& cj = c.coeffs[static_cast<std::size_t>(j)];
          const double t = T[static_cast<std::size_t>(i)];
          M(i, j) = eval_bump(cj, k, t, 0);
          M(i, N + j) = eval_wave(cj, k, t, 0);
          M(N + i, j) = eval_bump(cj, k, t, 1);
          M(N + i, N + j) = eval_wave(cj, k, t, 1);
        }
      }
      Eigen::JacobiSVD<MatrixXd> svd(M);
      const auto& sv = svd.singularValues();
      c.condition = sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1] : std::numeric_limits<double>::infinity();
      if (!(c.condition < kMaxCondition)) throw SingularError("interpolation system is singular", c.condition);
      VectorXd rhs(2 * N);
      rhs << values, slopes;
      const VectorXd sol = Eigen::PartialPivLU<MatrixXd>(M).solve(rhs);
      c.alpha = sol.head(N);
      c.beta = sol.tail(N);
    } else {
      MatrixXd M(N, N);
      for (Index i = 0; i < N; ++i) {
        for (Index j = 0; j < N; ++j) M(i, j) = eval_bump(c.coeffs[static_cast<std::size_t>(j)], k, T[static_cast<std::size_t>(i)], 0);
      }
      Eigen::JacobiSVD<MatrixXd> svd(M);
      const auto& sv = svd.singularValues();
      c.condition = sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1] : std::numeric_limits<double>::infinity();
      if (!(c.condition < kMaxCondition)) throw SingularError("interpolation system is singular", c.condition);
      c.alpha = Eigen::PartialPivLU<MatrixXd>(M).solve(values);
    }
  }
  c.q = VectorXd::Zero(2 * N);
  for (Index j = 0; j < N; ++j) {
    const auto& cj = c.coeffs[static_cast<std::size_t>(j)];
    c.q[2 * j] = c.alpha[j] * cj.b1 + c.beta[j] * cj.w1;
    c.q[2 * j + 1] = c.alpha[j] * cj.b2 + c.beta[j] * cj.w2;
  }
  return c;
}

VectorXd to_vector(const std::vector<int>& rho) {
  VectorXd v(static_cast<Index>(rho.size()));
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (rho[i] < -1 || rho[i] > 1) throw std::invalid_argument("sign pattern entries must be -1, 0 or 1");
    v[static_cast<Index>(i)] = rho[i];
  }
  return v;
}

struct Cell {
  double lo, hi;
};

// Everything verify needs about a dual combination.
struct Combination {
  const std::vector<double>& s;
  const VectorXd& q;
  const std::vector<double>& T;
  VectorXd values;  // targets Q(t_j)
  std::vector<int> rho;
};

VerificationReport verify_combination(const Combination& c, const KernelSpec& k, double grid_step,
                                      double excl_radius) {
  if (!(grid_step > 0.0)) throw std::invalid_argument("grid_step must be positive");
  if (excl_radius < 0.0) throw std::invalid_argument("excl_radius must be non-negative");
  VerificationReport r;
  r.grid_step = grid_step;
  r.excl_radius = excl_radius;
  const double sig = k.sigma;
  const double q1 = c.q.lpNorm<1>();
  r.q_inf = c.q.size() ? c.q.lpNorm<Eigen::Infinity>() : 0.0;
  r.second_derivative_bound = q1 * kernel_abs_max(k.family, 2) / (sig * sig);
  r.third_derivative_bound = q1 * kernel_abs_max(k.family, 3) / (sig * sig * sig);
  auto Q = [&](double t, int order) { return combination(c.s, c.q, k, t, order); };

  // Interpolation and vanishing slope on the support.
  r.interpolation_ok = true;
  for (std::size_t j = 0; j < c.T.size(); ++j) {
    const double e0 = std::abs(Q(c.T[j], 0) - c.values[static_cast<Index>(j)]);
    const double e1 = std::abs(Q(c.T[j], 1)) * sig;
    r.interpolation_residual = std::max(r.interpolation_residual, e0);
    r.derivative_residual = std::max(r.derivative_residual, e1);
  }
  r.interpolation_ok = r.interpolation_residual <= kInterpTol && r.derivative_residual <= kInterpTol;

  // Strict concavity of rho_j Q on each exclusion ball.
  r.concavity_ok = true;
  r.min_curvature = std::numeric_limits<double>::infinity();
  std::vector<Cell> balls;
  for (std::size_t j = 0; j < c.T.size(); ++j) {
    if (c.rho[j] == 0) continue;
    const double t = c.T[j];
    balls.push_back({t - excl_radius, t + excl_radius});
    r.min_curvature = std::min(r.min_curvature, -c.rho[j] * Q(t, 2) * sig * sig);
    const int n = std::max(1, static_cast<int>(std::ceil(2.0 * excl_radius / grid_step)));
    const double h = 2.0 * excl_radius / n;
    for (int i = 0; i < n; ++i) {
      const double mid = t - excl_radius + (i + 0.5) * h;
      if (c.rho[j] * Q(mid, 2) + 0.5 * h * r.third_derivative_bound >= 0.0) r.concavity_ok = false;
    }
  }
  if (balls.empty()) r.min_curvature = 0.0;

  // Off-support cells on the window, skipping the balls.
  double a = std::numeric_limits<double>::infinity(), b = -a;
  for (double t : c.T) {
    a = std::min(a, t);
    b = std::max(b, t);
  }
  for (double s : c.s) {
    a = std::min(a, s);
    b = std::max(b, s);
  }
  if (c.s.empty()) a = b = 0.0;
  a -= kWindowSigmas * sig;
  b += kWindowSigmas * sig;
  std::sort(balls.begin(), balls.end(), [](const Cell& x, const Cell& y) { return x.lo < y.lo; });
  std::vector<Cell> segments;
  double cur = a;
  for (const auto& ball : balls) {
    if (ball.lo > cur) segments.push_back({cur, ball.lo});
    cur = std::max(cur, ball.hi);
  }
  if (b > cur) segments.push_back({cur, b});

  double worst = 0.0, where = a;
  for (const auto& seg : segments) {
    const int n = std::max(1, static_cast<int>(std::ceil((seg.hi - seg.lo) / grid_step)));
    const double h = (seg.hi - seg.lo) / n;
    for (int i = 0; i < n; ++i) {
      const double mid = seg.lo + (i + 0.5) * h;
      const double bound =
          std::abs(Q(mid, 0)) + 0.5 * h * std::abs(Q(mid, 1)) + 0.125 * h * h * r.second_derivative_bound;
      if (bound > worst) {
        worst = bound;
        where = mid;
      }
    }
  }

  // Beyond the window every sample is at least its distance to the edge away.
  double left = 0.0, right = 0.0;
  for (std::size_t i = 0; i < c.s.size(); ++i) {
    const double qi = std::abs(c.q[static_cast<Index>(i)]);
    left += qi * tail_sup(k.family, std::max(0.0, c.s[i] - a) / sig);
    right += qi * tail_sup(k.family, std::max(0.0, b - c.s[i]) / sig);
  }
  r.tail_bound = std::max(left, right);
  r.tail_ok = r.tail_bound < 1.0;

  r.max_abs_off_support = std::max(worst, r.tail_bound);
  r.worst_location = worst >= r.tail_bound ? where : (left >= right ? a : b);
  r.off_support_ok = r.max_abs_off_support < 1.0;
  r.off_support_gap = 1.0 - r.max_abs_off_support;
  r.pass = r.interpolation_ok && r.concavity_ok && r.off_support_ok && r.tail_ok;
  return r;
}

}  // namespace

std::vector<double> select_certificate_samples(const SampleSet& S, const std::vector<double>& T, double gamma,
                                               double kappa) {
  std::vector<double> out;
  for (std::size_t j = 0; j < T.size(); ++j) {
    std::vector<double> near;
    for (double s : S.locations()) {
      if (std::abs(s - T[j]) <= gamma) near.push_back(s);
    }
    double best_gap = -1.0, best_dist = 0.0;
    double p1 = 0.0, p2 = 0.0;
    for (std::size_t a = 0; a < near.size(); ++a) {
      for (std::size_t b = a + 1; b < near.size(); ++b) {
        const double gap = near[b] - near[a];
        if (gap < kappa) continue;
        const double dist = std::abs(near[a] - T[j]) + std::abs(near[b] - T[j]);
        if (gap > best_gap || (gap == best_gap && dist < best_dist)) {
          best_gap = gap;
          best_dist = dist;
          p1 = near[a];
          p2 = near[b];
        }
      }
    }
    if (best_gap < 0.0) {
      throw SelectionError("no sample pair within gamma at distance kappa for spike " + std::to_string(j), j);
    }
    out.push_back(p1);
    out.push_back(p2);
  }
  return out;
}

Certificate build_certificate(const KernelSpec& k, const std::vector<double>& T, const std::vector<double>& samples,
                              const std::vector<int>& rho) {
  if (rho.size() != T.size()) throw std::invalid_argument("one sign per spike required");
  Certificate c = solve_system(k, T, samples, to_vector(rho), VectorXd::Zero(static_cast<Index>(T.size())), true);
  c.rho = rho;
  return c;
}

Certificate build_interpolant(const KernelSpec& k, const std::vector<double>& T, const std::vector<double>& samples,
                              const VectorXd& values, const VectorXd& slopes) {
  Certificate c = solve_system(k, T, samples, values, slopes, true);
  for (Index j = 0; j < values.size(); ++j) c.rho.push_back(values[j] > 0 ? 1 : (values[j] < 0 ? -1 : 0));
  return c;
}

Certificate build_bumps_only(const KernelSpec& k, const std::vector<double>& T, const std::vector<double>& samples,
                             const std::vector<int>& rho) {
  if (rho.size() != T.size()) throw std::invalid_argument("one sign per spike required");
  Certificate c = solve_system(k, T, samples, to_vector(rho), VectorXd::Zero(static_cast<Index>(T.size())), false);
  c.rho = rho;
  return c;
}

double eval_Q(const Certificate& cert, const KernelSpec& k, double t, int order) {
  return combination(cert.samples, cert.q, k, t, order);
}

double eval_bump_wave_sum(const Certificate& cert, const KernelSpec& k, double t, int order) {
  double acc = 0.0;
  for (std::size_t j = 0; j < cert.coeffs.size(); ++j) {
    const Index i = static_cast<Index>(j);
    acc += cert.alpha[i] * eval_bump(cert.coeffs[j], k, t, order) + cert.beta[i] * eval_wave(cert.coeffs[j], k, t, order);
  }
  return acc;
}

VerificationReport verify_certificate(const Certificate& cert, const KernelSpec& k, double grid_step,
                                      double excl_radius) {
  Combination c{cert.samples, cert.q, cert.support, to_vector(cert.rho), cert.rho};
  return verify_combination(c, k, grid_step, excl_radius);
}

double dampened_kernel(const KernelSpec& k, double s_i, double s_prev, double s_next, double t, int order) {
  const BumpWaveCoeffs c = bump_wave_coeffs(k, s_i, s_prev, s_next);
  return shifted_kernel(k, s_i, t, order) - eval_bump(c, k, t, order);
}

SparseCertificate build_sparse_certificate(const KernelSpec& k, const std::vector<double>& T, const SampleSet& S,
                                           const std::vector<std::size_t>& noise, const std::vector<int>& rho,
                                           const std::vector<int>& rho_prime, double lambda) {
  if (rho.size() != T.size()) throw std::invalid_argument("one sign per spike required");
  if (rho_prime.size() != noise.size()) throw std::invalid_argument("one sign per corruption required");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  for (int r : rho_prime) {
    if (r != 1 && r != -1) throw std::invalid_argument("corruption signs must be -1 or 1");
  }
  const auto& s = S.locations();
  const std::size_t n = s.size();
  std::vector<bool> is_noise(n, false);
  for (std::size_t l : noise) {
    if (l >= n) throw std::invalid_argument("noise index out of range");
    if (is_noise[l]) throw StructureError("duplicate noise index");
    is_noise[l] = true;
  }

  SparseCertificate sc;
  sc.sample_locations = s;
  sc.noise = noise;
  sc.rho_prime = rho_prime;
  sc.lambda = lambda;

  std::vector<int> used(n, 0);  // 1 interpolation, 2 cancellation
  std::vector<double> interp;
  for (std::size_t j = 0; j < T.size(); ++j) {
    const auto it = std::upper_bound(s.begin(), s.end(), T[j]);
    if (it == s.begin() || it == s.end()) throw StructureError("spike " + std::to_string(j) + " is not between two samples");
    const std::size_t i = static_cast<std::size_t>(it - s.begin()) - 1;
    for (std::size_t m : {i, i + 1}) {
      if (is_noise[m]) throw StructureError("sample next to spike " + std::to_string(j) + " is corrupted");
      if (used[m]) throw StructureError("interpolation samples of neighbouring spikes overlap");
      used[m] = 1;
      sc.interp_idx.push_back(m);
      interp.push_back(s[m]);
    }
  }
  for (std::size_t l : noise) {
    if (l == 0 || l + 1 >= n) throw StructureError("corruption at the edge of the sample grid");
    for (std::size_t m : {l - 1, l + 1}) {
      if (is_noise[m]) throw StructureError("corruption next to another corruption");
      if (used[m] == 1) throw StructureError("cancellation and interpolation samples overlap");
      if (used[m] == 2) throw StructureError("cancellation samples of neighbouring corruptions overlap");
      used[m] = 2;
      sc.clean_idx.push_back(m);
    }
    sc.noise_bumps.push_back(bump_wave_coeffs(k, s[l], s[l - 1], s[l + 1]));
  }

  const Index nt = static_cast<Index>(T.size());
  sc.psi.resize(nt);
  sc.zeta.resize(nt);
  for (Index j = 0; j < nt; ++j) {
    const double t = T[static_cast<std::size_t>(j)];
    sc.psi[j] = rho[static_cast<std::size_t>(j)] - eval_dampened_sum(sc, k, t, 0);
    sc.zeta[j] = -eval_dampened_sum(sc, k, t, 1);
  }
  sc.base = solve_system(k, T, interp, sc.psi, sc.zeta, true);
  sc.base.rho = rho;

  sc.q = VectorXd::Zero(static_cast<Index>(n));
  for (std::size_t m = 0; m < noise.size(); ++m) {
    const double lr = lambda * rho_prime[m];
    const std::size_t l = noise[m];
    sc.q[static_cast<Index>(l)] = lr;
    sc.q[static_cast<Index>(l - 1)] = -lr * sc.noise_bumps[m].b1;
    sc.q[static_cast<Index>(l + 1)] = -lr * sc.noise_bumps[m].b2;
  }
  for (std::size_t m = 0; m < sc.interp_idx.size(); ++m) {
    sc.q[static_cast<Index>(sc.interp_idx[m])] = sc.base.q[static_cast<Index>(m)];
  }
  return sc;
}

double eval_sparse_Q(const SparseCertificate& sc, const KernelSpec& k, double t, int order) {
  return combination(sc.sample_locations, sc.q, k, t, order);
}

double eval_dampened_sum(const SparseCertificate& sc, const KernelSpec& k, double t, int order) {
  double acc = 0.0;
  for (std::size_t m = 0; m < sc.noise.size(); ++m) {
    const auto& c = sc.noise_bumps[m];
    const double si = sc.sample_locations[sc.noise[m]];
    acc += sc.lambda * sc.rho_prime[m] * (shifted_kernel(k, si, t, order) - eval_bump(c, k, t, order));
  }
  return acc;
}

VerificationReport verify_sparse_certificate(const SparseCertificate& sc, const KernelSpec& k, double grid_step,
                                             double excl_radius) {
  Combination c{sc.sample_locations, sc.q, sc.base.support, to_vector(sc.base.rho), sc.base.rho};
  VerificationReport r = verify_combination(c, k, grid_step, excl_radius);
  std::vector<bool> is_noise(sc.sample_locations.size(), false);
  r.noise_equality_ok = true;
  for (std::size_t m = 0; m < sc.noise.size(); ++m) {
    is_noise[sc.noise[m]] = true;
    if (sc.q[static_cast<Index>(sc.noise[m])] != sc.lambda * sc.rho_prime[m]) r.noise_equality_ok = false;
  }
  r.max_clean_q = 0.0;
  for (std::size_t i = 0; i < is_noise.size(); ++i) {
    if (!is_noise[i]) r.max_clean_q = std::max(r.max_clean_q, std::abs(sc.q[static_cast<Index>(i)]));
  }
  r.coefficient_bound_ok = r.max_clean_q < sc.lambda;
  r.pass = r.pass && r.noise_equality_ok && r.coefficient_bound_ok;
  return r;
}

void write_certificate_csv(std::ostream& out, const std::vector<double>& samples, const VectorXd& q) {
  out << "sample_location,q\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out << format_double(samples[i]) << ',' << format_double(q[static_cast<Index>(i)]) << '\n';
  }
}

void write_report(std::ostream& out, const VerificationReport& r) {
  out << "pass=" << r.pass << '\n'
      << "interpolation_ok=" << r.interpolation_ok << '\n'
      << "off_support_ok=" << r.off_support_ok << '\n'
      << "concavity_ok=" << r.concavity_ok << '\n'
      << "tail_ok=" << r.tail_ok << '\n'
      << "noise_equality_ok=" << r.noise_equality_ok << '\n'
      << "coefficient_bound_ok=" << r.coefficient_bound_ok << '\n'
      << "max_abs_off_support=" << format_double(r.max_abs_off_support) << '\n'
      << "worst_location=" << format_double(r.worst_location) << '\n'
      << "grid_step=" << format_double(r.grid_step) << '\n'
      << "excl_radius=" << format_double(r.excl_radius) << '\n'
      << "second_derivative_bound=" << format_double(r.second_derivative_bound) << '\n'
      << "third_derivative_bound=" << format_double(r.third_derivative_bound) << '\n'
      << "tail_bound=" << format_double(r.tail_bound) << '\n'
      << "interpolation_residual=" << format_double(r.interpolation_residual) << '\n'
      << "derivative_residual=" << format_double(r.derivative_residual) << '\n'
      << "min_curvature=" << format_double(r.min_curvature) << '\n'
      << "off_support_gap=" << format_double(r.off_support_gap) << '\n'
      << "q_inf=" << format_double(r.q_inf) << '\n'
      << "max_clean_q=" << format_double(r.max_clean_q) << '\n';
}

}  // namespace deconv
