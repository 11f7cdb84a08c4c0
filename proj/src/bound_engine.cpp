#include "deconv/bound_engine.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <ostream>

#include "deconv/csv_io.hpp"
#include "deconv/errors.hpp"

namespace deconv {

namespace {

constexpr int kMaxHermite = 10;
constexpr double kTableEnd = 10.0;
// The tail sum bound 2p(10) is about 1.7e-12, not 1e-12; a factor
// of 2 covers it for every kernel and table.
constexpr double kTailNumerator = 2e-12;

double hermite(int n, double u) {
  double h0 = 1.0, h1 = u;
  if (n == 0) return h0;
  for (int k = 1; k < n; ++k) {
    const double h2 = u * h1 - k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

// Roots of He_n from the Jacobi matrix, polished by Newton.
std::vector<double> hermite_roots(int n) {
  if (n == 0) return {};
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) J(k - 1, k) = J(k, k - 1) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  std::vector<double> roots(es.eigenvalues().data(), es.eigenvalues().data() + n);
  for (double& r : roots) {
    for (int it = 0; it < 3; ++it) {
      const double d = n * hermite(n - 1, r);
      if (d != 0.0) r -= hermite(n, r) / d;
    }
  }
  return roots;
}

const std::vector<double>& roots_of(int n) {
  static std::vector<std::vector<double>> cache;
  static std::once_flag flag;
  std::call_once(flag, [] {
    for (int m = 0; m <= kMaxHermite; ++m) cache.push_back(hermite_roots(m));
  });
  return cache.at(n);
}

int hermite_index(KernelFamily family, int n) { return family == KernelFamily::Gaussian ? n : n + 2; }

double family_sign(KernelFamily family) { return family == KernelFamily::Gaussian ? 1.0 : -1.0; }

// a(s), c(s) with K(s) = c(s) e^{-s^2/2}, K'(s) = -a(s) e^{-s^2/2}.
Interval a_range(KernelFamily family, Interval s) {
  if (family == KernelFamily::Gaussian) return s;
  // 3s - s^3 is increasing on |s| < 1.
  return iv_monotone([](double x) { return 3.0 * x - x * x * x; }, s);
}

Interval c_range(KernelFamily family, Interval s) {
  if (family == KernelFamily::Gaussian) return Interval(1.0);
  return Interval(1.0) - iv_sqr(s);
}

Interval exp_half_sq(Interval s) { return iv_exp(iv_mul(iv_sqr(s), Interval(0.5))); }

double tail_constant(KernelFamily family) { return family == KernelFamily::Gaussian ? 4.0 : 11.3; }

constexpr double kTailConstantD = 13.0;

double envelope(double C, double kappa, double t) {
  return C * std::pow(t, 4) * std::exp(t - 0.5 * t * t) / kappa;
}

double table_lookup(const BoundTable& tb, const std::vector<double>& mono, double t, bool dampened) {
  if (t < 0.0) t = 0.0;
  if (t >= kTableEnd) return dampened ? tb.tail_envelope_d(t) : tb.tail_envelope(t);
  return mono[static_cast<std::size_t>(tb.cell_of(t))];
}

}  // namespace

double phi_point(KernelFamily family, int n, double u) {
  return family_sign(family) * hermite(hermite_index(family, n), u) * std::exp(-0.5 * u * u);
}

Interval phi_range(KernelFamily family, int n, Interval u) {
  double lo = std::min(phi_point(family, n, u.lo), phi_point(family, n, u.hi));
  double hi = std::max(phi_point(family, n, u.lo), phi_point(family, n, u.hi));
  // phi_n' = -phi_{n+1}, so interior extrema sit at roots of P_{n+1}.
  for (double r : roots_of(hermite_index(family, n + 1))) {
    if (r > u.lo && r < u.hi) {
      const double v = phi_point(family, n, r);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const double pad = 1e-12 * std::max(std::abs(lo), std::abs(hi)) + 1e-300;
  return {lo - pad, hi + pad};
}

void set_default_partition(KernelFamily family, BoundConfig& cfg, double coarsen) {
  if (!(coarsen > 0.0)) throw ConfigError("coarsening factor must be positive");
  const double t_width = 8.0 / 700.0 * coarsen;
  const double s_width = (family == KernelFamily::Gaussian ? 1.0 : 0.7) / 500.0 * coarsen;
  const double gamma = cfg.sparse ? cfg.tau2 : cfg.gamma;
  cfg.N1 = std::max(1, static_cast<int>(std::lround(kTableEnd / t_width)));
  cfg.N2 = std::max(1, static_cast<int>(std::ceil(gamma / s_width - 1e-9)));
}

void validate_config(KernelFamily family, const BoundConfig& cfg) {
  const double gamma = cfg.sparse ? cfg.tau2 : cfg.gamma;
  const double kappa = cfg.sparse ? cfg.tau1 : cfg.kappa;
  if (cfg.N1 < 1 || cfg.N2 < 1) throw ConfigError("partition counts must be positive");
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (gamma > (family == KernelFamily::Gaussian ? 1.0 : 0.8)) throw ConfigError("gamma too large for the kernel");
  if (!(kappa > 2.0 * gamma / cfg.N2)) throw ConfigError("kappa must exceed 2 gamma / N2");
  if (!(cfg.Delta >= 2.0)) throw ConfigError("Delta must be at least 2");
  if (cfg.sparse && !(cfg.tau1 > 0.0 && cfg.tau1 <= cfg.tau2)) throw ConfigError("need 0 < tau1 <= tau2");
  if (cfg.sparse && !(cfg.lambda > 0.0)) throw ConfigError("lambda must be positive");
}

int BoundTable::cell_of(double t) const {
  const int j = static_cast<int>(std::floor(t / t_width));
  return std::clamp(j, 0, N1 - 1);
}

double BoundTable::tail_envelope(double t) const { return envelope(tail_constant, kappa, t); }

double BoundTable::tail_envelope_d(double t) const { return envelope(kTailConstantD, tau1, t); }

double BoundTable::mono_b_at(int order, double t) const { return table_lookup(*this, mono_b.at(order), t, false); }

double BoundTable::mono_w_at(int order, double t) const { return table_lookup(*this, mono_w.at(order), t, false); }

double BoundTable::mono_d_at(int order, double t) const {
  if (!has_d) throw std::logic_error("no dampened-kernel tables");
  return table_lookup(*this, mono_d.at(order), t, true);
}

std::vector<double> monotonize(const std::vector<double>& table, double epsilon) {
  std::vector<double> out(table.size());
  double run = epsilon;
  for (std::size_t i = table.size(); i-- > 0;) {
    run = std::max(run, table[i]);
    out[i] = run;
  }
  return out;
}

namespace {

// Per t-cell enclosures of |D^(i)|. With E(x) = (G(x) + G(-x)) / 2 and
// r = 0 (Gaussian) or 1 (Ricker),
//   D = -int_0^tau (tau - x) [E''(x) + 2 r G(0)] dx / (1 - r tau^2),
// whose magnitude grows with tau, so tau = tau2 covers the whole range.
// The integral is bounded cell by cell in x.
void dampened_tables(KernelFamily family, BoundTable& tb, double s_width) {
  const bool ricker = family == KernelFamily::Ricker;
  const double t2 = tb.tau2;
  const Interval scale = ricker ? iv_recip(Interval(1.0) - iv_sqr(Interval(t2))) : Interval(1.0);
  const int nx = std::max(1, static_cast<int>(std::ceil(t2 / s_width - 1e-9)));
  const double xw = t2 / nx;
  auto d2G = [&](int i, Interval X, const std::array<Interval, 5>& ph) {
    return ((Interval(1.0) + iv_sqr(X)) * ph[i] - Interval(2.0) * X * ph[i + 1] + ph[i + 2]) * exp_half_sq(X);
  };
  for (int i = 0; i < 3; ++i) tb.abs_d[i].assign(tb.N1, 0.0);
  for (int j = 0; j < tb.N1; ++j) {
    const Interval U(j * tb.t_width, (j + 1) * tb.t_width);
    std::array<Interval, 3> g0{};
    for (int i = 0; i < 3; ++i) g0[i] = phi_range(family, i, -U);
    std::array<double, 3> acc{0, 0, 0};
    for (int x = 0; x < nx; ++x) {
      const double x0 = x * xw, x1 = x + 1 == nx ? t2 : (x + 1) * xw;
      const Interval X(x0, x1);
      const double weight = 0.5 * ((t2 - x0) * (t2 - x0) - (t2 - x1) * (t2 - x1));
      std::array<Interval, 5> php{}, phm{};
      for (int n = 0; n < 5; ++n) {
        php[n] = phi_range(family, n, X - U);
        phm[n] = phi_range(family, n, -X - U);
      }
      for (int i = 0; i < 3; ++i) {
        Interval inner = (d2G(i, X, php) + d2G(i, -X, phm)) * Interval(0.5);
        if (ricker) inner = inner + Interval(2.0) * g0[i];
        acc[i] += weight * inner.mag();
      }
    }
    for (int i = 0; i < 3; ++i) tb.abs_d[i][j] = inflate(scale * Interval(acc[i] * (1.0 + 1e-12))).hi;
  }
  for (int i = 0; i < 3; ++i) tb.mono_d[i] = monotonize(tb.abs_d[i], tb.epsilon_d);
}

}  // namespace

BoundTable piecewise_tables(const KernelSpec& k, const BoundConfig& cfg) {
  const KernelFamily family = k.family;
  validate_config(family, cfg);
  BoundTable tb;
  tb.family = family;
  tb.gamma = cfg.sparse ? cfg.tau2 : cfg.gamma;
  tb.kappa = cfg.sparse ? cfg.tau1 : cfg.kappa;
  tb.N1 = cfg.N1;
  tb.N2 = cfg.N2;
  tb.t_width = kTableEnd / cfg.N1;
  tb.epsilon = kTailNumerator / tb.kappa;
  tb.tail_constant = tail_constant(family);

  const int M = 2 * cfg.N2;
  const double s_width = tb.gamma / cfg.N2;
  std::vector<Interval> V(M), es(M), a(M), c(M);
  for (int m = 0; m < M; ++m) {
    V[m] = Interval(-tb.gamma + m * s_width, m + 1 == M ? tb.gamma : -tb.gamma + (m + 1) * s_width);
    es[m] = exp_half_sq(V[m]);
    a[m] = a_range(family, V[m]);
    c[m] = c_range(family, V[m]);
  }
  // Admissible pairs k < l satisfy d(V_k, V_l) >= kappa - 2 gamma / N2.
  const double cmin = tb.kappa - 2.0 * s_width;
  std::vector<int> first_l(M, M);
  bool any = false;
  for (int kk = 0; kk < M; ++kk) {
    for (int l = kk + 1; l < M; ++l) {
      if (V[l].lo - V[kk].hi >= cmin) {
        first_l[kk] = l;
        any = true;
        break;
      }
    }
  }
  if (!any) throw ConfigError("no admissible sample-cell pairs");

  const bool ricker = family == KernelFamily::Ricker;
  for (int i = 0; i < 3; ++i) {
    tb.abs_b[i].assign(tb.N1, 0.0);
    tb.abs_w[i].assign(tb.N1, 0.0);
    tb.signed_b[i].assign(tb.N1, -std::numeric_limits<double>::infinity());
  }

  std::array<std::vector<Interval>, 3> G, dG;
  for (int i = 0; i < 3; ++i) {
    G[i].resize(M);
    dG[i].resize(M);
  }
  for (int j = 0; j < tb.N1; ++j) {
    const Interval U(j * tb.t_width, (j + 1) * tb.t_width);
    for (int m = 0; m < M; ++m) {
      const Interval u = V[m] - U;
      std::array<Interval, 4> ph{};
      for (int n = 0; n < 4; ++n) ph[n] = phi_range(family, n, u);
      for (int i = 0; i < 3; ++i) {
        G[i][m] = ph[i] * es[m];
        dG[i][m] = (V[m] * ph[i] - ph[i + 1]) * es[m];
      }
    }
    double absb[3] = {0, 0, 0}, absw[3] = {0, 0, 0};
    double sgnb[3] = {-HUGE_VAL, -HUGE_VAL, -HUGE_VAL};
    for (int kk = 0; kk < M; ++kk) {
      if (first_l[kk] >= M) continue;
      std::array<Interval, 3> hull{dG[0][kk], dG[1][kk], dG[2][kk]};
      for (int l = kk + 1; l < M; ++l) {
        for (int i = 0; i < 3; ++i) hull[i] = iv_hull(hull[i], dG[i][l]);
        if (l < first_l[kk]) continue;
        const Interval inv_gap = iv_recip(Interval(V[l].lo - V[kk].hi, V[l].hi - V[kk].lo));
        Interval Da(1.0), Dc(0.0), inv_f(1.0);
        if (ricker) {
          const Interval s1 = V[kk], s2 = V[l];
          Da = Interval(3.0) - (iv_sqr(s1) + s1 * s2 + iv_sqr(s2));
          Dc = -(s1 + s2);
          inv_f = iv_recip(Interval(3.0) - iv_sqr(s1 - s2) + iv_sqr(s1 * s2));
        }
        for (int i = 0; i < 3; ++i) {
          // Divided difference of G: direct quotient intersected with the
          // mean-value enclosure over the hull of the two cells.
          const Interval direct = (G[i][l] - G[i][kk]) * inv_gap;
          const double dlo = std::max(direct.lo, hull[i].lo), dhi = std::min(direct.hi, hull[i].hi);
          const Interval DG = dlo <= dhi ? Interval(dlo, dhi) : direct;
          Interval B, W;
          if (ricker) {
            B = (G[i][kk] * Da - a[kk] * DG) * inv_f;
            W = (c[kk] * DG - G[i][kk] * Dc) * inv_f;
          } else {
            B = G[i][kk] - a[kk] * DG;
            W = DG;
          }
          absb[i] = std::max(absb[i], B.mag());
          absw[i] = std::max(absw[i], W.mag());
          sgnb[i] = std::max(sgnb[i], B.hi);
        }
      }
    }
    for (int i = 0; i < 3; ++i) {
      tb.abs_b[i][j] = absb[i];
      tb.abs_w[i][j] = absw[i];
      tb.signed_b[i][j] = sgnb[i];
    }
  }
  for (int i = 0; i < 3; ++i) {
    tb.mono_b[i] = monotonize(tb.abs_b[i], tb.epsilon);
    tb.mono_w[i] = monotonize(tb.abs_w[i], tb.epsilon);
  }
  if (cfg.sparse) {
    tb.has_d = true;
    tb.tau1 = cfg.tau1;
    tb.tau2 = cfg.tau2;
    tb.epsilon_d = kTailNumerator / cfg.tau1;
    dampened_tables(family, tb, s_width);
  }
  return tb;
}

BlockNorms block_norm_bounds(const BoundTable& table, double Delta) {
  BlockNorms n;
  for (int j = 1; j <= 5; ++j) {
    n.I_B += table.mono_b_at(0, j * Delta);
    n.W += table.mono_w_at(0, j * Delta);
    n.B1 += table.mono_b_at(1, j * Delta);
    n.I_W1 += table.mono_w_at(1, j * Delta);
  }
  const double e2 = 2.0 * table.epsilon;
  n.I_B = 2.0 * n.I_B + e2;
  n.W = 2.0 * n.W + e2;
  n.B1 = 2.0 * n.B1 + e2;
  n.I_W1 = 2.0 * n.I_W1 + e2;
  return n;
}

SchurResult schur_bounds(const BlockNorms& norms, std::optional<std::array<double, 2>> rhs) {
  SchurResult r;
  const double psi = rhs ? (*rhs)[0] : 1.0;
  const double zeta = rhs ? (*rhs)[1] : 0.0;
  if (!(norms.I_W1 < 1.0)) return r;
  r.norm_W1inv = 1.0 / (1.0 - norms.I_W1);
  r.norm_IC = norms.I_B + norms.W * r.norm_W1inv * norms.B1;
  if (!(r.norm_IC < 1.0)) return r;
  r.invertible = true;
  r.norm_Cinv = 1.0 / (1.0 - r.norm_IC);
  const double coupling = norms.W * r.norm_W1inv;
  r.alpha_inf = r.norm_Cinv * (psi + coupling * zeta);
  r.beta_inf = r.norm_W1inv * (zeta + norms.B1 * r.alpha_inf);
  r.alpha_minus_psi = r.norm_IC * r.alpha_inf + coupling * zeta;
  return r;
}

QBounds q_function_bounds(const BoundTable& table, const SchurResult& coeffs, double alpha_lb, double Delta,
                          const std::array<double, 3>& noise) {
  QBounds qb;
  const double h = 0.5 * Delta;
  const double w = table.t_width;
  const double al = coeffs.alpha_inf, be = coeffs.beta_inf;
  for (int j = 0; j * w < h; ++j) {
    const double lo = j * w, hi = std::min((j + 1) * w, h);
    std::array<double, 3> nb{}, nw{};
    for (int p = 0; p < 3; ++p) {
      double sb = 2.0 * table.epsilon, sw = 2.0 * table.epsilon;
      for (int i = 1; i <= 5; ++i) {
        sb += table.mono_b_at(p, lo + i * Delta) + table.mono_b_at(p, i * Delta - hi);
        sw += table.mono_w_at(p, lo + i * Delta) + table.mono_w_at(p, i * Delta - hi);
      }
      nb[p] = sb;
      nw[p] = sw;
    }
    const int cell = table.cell_of(lo);
    auto w_abs = [&](int p) { return be * (table.mono_w_at(p, lo) + nw[p]); };
    auto signed_self = [&](int p) {
      const double s = table.signed_b[p][static_cast<std::size_t>(cell)];
      if (alpha_lb < 0.0) return al * table.abs_b[p][static_cast<std::size_t>(cell)];
      return s <= 0.0 ? alpha_lb * s : al * s;
    };
    qb.lo.push_back(lo);
    qb.hi.push_back(hi);
    qb.abs_q.push_back(al * (table.mono_b_at(0, lo) + nb[0]) + w_abs(0) + noise[0]);
    qb.d1_upper.push_back(signed_self(1) + al * nb[1] + w_abs(1) + noise[1]);
    qb.d2_upper.push_back(signed_self(2) + al * nb[2] + w_abs(2) + noise[2]);
  }
  return qb;
}

namespace {

// Fills u1, u2 and the surrogates; returns whether the three region
// conditions hold.
bool region_test(const QBounds& qb, RegionReport& r) {
  const int n = static_cast<int>(qb.lo.size());
  if (n == 0) return false;
  int a_max = 0;
  while (a_max < n && qb.d2_upper[a_max] < 0.0) ++a_max;
  if (a_max == 0) {
    r.stage = "concavity";
    return false;
  }
  int fs = n;
  while (fs > 0 && qb.abs_q[fs - 1] < 1.0) --fs;
  if (fs == n) {
    r.stage = "far";
    return false;
  }
  // Smallest concavity radius u1 whose gap up to the far region is covered
  // by Q' < 0 cells.
  int start = fs;
  while (start > 0 && qb.d1_upper[start - 1] < 0.0) --start;
  const int a = std::max(1, std::min(start, fs));
  if (a > a_max) {
    r.stage = "near";
    return false;
  }
  const int b = std::max(a, fs);
  r.u1 = qb.lo[a];
  r.u2 = qb.lo[b];
  r.eta = r.u1;
  r.curvature_bound = *std::max_element(qb.d2_upper.begin(), qb.d2_upper.begin() + a);
  double far = 0.0;
  for (int j = b; j < n; ++j) far = std::max(far, qb.abs_q[j]);
  r.gap_bound = 1.0 - far;
  return true;
}

// Sup over admissible sample pairs of |b| and |w| (coefficients of the bump
// and wave on each sample).
std::array<double, 2> coefficient_sups(KernelFamily family, double gamma, double kappa) {
  const Interval s(-gamma, gamma);
  const double grow = exp_half_sq(s).hi;
  const double amax = a_range(family, Interval(0.0, gamma)).mag();
  const double cmax = c_range(family, s).mag();
  const double fmin = family == KernelFamily::Gaussian ? 1.0 : 3.0 - 4.0 * gamma * gamma + std::pow(gamma, 4);
  return {amax * grow / (kappa * fmin), cmax * grow / (kappa * fmin)};
}

RegionReport base_report(const BoundTable& table, double Delta) {
  RegionReport r;
  r.Delta = Delta;
  r.gamma = table.gamma;
  r.kappa = table.kappa;
  r.norms = block_norm_bounds(table, Delta);
  return r;
}

}  // namespace

RegionReport certify_with_table(const BoundTable& table, double Delta) {
  RegionReport r = base_report(table, Delta);
  r.schur = schur_bounds(r.norms);
  r.invertible = r.schur.invertible;
  if (!r.invertible) {
    r.stage = "invertibility";
    return r;
  }
  r.alpha_minus_rho = r.schur.alpha_minus_psi;
  r.alpha_lb = 1.0 - r.alpha_minus_rho;
  const auto cs = coefficient_sups(table.family, table.gamma, table.kappa);
  r.q_bound = r.schur.alpha_inf * cs[0] + r.schur.beta_inf * cs[1];
  if (r.alpha_lb < 0.0) {
    r.stage = "alpha_lb";
    return r;
  }
  const QBounds qb = q_function_bounds(table, r.schur, r.alpha_lb, Delta);
  r.certified = region_test(qb, r);
  if (r.certified) r.stage = "certified";
  return r;
}

RegionReport certify_point(const KernelSpec& k, const BoundConfig& cfg) {
  BoundConfig c = cfg;
  c.sparse = false;
  return certify_with_table(piecewise_tables(k, c), cfg.Delta);
}

RegionReport certify_sparse_point(const KernelSpec& k, const BoundConfig& cfg) {
  if (!cfg.sparse) throw ConfigError("certify_sparse_point needs sparse mode");
  const BoundTable table = piecewise_tables(k, cfg);
  const double Delta = cfg.Delta, lambda = cfg.lambda;
  const double tau1 = cfg.tau1, tau2 = cfg.tau2;
  RegionReport r = base_report(table, Delta);

  std::array<double, 3> dsum{};
  for (int p = 0; p < 3; ++p) {
    for (int i = 0; i <= 5; ++i) dsum[p] += table.mono_d_at(p, i * Delta);
  }
  std::array<double, 3> noise{};
  for (int p = 0; p < 3; ++p) noise[p] = 2.0 * lambda * (dsum[p] + table.epsilon_d);
  r.psi_bound = 1.0 + noise[0];
  r.zeta_bound = noise[1];

  r.schur = schur_bounds(r.norms, std::array<double, 2>{r.psi_bound, r.zeta_bound});
  r.invertible = r.schur.invertible;
  if (!r.invertible) {
    r.stage = "invertibility";
    return r;
  }
  const double al = r.schur.alpha_inf, be = r.schur.beta_inf;
  r.alpha_minus_rho = r.schur.alpha_minus_psi;
  r.alpha_lb = 1.0 - noise[0] - r.schur.alpha_minus_psi;
  const auto cs = coefficient_sups(table.family, table.gamma, table.kappa);
  r.q_bound = al * cs[0] + be * cs[1];

  // Lower bound on Q at a corrupted sample carrying q_i = lambda.
  double rest = 3.0 * table.epsilon + lambda * dsum[0];
  for (int i = 1; i <= 5; ++i) rest += al * table.mono_b_at(0, i * Delta - tau2) + be * table.mono_w_at(0, i * Delta - tau2);
  const bool gauss = table.family == KernelFamily::Gaussian;
  auto neighbour = [&](double tau) { return gauss ? be / tau : be / (tau * (3.0 - tau * tau)); };
  r.contradiction = lambda - neighbour(tau1) - 2.0 * rest;
  r.contradiction_tau2 = lambda - neighbour(tau2) - 2.0 * rest;

  // Wave coefficients stay above -lambda, bump coefficients at +-tau below 1.
  if (gauss) {
    r.sparse_q_ok = be * std::exp(0.5 * tau1 * tau1) / tau1 < lambda && std::exp(0.5 * tau2 * tau2) / 2.0 < 1.0;
  } else {
    r.sparse_q_ok = be * std::exp(0.5 * tau2 * tau2) / (tau1 * (3.0 - tau1 * tau1)) < lambda &&
                    std::pow(tau2, 3) - tau1 * (3.0 - 12.0 * tau2 * tau2) < 0.0 &&
                    std::exp(0.5 * tau2 * tau2) / (2.0 * (1.0 - tau2 * tau2)) < 1.0;
  }

  if (r.alpha_lb < 0.0) {
    r.stage = "alpha_lb";
    return r;
  }
  const QBounds qb = q_function_bounds(table, r.schur, r.alpha_lb, Delta, noise);
  if (!region_test(qb, r)) return r;
  if (!r.sparse_q_ok) {
    r.stage = "sparse_q";
    return r;
  }
  if (!(r.contradiction > 1.0)) {
    r.stage = "contradiction";
    return r;
  }
  r.certified = true;
  r.stage = "certified";
  return r;
}

std::vector<RegionReport> region_sweep(const KernelSpec& k, const std::vector<double>& Delta_grid,
                                       const std::vector<double>& gamma_grid, double kappa, double coarsen) {
  if (Delta_grid.empty() || gamma_grid.empty()) throw ConfigError("empty sweep grid");
  std::vector<RegionReport> rows;
  for (double gamma : gamma_grid) {
    BoundConfig cfg;
    cfg.gamma = gamma;
    cfg.kappa = kappa;
    cfg.Delta = *std::min_element(Delta_grid.begin(), Delta_grid.end());
    set_default_partition(k.family, cfg, coarsen);
    const BoundTable table = piecewise_tables(k, cfg);
    for (double Delta : Delta_grid) rows.push_back(certify_with_table(table, Delta));
  }
  return rows;
}

void write_region_csv(std::ostream& out, const std::vector<RegionReport>& rows) {
  out << "delta,gamma,kappa,invertible,certified,norm_IW1,norm_IC,alpha_inf,beta_inf,u1,u2,eta\n";
  for (const auto& r : rows) {
    out << format_double(r.Delta) << ',' << format_double(r.gamma) << ',' << format_double(r.kappa) << ','
        << (r.invertible ? 1 : 0) << ',' << (r.certified ? 1 : 0) << ',' << format_double(r.norms.I_W1) << ','
        << format_double(r.schur.norm_IC) << ',' << format_double(r.schur.alpha_inf) << ','
        << format_double(r.schur.beta_inf) << ',' << format_double(r.u1) << ',' << format_double(r.u2) << ','
        << format_double(r.eta) << '\n';
  }
}

void write_region_report(std::ostream& out, const RegionReport& r) {
  auto kv = [&](const char* key, double v) { out << key << '=' << format_double(v) << '\n'; };
  kv("delta", r.Delta);
  kv("gamma", r.gamma);
  kv("kappa", r.kappa);
  out << "invertible=" << (r.invertible ? 1 : 0) << '\n';
  out << "certified=" << (r.certified ? 1 : 0) << '\n';
  out << "stage=" << r.stage << '\n';
  kv("norm_I_B", r.norms.I_B);
  kv("norm_W", r.norms.W);
  kv("norm_B1", r.norms.B1);
  kv("norm_I_W1", r.norms.I_W1);
  kv("norm_I_C", r.schur.norm_IC);
  kv("norm_C_inv", r.schur.norm_Cinv);
  kv("alpha_inf", r.schur.alpha_inf);
  kv("beta_inf", r.schur.beta_inf);
  kv("alpha_minus_rho", r.alpha_minus_rho);
  kv("alpha_lb", r.alpha_lb);
  kv("u1", r.u1);
  kv("u2", r.u2);
  kv("eta", r.eta);
  kv("q_bound", r.q_bound);
  kv("curvature_bound", r.curvature_bound);
  kv("gap_bound", r.gap_bound);
  kv("psi_bound", r.psi_bound);
  kv("zeta_bound", r.zeta_bound);
  kv("contradiction", r.contradiction);
  kv("contradiction_tau2", r.contradiction_tau2);
  out << "sparse_q_ok=" << (r.sparse_q_ok ? 1 : 0) << '\n';
}

}  // namespace deconv
