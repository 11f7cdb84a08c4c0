#include "deconv/l1_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "deconv/errors.hpp"

namespace deconv {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// min sum_j weight_j |z_j| + indicator(||K z - y|| <= radius), with
// K = A (plain) or K = [A I] (sparse noise).
struct Problem {
  const MatrixXd& A;
  const VectorXd& y;
  Program kind;
  double radius = 0;
  double lambda = 1;
  Index n = 0, N = 0, m = 0;

  Problem(const MatrixXd& A_, const VectorXd& y_, Program k, double r, double lam)
      : A(A_), y(y_), kind(k), radius(r), lambda(lam), n(A_.rows()), N(A_.cols()) {
    m = kind == Program::SparseNoise ? N + n : N;
  }

  bool sparse() const { return kind == Program::SparseNoise; }
  double weight(Index j) const { return j < N ? 1.0 : lambda; }

  void apply(const VectorXd& z, VectorXd& out) const {
    out.noalias() = A * z.head(N);
    if (sparse()) out += z.tail(n);
  }
  void apply_t(const VectorXd& p, VectorXd& out) const {
    out.head(N).noalias() = A.transpose() * p;
    if (sparse()) out.tail(n) = p;
  }
  double objective(const VectorXd& z) const {
    double v = z.head(N).lpNorm<1>();
    if (sparse()) v += lambda * z.tail(n).lpNorm<1>();
    return v;
  }
  // Smallest c >= 0 with q / c dual feasible (max weighted dual response).
  double dual_scale(const VectorXd& q) const {
    double v = (A.transpose() * q).lpNorm<Eigen::Infinity>();
    if (sparse()) v = std::max(v, q.lpNorm<Eigen::Infinity>() / lambda);
    return v;
  }
  double dual_objective(const VectorXd& q) const { return q.dot(y) - radius * q.norm(); }
  Eigen::VectorXd column(Index j) const {
    if (j < N) return A.col(j);
    VectorXd e = VectorXd::Zero(n);
    e[j - N] = 1.0;
    return e;
  }
};

double sign(double v) { return v < 0.0 ? -1.0 : 1.0; }

SolveResult finish(const Problem& P, const VectorXd& z, VectorXd q, int iters, bool converged, bool polished) {
  SolveResult r;
  r.x = z.head(P.N);
  if (P.sparse()) r.w = z.tail(P.n);
  const double v = P.dual_scale(q);
  if (v > 1.0) q /= v;
  r.q = std::move(q);
  r.objective = P.objective(z);
  r.iterations = iters;
  r.converged = converged;
  r.polished = polished;
  VectorXd Kz(P.n);
  P.apply(z, Kz);
  const double ynorm = std::max(1.0, P.y.norm());
  r.primal_residual = std::max(0.0, (Kz - P.y).norm() - P.radius) / ynorm;
  const double dual = P.kind == Program::Bpdn ? P.dual_objective(r.q) : r.q.dot(P.y);
  r.gap = r.objective - dual;
  return r;
}

std::vector<Index> candidate_columns(const VectorXd& z, double thr) {
  const double zmax = z.lpNorm<Eigen::Infinity>();
  std::vector<Index> cols;
  for (Index j = 0; j < z.size(); ++j) {
    if (std::abs(z[j]) >= thr * zmax) cols.push_back(j);
  }
  return cols;
}

// Closest point to q0 with M'q = g and all weighted dual constraints
// satisfied. Violated constraints are pinned to their bound and the
// projection repeated (active-set steps without release).
std::optional<VectorXd> nearest_dual(const Problem& P, const MatrixXd& M0, const VectorXd& g0, const VectorXd& q0) {
  MatrixXd M = M0;
  VectorXd g = g0;
  std::vector<Index> pinned;
  for (int round = 0; round < 30; ++round) {
    Eigen::ColPivHouseholderQR<MatrixXd> qr(M.transpose() * M);
    if (qr.rank() < M.cols()) return std::nullopt;
    const VectorXd q = q0 + M * qr.solve(g - M.transpose() * q0);
    if ((M.transpose() * q - g).lpNorm<Eigen::Infinity>() > 1e-9) return std::nullopt;
    VectorXd resp(P.m);
    P.apply_t(q, resp);
    std::vector<Index> viol;
    // Neighbouring grid columns violate together; pin only local maxima.
    for (Index j = 0; j < P.m; ++j) {
      const double v = std::abs(resp[j]) / P.weight(j);
      if (v <= 1.0 + 1e-12) continue;
      if (j < P.N) {
        if (j > 0 && std::abs(resp[j - 1]) / P.weight(j - 1) > v) continue;
        if (j + 1 < P.N && std::abs(resp[j + 1]) / P.weight(j + 1) >= v) continue;
      }
      viol.push_back(j);
    }
    if (viol.empty()) return q;
    const Index old = M.cols();
    M.conservativeResize(Eigen::NoChange, old + static_cast<Index>(viol.size()));
    g.conservativeResize(old + static_cast<Index>(viol.size()));
    for (std::size_t k = 0; k < viol.size(); ++k) {
      const Index j = viol[k];
      if (std::find(pinned.begin(), pinned.end(), j) != pinned.end()) return std::nullopt;
      pinned.push_back(j);
      M.col(old + static_cast<Index>(k)) = P.column(j);
      g[old + static_cast<Index>(k)] = sign(resp[j]) * P.weight(j);
    }
    if (M.cols() > P.n) return std::nullopt;
  }
  return std::nullopt;
}

// Solve the equality-constrained program restricted to cols exactly and pair
// it with the nearest dual vector satisfying the stationarity conditions on
// the support. Succeeds only if that dual vector is feasible.
std::optional<SolveResult> polish_equality_on(const Problem& P, std::vector<Index> cols, const VectorXd& q0,
                                              int iters) {
  const double ynorm = P.y.norm();
  VectorXd coef;
  MatrixXd M;
  for (int round = 0; round < 4; ++round) {
    if (cols.empty() || static_cast<Index>(cols.size()) > P.n) return std::nullopt;
    M.resize(P.n, static_cast<Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) M.col(static_cast<Index>(c)) = P.column(cols[c]);
    Eigen::ColPivHouseholderQR<MatrixXd> qr(M);
    if (qr.rank() < M.cols()) return std::nullopt;
    coef = qr.solve(P.y);
    VectorXd resid = P.y - M * coef;
    // A few matching-pursuit steps recover entries too small to pass the
    // support threshold yet.
    for (int extra = 0; extra < 5 && resid.norm() > 1e-9 * ynorm; ++extra) {
      if (static_cast<Index>(cols.size()) >= P.n) return std::nullopt;
      VectorXd corr(P.m);
      P.apply_t(resid, corr);
      Index best = -1;
      double bv = 0.0;
      for (Index j = 0; j < P.m; ++j) {
        if (std::find(cols.begin(), cols.end(), j) != cols.end()) continue;
        const double v = std::abs(corr[j]) / (j < P.N ? P.A.col(j).norm() : 1.0);
        if (v > bv) {
          bv = v;
          best = j;
        }
      }
      if (best < 0) return std::nullopt;
      cols.insert(std::upper_bound(cols.begin(), cols.end(), best), best);
      M.resize(P.n, static_cast<Index>(cols.size()));
      for (std::size_t c = 0; c < cols.size(); ++c) M.col(static_cast<Index>(c)) = P.column(cols[c]);
      qr.compute(M);
      if (qr.rank() < M.cols()) return std::nullopt;
      coef = qr.solve(P.y);
      resid = P.y - M * coef;
    }
    if (resid.norm() > 1e-9 * ynorm) return std::nullopt;
    const double cmax = coef.lpNorm<Eigen::Infinity>();
    std::vector<Index> kept;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (std::abs(coef[static_cast<Index>(c)]) > 1e-12 * cmax) kept.push_back(cols[c]);
    }
    if (kept.size() == cols.size()) break;
    cols = std::move(kept);
    if (round == 3) return std::nullopt;
  }
  const Index c = M.cols();
  VectorXd g(c);
  for (Index i = 0; i < c; ++i) g[i] = sign(coef[i]) * P.weight(cols[static_cast<std::size_t>(i)]);
  auto q = nearest_dual(P, M, g, q0);
  if (!q) return std::nullopt;
  VectorXd z = VectorXd::Zero(P.m);
  for (Index i = 0; i < c; ++i) z[cols[static_cast<std::size_t>(i)]] = coef[i];
  SolveResult r = finish(P, z, *q, iters, true, true);
  if (r.gap > 1e-9 * std::max(1.0, r.objective)) return std::nullopt;
  return r;
}

// Dense two-phase tableau simplex with Bland's rule for
//   min sum_j weight_j (u_j + v_j)  s.t.  K (u - v) = y,  u, v >= 0.
// Returns the columns of K carrying a nonzero basic value and the simplex
// dual vector, or nothing if the pivoting breaks down.
struct SimplexOutcome {
  std::vector<Index> cols;
  VectorXd q;
};

std::optional<SimplexOutcome> simplex_support(const Problem& P) {
  const Index rows = P.n, nv = 2 * P.m, na = P.n, width = nv + na + 1;
  MatrixXd T = MatrixXd::Zero(rows + 1, width);
  VectorXd cost = VectorXd::Zero(nv + na);
  for (Index j = 0; j < P.m; ++j) {
    const VectorXd c = P.column(j);
    T.block(0, j, rows, 1) = c;
    T.block(0, P.m + j, rows, 1) = -c;
    cost[j] = cost[P.m + j] = P.weight(j);
  }
  VectorXd rsign(rows);
  for (Index i = 0; i < rows; ++i) {
    rsign[i] = P.y[i] < 0.0 ? -1.0 : 1.0;
    T.row(i).head(nv) *= rsign[i];
    T(i, nv + i) = 1.0;
    T(i, width - 1) = rsign[i] * P.y[i];
  }
  std::vector<Index> basis(static_cast<std::size_t>(rows));
  for (Index i = 0; i < rows; ++i) basis[static_cast<std::size_t>(i)] = nv + i;
  constexpr double kPivotTol = 1e-11;

  // Reduced costs live in the last row; `limit` excludes artificials in phase 2.
  auto run_phase = [&](const VectorXd& c, Index limit) -> bool {
    T.row(rows).setZero();
    T.row(rows).head(c.size()) = c.transpose();
    for (Index i = 0; i < rows; ++i) T.row(rows) -= c[basis[static_cast<std::size_t>(i)]] * T.row(i);
    for (int iter = 0; iter < 50000; ++iter) {
      // Bland's rule; columns with no positive pivot are skipped as rounding noise.
      Index enter = -1, leave = -1;
      for (Index j = 0; j < limit && leave < 0; ++j) {
        if (!(T(rows, j) < -1e-9)) continue;
        double best = 0.0;
        for (Index i = 0; i < rows; ++i) {
          if (T(i, j) <= kPivotTol) continue;
          const double ratio = T(i, width - 1) / T(i, j);
          if (leave < 0 || ratio < best - 1e-12 ||
              (ratio <= best + 1e-12 && basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
            leave = i;
            best = ratio;
          }
        }
        if (leave >= 0) enter = j;
      }
      if (enter < 0) return true;
      T.row(leave) /= T(leave, enter);
      for (Index i = 0; i <= rows; ++i) {
        if (i != leave && T(i, enter) != 0.0) T.row(i) -= T(i, enter) * T.row(leave);
      }
      basis[static_cast<std::size_t>(leave)] = enter;
    }
    return false;
  };

  VectorXd c1 = VectorXd::Zero(nv + na);
  c1.tail(na).setOnes();
  if (!run_phase(c1, nv + na)) return std::nullopt;
  if (-T(rows, width - 1) > 1e-9 * std::max(1.0, P.y.norm())) return std::nullopt;
  // Drive remaining artificials out of the basis where possible.
  for (Index i = 0; i < rows; ++i) {
    if (basis[static_cast<std::size_t>(i)] < nv) continue;
    for (Index j = 0; j < nv; ++j) {
      if (std::abs(T(i, j)) > 1e-9) {
        T.row(i) /= T(i, j);
        for (Index r = 0; r <= rows; ++r) {
          if (r != i && T(r, j) != 0.0) T.row(r) -= T(r, j) * T.row(i);
        }
        basis[static_cast<std::size_t>(i)] = j;
        break;
      }
    }
  }
  if (!run_phase(cost, nv)) return std::nullopt;

  SimplexOutcome out;
  std::vector<Index> cols;
  for (Index i = 0; i < rows; ++i) {
    const Index b = basis[static_cast<std::size_t>(i)];
    if (b < nv && T(i, width - 1) > 1e-14) cols.push_back(b % P.m);
  }
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  out.cols = std::move(cols);
  // Duals of the sign-flipped rows sit under the artificial columns.
  out.q.resize(rows);
  for (Index i = 0; i < rows; ++i) out.q[i] = -T(rows, nv + i) * rsign[i];
  return out;
}

// Collapse runs of adjacent grid columns (indices below N) to one column:
// the largest entry, or the entry nearest the mass-weighted centre.
std::vector<Index> merge_clusters(const VectorXd& z, const std::vector<Index>& cols, Index N, bool centroid) {
  std::vector<Index> out;
  std::size_t i = 0;
  while (i < cols.size()) {
    if (cols[i] >= N) {
      out.push_back(cols[i++]);
      continue;
    }
    std::size_t j = i + 1;
    while (j < cols.size() && cols[j] < N && cols[j] == cols[j - 1] + 1) ++j;
    Index best = cols[i];
    double mass = 0.0, moment = 0.0;
    for (std::size_t k = i; k < j; ++k) {
      if (std::abs(z[cols[k]]) > std::abs(z[best])) best = cols[k];
      mass += std::abs(z[cols[k]]);
      moment += std::abs(z[cols[k]]) * static_cast<double>(cols[k]);
    }
    out.push_back(centroid ? static_cast<Index>(std::lround(moment / mass)) : best);
    i = j;
  }
  return out;
}

std::optional<SolveResult> polish_equality(const Problem& P, const VectorXd& z, const VectorXd& q0, int iters) {
  if (z.lpNorm<Eigen::Infinity>() == 0.0) return std::nullopt;
  std::vector<std::vector<Index>> tried;
  auto attempt = [&](const std::vector<Index>& cols) -> std::optional<SolveResult> {
    if (cols.empty() || static_cast<Index>(cols.size()) > P.n) return std::nullopt;
    if (std::find(tried.begin(), tried.end(), cols) != tried.end()) return std::nullopt;
    tried.push_back(cols);
    return polish_equality_on(P, cols, q0, iters);
  };
  for (double thr : {1e-1, 1e-2, 1e-3, 1e-4, 1e-6}) {
    const auto cols = candidate_columns(z, thr);
    if (auto r = attempt(merge_clusters(z, cols, P.N, false))) return r;
    if (auto r = attempt(merge_clusters(z, cols, P.N, true))) return r;
    if (auto r = attempt(cols)) return r;
  }
  return std::nullopt;
}

// For a fixed support and sign pattern the BPDN optimality conditions have a
// closed-form solution: x_S = x_ls - t G^{-1} s with t chosen so the residual
// norm equals xi_bar.
std::optional<SolveResult> polish_bpdn_on(const Problem& P, const std::vector<Index>& cols, const VectorXd& z,
                                          int iters) {
  const Index c = static_cast<Index>(cols.size());
  if (c == 0 || c > P.n) return std::nullopt;
  MatrixXd M(P.n, c);
  VectorXd s(c);
  for (Index i = 0; i < c; ++i) {
    M.col(i) = P.A.col(cols[static_cast<std::size_t>(i)]);
    s[i] = sign(z[cols[static_cast<std::size_t>(i)]]);
  }
  const MatrixXd G = M.transpose() * M;
  Eigen::LDLT<MatrixXd> ldlt(G);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return std::nullopt;
  Eigen::ColPivHouseholderQR<MatrixXd> qr(M);
  if (qr.rank() < c) return std::nullopt;
  const VectorXd xls = qr.solve(P.y);
  const double rls2 = (P.y - M * xls).squaredNorm();
  const double xi2 = P.radius * P.radius;
  if (rls2 >= xi2) return std::nullopt;
  const VectorXd Gs = ldlt.solve(s);
  const double vn = (M * Gs).norm();
  if (vn == 0.0) return std::nullopt;
  const double t = std::sqrt(xi2 - rls2) / vn;
  const VectorXd xs = xls - t * Gs;
  for (Index i = 0; i < c; ++i) {
    if (sign(xs[i]) != s[i] || xs[i] == 0.0) return std::nullopt;
  }
  const VectorXd q = (P.y - M * xs) / t;
  if (P.dual_scale(q) > 1.0 + 1e-9) return std::nullopt;
  VectorXd zz = VectorXd::Zero(P.m);
  for (Index i = 0; i < c; ++i) zz[cols[static_cast<std::size_t>(i)]] = xs[i];
  SolveResult r = finish(P, zz, q, iters, true, true);
  if (r.gap > 1e-9 * std::max(1.0, r.objective) || r.primal_residual > 1e-9) return std::nullopt;
  return r;
}

std::optional<SolveResult> polish_bpdn(const Problem& P, const VectorXd& z, int iters) {
  if (z.lpNorm<Eigen::Infinity>() == 0.0) return std::nullopt;
  std::size_t last = 0;
  for (double thr : {1e-1, 1e-2, 1e-3, 1e-4, 1e-6}) {
    auto cols = candidate_columns(z, thr);
    if (static_cast<Index>(cols.size()) > P.n) break;
    if (cols.size() == last) continue;
    last = cols.size();
    if (auto r = polish_bpdn_on(P, cols, z, iters)) return r;
  }
  return std::nullopt;
}

SolveResult run(const Problem& P, const SolveOptions& opts) {
  if (opts.max_iters < 0 || !(opts.tol > 0.0)) throw std::invalid_argument("invalid solver options");
  const double L = std::sqrt(std::pow(operator_norm(P.A, opts.power_iters), 2) + (P.sparse() ? 1.0 : 0.0));
  const double scale = 0.95 / (L * 1.01);
  const double tau = scale * std::sqrt(opts.step_ratio);
  const double sig = scale / std::sqrt(opts.step_ratio);

  VectorXd z = VectorXd::Zero(P.m), zbar = z, znew(P.m);
  VectorXd p = VectorXd::Zero(P.n), Kz(P.n), KTp(P.m), u(P.n);
  const double ynorm = std::max(1.0, P.y.norm());
  int it = 0;
  for (it = 1; it <= opts.max_iters; ++it) {
    P.apply(zbar, Kz);
    // Dual prox of the ball indicator via the Moreau identity.
    p += sig * Kz;
    u = p / sig - P.y;
    const double nu = u.norm();
    if (nu > P.radius) u *= P.radius / nu;
    p -= sig * (u + P.y);
    P.apply_t(p, KTp);
    znew = z - tau * KTp;
    for (Index j = 0; j < P.m; ++j) {
      const double thr = tau * P.weight(j);
      const double v = znew[j];
      znew[j] = v > thr ? v - thr : (v < -thr ? v + thr : 0.0);
    }
    zbar = 2.0 * znew - z;
    z.swap(znew);

    if (it % opts.check_every == 0 || it == opts.max_iters) {
      const VectorXd q = -p;
      if (opts.polish) {
        auto r = P.kind == Program::Bpdn ? polish_bpdn(P, z, it) : polish_equality(P, z, q, it);
        if (r) return *r;
      }
      P.apply(z, Kz);
      const double pres = std::max(0.0, (Kz - P.y).norm() - P.radius) / ynorm;
      const double v = std::max(1.0, P.dual_scale(q));
      const double gap = std::abs(P.objective(z) - P.dual_objective(q / v)) / std::max(1.0, P.objective(z));
      if (pres <= opts.tol && gap <= opts.tol) return finish(P, z, q, it, true, false);
    }
    // Small equality programs that stall are finished exactly.
    if (it == opts.exact_after && P.kind != Program::Bpdn && P.m * P.n <= opts.exact_max_size) {
      if (auto sx = simplex_support(P)) {
        if (auto r = polish_equality_on(P, sx->cols, sx->q, it)) return *r;
      }
    }
  }
  return finish(P, z, -p, opts.max_iters, false, false);
}

SolveResult zero_result(const Problem& P) {
  return finish(P, VectorXd::Zero(P.m), VectorXd::Zero(P.n), 0, true, false);
}

}  // namespace

double operator_norm(const MatrixXd& A, int iters) {
  if (A.size() == 0) return 0.0;
  const MatrixXd G = A * A.transpose();
  VectorXd v = VectorXd::Ones(G.rows()) / std::sqrt(static_cast<double>(G.rows()));
  double lam = 0.0;
  for (int i = 0; i < iters; ++i) {
    VectorXd w = G * v;
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    lam = v.dot(w);
    v = w / nw;
  }
  return std::sqrt(std::max(lam, (G * v).norm()));
}

std::vector<std::size_t> support_of(const VectorXd& x, double rel) {
  std::vector<std::size_t> s;
  const double m = x.lpNorm<Eigen::Infinity>();
  if (m == 0.0) return s;
  for (Index j = 0; j < x.size(); ++j) {
    if (std::abs(x[j]) >= rel * m) s.push_back(static_cast<std::size_t>(j));
  }
  return s;
}

SolveResult basis_pursuit(const MatrixXd& A, const VectorXd& y, const SolveOptions& opts) {
  if (A.rows() != y.size()) throw std::invalid_argument("dimension mismatch");
  if (A.size() == 0 || A.isZero(0.0)) throw std::invalid_argument("design matrix is empty or zero");
  Problem P(A, y, Program::BasisPursuit, opts.eq_radius_rel * y.norm(), 1.0);
  if (y.isZero(0.0)) return zero_result(P);
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(A);
  const VectorXd xls = cod.solve(y);
  if ((A * xls - y).norm() > 1e-6 * std::max(1.0, y.norm())) {
    throw InfeasibleError("measurements are not in the range of the design matrix");
  }
  return run(P, opts);
}

SolveResult bpdn(const MatrixXd& A, const VectorXd& y, double xi_bar, const SolveOptions& opts) {
  if (A.rows() != y.size()) throw std::invalid_argument("dimension mismatch");
  if (!(xi_bar > 0.0)) throw std::invalid_argument("xi_bar must be positive");
  Problem P(A, y, Program::Bpdn, xi_bar, 1.0);
  if (y.norm() <= xi_bar) return zero_result(P);
  return run(P, opts);
}

SolveResult sparse_bp(const MatrixXd& A, const VectorXd& y, double lambda, const SolveOptions& opts) {
  if (A.rows() != y.size()) throw std::invalid_argument("dimension mismatch");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  Problem P(A, y, Program::SparseNoise, opts.eq_radius_rel * y.norm(), lambda);
  if (y.isZero(0.0)) return zero_result(P);
  return run(P, opts);
}

SolveResult solve(const MatrixXd& A, const VectorXd& y, const ProgramSpec& spec, const SolveOptions& opts) {
  switch (spec.kind) {
    case Program::BasisPursuit: return basis_pursuit(A, y, opts);
    case Program::Bpdn: return bpdn(A, y, spec.xi_bar, opts);
    case Program::SparseNoise: return sparse_bp(A, y, spec.lambda, opts);
  }
  throw std::invalid_argument("unknown program");
}

KktReport kkt_report(const MatrixXd& A, const VectorXd& y, const SolveResult& result, const ProgramSpec& spec) {
  KktReport r;
  const VectorXd& q = result.q;
  const VectorXd Atq = A.transpose() * q;
  r.max_dual_response = Atq.lpNorm<Eigen::Infinity>();
  r.q_inf = q.lpNorm<Eigen::Infinity>();
  r.lambda = spec.lambda;
  r.dual_violation = std::max(0.0, r.max_dual_response - 1.0);
  const bool sparse = spec.kind == Program::SparseNoise;
  const VectorXd w = (sparse && result.w) ? *result.w : VectorXd::Zero(y.size());
  if (sparse) r.dual_violation = std::max(r.dual_violation, r.q_inf - spec.lambda);
  r.primal_objective = result.x.lpNorm<1>() + (sparse ? spec.lambda * w.lpNorm<1>() : 0.0);
  const VectorXd resid = A * result.x + w - y;
  if (spec.kind == Program::Bpdn) {
    r.dual_objective = q.dot(y) - spec.xi_bar * q.norm();
    r.constraint_residual = std::max(0.0, resid.norm() - spec.xi_bar);
  } else {
    r.dual_objective = q.dot(y);
    r.constraint_residual = resid.norm();
  }
  r.gap = r.primal_objective - r.dual_objective;
  double cs = 0.0;
  for (Index j = 0; j < result.x.size(); ++j) {
    if (result.x[j] != 0.0) cs += std::abs(result.x[j]) * std::abs(1.0 - sign(result.x[j]) * Atq[j]);
  }
  if (sparse) {
    for (Index i = 0; i < w.size(); ++i) {
      if (w[i] != 0.0) cs += std::abs(w[i]) * std::abs(spec.lambda - sign(w[i]) * q[i]);
    }
  }
  if (spec.kind == Program::Bpdn) cs += q.norm() * std::abs(spec.xi_bar - resid.norm());
  r.complementary_slackness = cs;
  return r;
}

}  // namespace deconv
