#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <memory>

#include "config.hpp"
#include "deconv/bound_engine.hpp"
#include "deconv/csv_io.hpp"
#include "deconv/errors.hpp"
#include "deconv/experiments.hpp"
#include "deconv/l1_solver.hpp"

namespace {

using deconv::cli::Config;
using deconv::format_double;

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kUsage = 2;

// Output target: the file named by `out`, or stdout.
class Output {
 public:
  explicit Output(const Config& cfg) {
    const std::string path = cfg.get_string("out", "");
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw deconv::ParseError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void provenance(std::ostream& out, const Config& cfg) {
  out << "# config_hash=" << cfg.hash() << " seed=" << cfg.get_int("seed", 0) << '\n';
}

deconv::KernelSpec kernel_of(const Config& cfg, double default_sigma) {
  return deconv::make_kernel(deconv::parse_family(cfg.get_string("kernel", "gaussian")),
                             cfg.get_double("sigma", default_sigma));
}

deconv::SolveOptions solve_options(const Config& cfg) {
  deconv::SolveOptions o;
  o.max_iters = static_cast<int>(cfg.get_int("max_iters", o.max_iters));
  o.tol = cfg.get_double("solver_tol", o.tol);
  o.polish = cfg.get_bool("polish", o.polish);
  return o;
}

std::uint64_t seed_of(const Config& cfg) { return static_cast<std::uint64_t>(cfg.get_int("seed", 0)); }

int cmd_solve(const Config& cfg) {
  const auto k = kernel_of(cfg, 1.0);
  deconv::SampleSet S;
  Eigen::VectorXd y;
  std::optional<deconv::AtomicMeasure> truth;
  if (cfg.has("measurements")) {
    const auto t = deconv::read_csv_file(cfg.get_string("measurements", ""));
    if (t.header.size() < 2 || t.header[0] != "location" || t.header[1] != "value") {
      throw deconv::ParseError("measurements need columns location,value");
    }
    std::vector<double> loc;
    y.resize(static_cast<Eigen::Index>(t.rows.size()));
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      loc.push_back(t.rows[i][0]);
      y[static_cast<Eigen::Index>(i)] = t.rows[i][1];
    }
    S = deconv::SampleSet(loc);
  } else if (cfg.has("samples") && cfg.has("measure")) {
    S = deconv::read_samples_file(cfg.get_string("samples", ""));
    truth = deconv::read_measure_file(cfg.get_string("measure", ""));
    y = deconv::convolve_samples(k, *truth, S);
  } else {
    throw deconv::ParseError("solve needs measurements=FILE or samples=FILE and measure=FILE");
  }
  const auto G = deconv::Grid::uniform(cfg.get_double("grid_min", 0.0), cfg.get_double("grid_max", 1.0),
                                       static_cast<std::size_t>(cfg.get_int("grid_n", 2000)));
  const Eigen::MatrixXd A = deconv::design_matrix(k, S, G);

  deconv::ProgramSpec spec;
  const std::string prog = cfg.get_string("program", "bp");
  if (prog == "bp") {
    spec.kind = deconv::Program::BasisPursuit;
  } else if (prog == "bpdn") {
    spec.kind = deconv::Program::Bpdn;
    spec.xi_bar = cfg.get_double("xi_bar", 0.0);
  } else if (prog == "sparse") {
    spec.kind = deconv::Program::SparseNoise;
    spec.lambda = cfg.get_double("lambda", 2.0);
  } else {
    throw deconv::ParseError("program must be bp, bpdn or sparse");
  }
  const auto res = deconv::solve(A, y, spec, solve_options(cfg));
  const auto kkt = deconv::kkt_report(A, y, res, spec);

  Output out(cfg);
  provenance(out.stream(), cfg);
  out.stream() << "grid_location,coefficient\n";
  for (std::size_t j = 0; j < G.size(); ++j) {
    out.stream() << format_double(G[j]) << ',' << format_double(res.x[static_cast<Eigen::Index>(j)]) << '\n';
  }
  if (res.w) {
    std::string wpath = cfg.get_string("out_w", "");
    if (wpath.empty() && cfg.has("out")) wpath = cfg.get_string("out", "") + ".w.csv";
    std::ofstream wf;
    if (!wpath.empty()) {
      wf.open(wpath);
      if (!wf) throw deconv::ParseError("cannot write " + wpath);
    }
    std::ostream& ws = wpath.empty() ? std::cerr : wf;
    provenance(ws, cfg);
    ws << "sample_location,w\n";
    for (std::size_t i = 0; i < S.size(); ++i) {
      ws << format_double(S[i]) << ',' << format_double((*res.w)[static_cast<Eigen::Index>(i)]) << '\n';
    }
  }
  std::cerr << "objective=" << format_double(res.objective) << "\niterations=" << res.iterations
            << "\nconverged=" << (res.converged ? 1 : 0) << "\ngap=" << format_double(kkt.gap)
            << "\ndual_violation=" << format_double(kkt.dual_violation)
            << "\nconstraint_residual=" << format_double(kkt.constraint_residual) << '\n';
  if (truth) {
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(G.size()));
    for (const auto& sp : truth->spikes()) x0[static_cast<Eigen::Index>(G.nearest(sp.location))] += sp.amplitude;
    const double err = deconv::relative_error(res.x, x0);
    const bool ok = err < cfg.get_double("tol", 1e-4);
    std::cerr << "relative_error=" << format_double(err) << "\nrecovered=" << (ok ? 1 : 0) << '\n';
    return ok ? kOk : kNegative;
  }
  return res.converged ? kOk : kNegative;
}

deconv::BoundConfig bound_config(const Config& cfg, deconv::KernelFamily family) {
  deconv::BoundConfig b;
  const bool gauss = family == deconv::KernelFamily::Gaussian;
  b.sparse = cfg.get_bool("sparse", false);
  if (b.sparse) {
    b.tau1 = cfg.get_double("tau1", gauss ? 0.065 : 0.0775);
    b.tau2 = cfg.get_double("tau2", gauss ? 0.2375 : 0.165);
    b.lambda = cfg.get_double("lambda", 2.0);
    b.Delta = cfg.get_double("delta", gauss ? 3.751 : 5.056);
  } else {
    b.gamma = cfg.get_double("gamma", 0.3);
    b.kappa = cfg.get_double("kappa", 0.05);
    b.Delta = cfg.get_double("delta", gauss ? 3.5 : 4.7);
  }
  deconv::set_default_partition(family, b, cfg.get_double("coarsen", 1.0));
  if (cfg.has("N1")) b.N1 = static_cast<int>(cfg.get_int("N1", b.N1));
  if (cfg.has("N2")) b.N2 = static_cast<int>(cfg.get_int("N2", b.N2));
  return b;
}

int cmd_certify(const Config& cfg) {
  const auto k = kernel_of(cfg, 1.0);
  const auto b = bound_config(cfg, k.family);
  const auto r = b.sparse ? deconv::certify_sparse_point(k, b) : deconv::certify_point(k, b);
  Output out(cfg);
  provenance(out.stream(), cfg);
  deconv::write_region_report(out.stream(), r);
  return r.certified ? kOk : kNegative;
}

int cmd_region(const Config& cfg) {
  const auto k = kernel_of(cfg, 1.0);
  const auto rows = deconv::region_sweep(k, cfg.get_list("deltas", {3, 3.5, 4, 5, 6}),
                                         cfg.get_list("gammas", {0.1, 0.2, 0.3, 0.5}), cfg.get_double("kappa", 0.05),
                                         cfg.get_double("coarsen", 1.0));
  Output out(cfg);
  provenance(out.stream(), cfg);
  deconv::write_region_csv(out.stream(), rows);
  return kOk;
}

int cmd_conditioning(const Config& cfg) {
  const auto family = deconv::parse_family(cfg.get_string("kernel", "gaussian"));
  const auto ms = cfg.get_list("m", {20});
  const auto deltas = cfg.get_list("delta0", {0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.5, 2.0});
  const bool with_step = cfg.has("step");
  const auto steps = cfg.get_list("step", {0.0});
  const int trials = static_cast<int>(cfg.get_int("trials", 5));
  Output out(cfg);
  provenance(out.stream(), cfg);
  out.stream() << (with_step ? "m,delta0,step,sv_min,sv_mid\n" : "m,delta0,sv_min,sv_mid\n");
  std::uint64_t cell = 0;
  for (double m : ms) {
    for (double step : steps) {
      for (double d : deltas) {
        if (with_step && step > d / 2) continue;  // grid wider than the spacing
        const auto row = deconv::conditioning_point(family, static_cast<int>(m), d,
                                                    with_step ? std::optional<double>(step) : std::nullopt, trials,
                                                    seed_of(cfg), cell++);
        out.stream() << row.m << ',' << format_double(row.delta0) << ',';
        if (with_step) out.stream() << format_double(step) << ',';
        out.stream() << format_double(row.sv_min) << ',' << format_double(row.sv_mid) << '\n';
      }
    }
  }
  return kOk;
}

using InstanceMaker = std::function<deconv::RecoveryInstance(double, double, std::uint64_t, std::uint64_t)>;

// Fraction of recovered trials for every (x, y) cell accepted by `keep`.
std::vector<deconv::PhaseCell> phase_grid(const Config& cfg, const std::vector<double>& xs,
                                          const std::vector<double>& ys, const std::function<bool(double, double)>& keep,
                                          const InstanceMaker& make, std::optional<double> lambda, double tol) {
  const int trials = static_cast<int>(cfg.get_int("trials", 5));
  const auto opts = solve_options(cfg);
  std::vector<deconv::PhaseCell> cells;
  std::uint64_t cell = 0;
  for (double x : xs) {
    for (double y : ys) {
      ++cell;
      if (!keep(x, y)) continue;
      int ok = 0;
      for (int t = 0; t < trials; ++t) {
        const auto inst = make(x, y, cell, static_cast<std::uint64_t>(t));
        if (deconv::run_recovery(inst, lambda, tol, opts).recovered) ++ok;
      }
      cells.push_back({x, y, static_cast<double>(ok) / trials, 0.0});
    }
  }
  return cells;
}

void write_phase(std::ostream& out, const char* header, const std::vector<deconv::PhaseCell>& cells, bool mono) {
  out << header << '\n';
  for (const auto& c : cells) {
    out << format_double(c.x) << ',' << format_double(c.y) << ',' << format_double(c.fraction);
    if (mono) out << ',' << format_double(c.fraction_monotonized);
    out << '\n';
  }
}

int cmd_phase(const Config& cfg) {
  const auto k = kernel_of(cfg, 0.01);
  const auto grid_n = static_cast<std::size_t>(cfg.get_int("grid_n", 2000));
  const auto spikes = static_cast<std::size_t>(cfg.get_int("spikes", 10));
  const auto seed = seed_of(cfg);
  auto cells = phase_grid(
      cfg, cfg.get_list("deltas", {2, 3, 4, 5, 6}), cfg.get_list("gammas", {0.1, 0.3, 0.5, 0.7, 0.9}),
      [](double d, double g) { return d > 2.05 * g; },
      [&](double d, double g, std::uint64_t cell, std::uint64_t t) {
        return deconv::worst_case_instance(k, grid_n, spikes, d, g, seed, cell, t);
      },
      std::nullopt, cfg.get_double("tol", 1e-4));
  deconv::monotonize_phase(cells);
  Output out(cfg);
  provenance(out.stream(), cfg);
  write_phase(out.stream(), "delta,gamma,fraction,fraction_monotonized", cells, true);
  return kOk;
}

int cmd_uniform_phase(const Config& cfg) {
  const auto k = kernel_of(cfg, 0.01);
  const auto grid_n = static_cast<std::size_t>(cfg.get_int("grid_n", 2000));
  const auto spikes = static_cast<std::size_t>(cfg.get_int("spikes", 10));
  const auto seed = seed_of(cfg);
  auto cells = phase_grid(
      cfg, cfg.get_list("deltas", {2, 3, 4, 5, 6}), cfg.get_list("steps", {0.2, 0.6, 1.0, 1.4, 1.8}),
      [](double d, double s) { return s <= d / 2; },
      [&](double d, double s, std::uint64_t cell, std::uint64_t t) {
        return deconv::uniform_instance(k, grid_n, spikes, d, s, seed, cell, t);
      },
      std::nullopt, cfg.get_double("tol", 1e-4));
  deconv::monotonize_phase(cells);
  Output out(cfg);
  provenance(out.stream(), cfg);
  write_phase(out.stream(), "delta,step,fraction,fraction_monotonized", cells, true);
  return kOk;
}

int cmd_sparse_phase(const Config& cfg) {
  const std::string sweep = cfg.get_string("sweep", "lambda");
  const auto grid_n = static_cast<std::size_t>(cfg.get_int("grid_n", 2000));
  const double step = cfg.get_double("step", 0.2);
  const double tol = cfg.get_double("tol", 1e-3);
  const auto seed = seed_of(cfg);
  std::vector<deconv::PhaseCell> cells;
  const char* header = nullptr;
  auto all = [](double, double) { return true; };
  if (sweep == "lambda") {
    const auto k = kernel_of(cfg, 0.02);
    const auto spikes = static_cast<std::size_t>(cfg.get_int("spikes", 10));
    const double delta = cfg.get_double("delta", 4.5);
    const int trials = static_cast<int>(cfg.get_int("trials", 5));
    const auto opts = solve_options(cfg);
    std::uint64_t cell = 0;
    for (double lam : cfg.get_list("lambdas", {0.5, 1, 2, 3})) {
      for (double c : cfg.get_list("corruptions", {1, 2})) {
        ++cell;
        int ok = 0;
        for (int t = 0; t < trials; ++t) {
          // Instances depend on the corruption count only, so every lambda
          // sees the same problems.
          const auto inst = deconv::sparse_instance(k, grid_n, spikes, delta, step, static_cast<std::size_t>(c), seed,
                                                    static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(t));
          if (deconv::run_recovery(inst, lam, tol, opts).recovered) ++ok;
        }
        cells.push_back({lam, c, static_cast<double>(ok) / trials, 0.0});
      }
    }
    header = "lambda,corruptions,fraction";
  } else if (sweep == "spikes") {
    const auto k = kernel_of(cfg, 0.01);
    const auto corr = static_cast<std::size_t>(cfg.get_int("corruptions", 2));
    const double lam = cfg.get_double("lambda", 2.0);
    cells = phase_grid(
        cfg, cfg.get_list("deltas", {3, 4, 5, 6}), cfg.get_list("spike_counts", {2, 5, 10}), all,
        [&](double d, double n, std::uint64_t cell, std::uint64_t t) {
          return deconv::sparse_instance(k, grid_n, static_cast<std::size_t>(n), d, step, corr, seed, cell, t);
        },
        lam, tol);
    header = "delta,spikes,fraction";
  } else if (sweep == "corruptions") {
    const auto k = kernel_of(cfg, 0.01);
    const auto spikes = static_cast<std::size_t>(cfg.get_int("spikes", 10));
    const double lam = cfg.get_double("lambda", 2.0);
    cells = phase_grid(
        cfg, cfg.get_list("deltas", {3, 4, 5, 6}), cfg.get_list("corruptions", {1, 2, 3}), all,
        [&](double d, double c, std::uint64_t cell, std::uint64_t t) {
          return deconv::sparse_instance(k, grid_n, spikes, d, step, static_cast<std::size_t>(c), seed, cell, t);
        },
        lam, tol);
    header = "delta,corruptions,fraction";
  } else {
    throw deconv::ParseError("sweep must be lambda, spikes or corruptions");
  }
  Output out(cfg);
  provenance(out.stream(), cfg);
  write_phase(out.stream(), header, cells, false);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deconvolution of point sources: solvers, certificates and experiments"};
  app.require_subcommand(1);
  std::string config_path;
  const std::vector<std::pair<std::string, std::function<int(const Config&)>>> commands = {
      {"solve", cmd_solve},
      {"certify", cmd_certify},
      {"region", cmd_region},
      {"conditioning", cmd_conditioning},
      {"phase", cmd_phase},
      {"uniform-phase", cmd_uniform_phase},
      {"sparse-phase", cmd_sparse_phase},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, fn] : commands) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "key=value settings file");
    sub->allow_extras();
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    try {
      Config cfg = config_path.empty() ? Config{} : deconv::cli::load_config(config_path);
      deconv::cli::apply_overrides(cfg, subs[i]->remaining());
      return commands[i].second(cfg);
    } catch (const deconv::ParseError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kUsage;
    } catch (const deconv::ConfigError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kUsage;
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kUsage;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kNegative;
    }
  }
  return kUsage;
}
