#include "proxident/cli.hpp"

#include "proxident/exploit.hpp"
#include "proxident/identify.hpp"
#include "proxident/io.hpp"
#include "proxident/replicate.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace proxident {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kSolvers = {"pg",   "apg",     "dr",
                                           "saga", "dave-pg", "adaptive-inertia",
                                           "predictor-corrector", "random-subspace"};

struct GenArgs {
  std::string kind;
  std::string out;
  std::uint64_t seed = 1;
  long long m = -1, n = -1, support = 5, size = 20, rank = 4, measurements = 0;
  double delta = 0.5, lambda = -1.0, sparsity = 0.1, noise = 0.01, lambda_ratio = 0.1,
         margin = 0.3;
  bool degenerate = false;
};

struct SolveArgs {
  std::string bundle, solver = "pg", out = ".";
  std::optional<double> gamma;
  int max_iter = 10000;
  double stop_tol = 1e-10;
  int trace_every = 1;
  std::uint64_t seed = 1;
  std::size_t workers = 10;
  std::string delay = "constant:0";
  std::string encoding = "dense";
  double keep_probability = 0.5;
  int refresh_wait = 10;
  int full_step_period = 5;
  bool timing = false;
};

struct ReplicateArgs {
  std::string figure, out = ".";
  std::uint64_t seed = 1;
  int instances = 50;
  int workers = 10;
  std::string delay = "uniform:0:5";
  bool timing = false;
};

struct ScreenArgs {
  std::string bundle, center;
  double radius = 0.0;
  std::optional<double> gamma;
};

// Expands `--config FILE` into --key=value tokens placed before the
// remaining arguments, so explicit flags take precedence.
std::vector<std::string> expand_config(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::vector<std::string> out;
  std::vector<std::string> from_file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
      continue;
    }
    for (const auto& [k, v] : read_key_values(path)) from_file.push_back("--" + k + "=" + v);
  }
  // Insert after the program name and the (sub)command words.
  std::size_t pos = 1;
  while (pos < out.size() && !out[pos].empty() && out[pos][0] != '-') ++pos;
  out.insert(out.begin() + static_cast<std::ptrdiff_t>(pos), from_file.begin(), from_file.end());
  return out;
}

int cmd_gen(const GenArgs& a, std::ostream& out) {
  CompositeProblem p = [&] {
    if (a.kind == "lasso") {
      LassoParams prm;
      prm.m = a.m > 0 ? a.m : 200;
      prm.n = a.n > 0 ? a.n : 100;
      prm.sparsity = a.sparsity;
      prm.noise = a.noise;
      prm.lambda_ratio = a.lambda_ratio;
      prm.seed = a.seed;
      return gen_lasso(prm);
    }
    if (a.kind == "qc-lasso") {
      QcLassoParams prm;
      prm.n = a.n > 0 ? a.n : 20;
      prm.m = a.m > 0 ? a.m : 50;
      prm.support = a.support;
      prm.delta = a.delta;
      if (a.lambda > 0.0) prm.lambda = a.lambda;
      prm.degenerate = a.degenerate;
      prm.seed = a.seed;
      return gen_qc_lasso(prm);
    }
    LowRankParams prm;
    prm.size = a.size;
    prm.rank = a.rank;
    prm.measurements = a.measurements;
    prm.margin = a.margin;
    if (a.lambda > 0.0) prm.lambda = a.lambda;
    prm.degenerate = a.degenerate;
    prm.seed = a.seed;
    return gen_lowrank_matrix_problem(prm);
  }();
  KeyValues extra{{"kind", a.kind}, {"degenerate", a.degenerate ? "1" : "0"}};
  if (a.kind == "qc-lasso") {
    extra["delta"] = format_double(a.delta);
    extra["support_size"] = std::to_string(a.support);
  }
  if (a.kind == "lowrank") extra["rank"] = std::to_string(a.rank);
  const fs::path dir = a.out.empty() ? fs::path(a.kind + "-" + std::to_string(a.seed)) : fs::path(a.out);
  save_bundle(dir, p, extra);
  out << dir.string() << "\n";
  return 0;
}

SolverResult dispatch_solver(const CompositeProblem& p, const SolveArgs& a) {
  SolverConfig cfg;
  cfg.gamma = a.gamma;
  cfg.max_iter = a.max_iter;
  cfg.stop_tol = a.stop_tol;
  cfg.trace_every = a.trace_every;
  cfg.seed = a.seed;
  cfg.timing = a.timing;
  cfg.full_step_period = a.full_step_period;
  if (a.solver == "pg") return run_pg(p, cfg);
  if (a.solver == "apg") return run_apg(p, cfg);
  if (a.solver == "dr") return run_dr(p, cfg);
  if (a.solver == "saga") return run_saga(p, cfg);
  if (a.solver == "adaptive-inertia") return run_pg_adaptive_inertia(p, cfg);
  if (a.solver == "predictor-corrector") return run_predictor_corrector(p, cfg);
  if (a.solver == "random-subspace") {
    SubspaceSamplerConfig smp;
    smp.keep_probability = a.keep_probability;
    smp.refresh_wait = a.refresh_wait;
    smp.seed = a.seed;
    return run_random_subspace(p, cfg, smp);
  }
  DavePgOptions opt;
  opt.workers = a.workers;
  opt.delay = DelayModel::parse(a.delay);
  if (a.encoding != "dense" && a.encoding != "sparse")
    throw std::invalid_argument("encoding must be dense or sparse");
  opt.encoding = a.encoding == "dense" ? Encoding::Dense : Encoding::Sparse;
  return run_dave_pg(p, cfg, opt);
}

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  const CompositeProblem p = load_bundle(a.bundle);
  const SolverResult res = dispatch_solver(p, a);
  const fs::path dir = a.out;
  fs::create_directories(dir);
  const bool exploit = a.solver == "adaptive-inertia" || a.solver == "predictor-corrector" ||
                       a.solver == "random-subspace";
  write_trace_csv(dir / "trace.csv", res.trace, exploit);

  const IdentificationReport rep = analyze_trace(res.trace);
  std::ostringstream report;
  report << rep.to_text() << "solver=" << res.solver << "\ngamma=" << format_double(res.gamma)
         << "\niterations=" << res.iterations << "\nconverged=" << (res.converged ? 1 : 0)
         << "\nobjective=" << format_double(p.objective(res.solution.point))
         << "\nseed=" << a.seed << "\n";
  if (p.truth) {
    report << "truth_pattern_hash=" << p.truth->pattern.hex()
           << "\npattern_matches_truth=" << (res.solution.pattern == p.truth->pattern ? 1 : 0)
           << "\n";
  }
  std::ofstream file(dir / "report.txt");
  if (!file) throw std::runtime_error("cannot write " + (dir / "report.txt").string());
  file << report.str();
  out << report.str();
  return res.converged ? 0 : 2;
}

int cmd_replicate(const ReplicateArgs& a, std::ostream& out) {
  const fs::path dir = a.out;
  if (a.figure == "fig1") {
    Fig1Options opt;
    opt.seed = a.seed;
    const Fig1Result r = replicate_fig1(opt, dir);
    out << "shared_axis=" << (r.shared_axis() ? 1 : 0)
        << "\nls_relative_change=" << format_double(r.ls_relative_change) << "\n";
    return r.shared_axis() ? 0 : 1;
  }
  if (a.figure == "fig2") {
    Fig2Options opt;
    opt.seed = a.seed;
    opt.instances = a.instances;
    opt.timing = a.timing;
    const Fig2Result r = replicate_fig2(opt, dir);
    out << "well_posed_mean_rank=" << format_double(r.well_posed_mean_rank)
        << "\ndegenerate_mean_rank=" << format_double(r.degenerate_mean_rank)
        << "\nwell_posed_exact_fraction=" << format_double(r.well_posed_exact_fraction) << "\n";
    return 0;
  }
  Fig3Options opt;
  opt.seed = a.seed;
  opt.workers = a.workers;
  opt.delay = DelayModel::parse(a.delay);
  opt.timing = a.timing;
  const Fig3Result r = replicate_fig3(opt, dir);
  out << "dense_coords_at_gap=" << r.dense.coords_at_gap
      << "\nsparse_coords_at_gap=" << r.sparse.coords_at_gap
      << "\nratio=" << format_double(r.ratio) << "\n";
  return r.sparse.coords_at_gap >= 0 ? 0 : 2;
}

int cmd_screen(const ScreenArgs& a, std::ostream& out) {
  const CompositeProblem p = load_bundle(a.bundle);
  if (p.reg.kind() != RegularizerKind::L1)
    throw std::invalid_argument("screen: bundle regularizer must be l1");
  const KeyValues meta = load_bundle_meta(a.bundle);
  double gamma = 0.0;
  if (a.gamma) {
    gamma = *a.gamma;
  } else if (auto it = meta.find("gamma"); it != meta.end()) {
    gamma = std::stod(it->second);
  } else {
    gamma = 1.0 / p.smooth->lipschitz();
  }
  const Vector center = read_vector(a.center);
  if (center.size() != p.dim()) throw std::invalid_argument("screen: center has the wrong size");
  const auto idx = safe_screen_l1(center, a.radius, gamma * p.reg.weight());
  out << "count=" << idx.size() << "\nscreened=";
  for (std::size_t i = 0; i < idx.size(); ++i) out << (i ? "," : "") << idx[i];
  out << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structure-aware proximal optimization toolkit"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  app.add_option("--config", "key=value file; command-line flags take precedence");

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate an instance bundle");
  g->add_option("kind", gen.kind, "lasso | qc-lasso | lowrank")
      ->required()
      ->check(CLI::IsMember({"lasso", "qc-lasso", "lowrank"}));
  g->add_option("--out", gen.out, "Bundle directory");
  g->add_option("--seed", gen.seed)->envname("PROXIDENT_SEED");
  g->add_option("--m", gen.m, "Rows of A");
  g->add_option("--n", gen.n, "Columns of A");
  g->add_option("--s,--support", gen.support, "Support size (qc-lasso)");
  g->add_option("--delta", gen.delta, "Certificate margin (qc-lasso)");
  g->add_option("--lambda", gen.lambda, "Regularization weight");
  g->add_option("--sparsity", gen.sparsity, "Signal density (lasso)");
  g->add_option("--noise", gen.noise, "Noise level (lasso)");
  g->add_option("--lambda-ratio", gen.lambda_ratio, "lambda / ||A^T b||_inf (lasso)");
  g->add_option("--size", gen.size, "Matrix side (lowrank)");
  g->add_option("--rank", gen.rank, "Planted rank (lowrank)");
  g->add_option("--measurements", gen.measurements, "Measurements, 0 = 2 size^2 (lowrank)");
  g->add_option("--margin", gen.margin, "Singular value margin (lowrank)");
  g->add_flag("--degenerate", gen.degenerate, "Place the certificate on the boundary");

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Run a solver on a bundle");
  s->add_option("--bundle", solve.bundle)->required();
  s->add_option("--solver", solve.solver)->check(CLI::IsMember(kSolvers));
  s->add_option("--out", solve.out, "Output directory for trace.csv and report.txt");
  s->add_option("--gamma", solve.gamma);
  s->add_option("--max-iter", solve.max_iter);
  s->add_option("--stop-tol", solve.stop_tol);
  s->add_option("--trace-every", solve.trace_every);
  s->add_option("--seed", solve.seed)->envname("PROXIDENT_SEED");
  s->add_option("--workers", solve.workers);
  s->add_option("--delay", solve.delay, "constant:D | uniform:LO:HI | geometric:Q");
  s->add_option("--encoding", solve.encoding)->check(CLI::IsMember({"dense", "sparse"}));
  s->add_option("--keep-probability", solve.keep_probability);
  s->add_option("--refresh-wait", solve.refresh_wait);
  s->add_option("--full-step-period", solve.full_step_period);
  s->add_flag("--timing", solve.timing, "Record wallclock seconds in the trace");

  ReplicateArgs rep;
  auto* r = app.add_subcommand("replicate", "Emit the CSV datasets of a figure");
  r->add_option("figure", rep.figure)->required()->check(CLI::IsMember({"fig1", "fig2", "fig3"}));
  r->add_option("--out", rep.out);
  r->add_option("--seed", rep.seed)->envname("PROXIDENT_SEED");
  r->add_option("--instances", rep.instances, "Instances per group (fig2)");
  r->add_option("--workers", rep.workers, "Workers (fig3)");
  r->add_option("--delay", rep.delay, "Delay model (fig3)");
  r->add_flag("--timing", rep.timing, "Record wallclock seconds in traces");

  ScreenArgs scr;
  auto* sc = app.add_subcommand("screen", "Safe screening for an l1 bundle");
  sc->add_option("--bundle", scr.bundle)->required();
  sc->add_option("--center", scr.center, "Vector file with the region center")->required();
  sc->add_option("--radius", scr.radius)->required();
  sc->add_option("--gamma", scr.gamma);

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin() + 1, args.end());
    std::vector<std::string> rest(args.begin() + 1, args.end());
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*g) return cmd_gen(gen, out);
    if (*s) return cmd_solve(solve, out);
    if (*r) return cmd_replicate(rep, out);
    return cmd_screen(scr, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace proxident
