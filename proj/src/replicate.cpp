#include "proxident/replicate.hpp"

#include "proxident/identify.hpp"
#include "proxident/io.hpp"
#include "proxident/problems.hpp"
#include "proxident/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace proxident {

namespace fs = std::filesystem;

namespace {

// splitmix64 finalizer: decorrelates the per-instance seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::ofstream open_csv(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

Vector least_squares_solution(const Matrix& a, const Vector& b) {
  return (a.transpose() * a).ldlt().solve(a.transpose() * b);
}

Vector solve_lasso_2d(const Matrix& a, const Vector& b, double lambda, SparsityPattern& pattern) {
  CompositeProblem p{least_squares_oracle(a, b), Regularizer::l1(a.cols(), lambda), std::nullopt,
                     0};
  SolverConfig cfg;
  cfg.max_iter = 200000;
  cfg.stop_tol = 1e-14;
  cfg.trace_every = cfg.max_iter;
  cfg.timing = false;
  SolverResult r = run_pg(p, cfg);
  pattern = r.solution.pattern;
  return r.solution.point;
}

}  // namespace

Fig1Result replicate_fig1(const Fig1Options& opt, const std::optional<fs::path>& outdir) {
  if (!(opt.perturbation > 0.0) || !(opt.lambda > 0.0))
    throw std::invalid_argument("replicate fig1: perturbation and lambda must be positive");
  Rng rng(opt.seed);
  // Nearly collinear columns make the least-squares solution sensitive.
  Matrix a(3, 2);
  for (Index i = 0; i < 3; ++i) a(i, 0) = rng.normal();
  a.col(0).normalize();
  Vector side(3);
  for (Index i = 0; i < 3; ++i) side(i) = rng.normal();
  side -= side.dot(a.col(0)) * a.col(0);
  side.normalize();
  a.col(1) = 0.995 * a.col(0) + std::sqrt(1.0 - 0.995 * 0.995) * side;

  const Vector x_star = (Vector(2) << 1.5, 0.0).finished();
  const Vector z = (Vector(2) << 1.0, 0.3).finished();
  // Residual with A^T r = lambda z: a range part plus an orthogonal part.
  const Matrix gram = a.transpose() * a;
  const Eigen::Vector3d c0 = a.col(0), c1 = a.col(1);
  const Vector normal = c0.cross(c1).normalized();
  const Vector r = a * gram.ldlt().solve(opt.lambda * z) + opt.lambda * normal;
  const Vector b = a * x_star + r;

  Matrix e(3, 2);
  for (Index j = 0; j < 2; ++j)
    for (Index i = 0; i < 3; ++i) e(i, j) = rng.normal();
  const Matrix a2 = a + (opt.perturbation * a.norm() / e.norm()) * e;

  Fig1Result out;
  out.perturbation = opt.perturbation;
  out.lasso_a = solve_lasso_2d(a, b, opt.lambda, out.pattern_a);
  out.lasso_b = solve_lasso_2d(a2, b, opt.lambda, out.pattern_b);
  out.ls_a = least_squares_solution(a, b);
  out.ls_b = least_squares_solution(a2, b);
  out.ls_relative_change = (out.ls_a - out.ls_b).norm() / out.ls_a.norm();

  if (outdir) {
    fs::create_directories(*outdir);
    auto csv = open_csv(*outdir / "fig1_solutions.csv");
    csv << "instance,a11,a21,a31,a12,a22,a32,lasso_x1,lasso_x2,ls_x1,ls_x2,pattern_hash\n";
    const Matrix* mats[2] = {&a, &a2};
    const Vector* lasso[2] = {&out.lasso_a, &out.lasso_b};
    const Vector* ls[2] = {&out.ls_a, &out.ls_b};
    const SparsityPattern* pats[2] = {&out.pattern_a, &out.pattern_b};
    for (int t = 0; t < 2; ++t) {
      csv << t;
      for (Index j = 0; j < 2; ++j)
        for (Index i = 0; i < 3; ++i) csv << ',' << format_double((*mats[t])(i, j));
      csv << ',' << format_double((*lasso[t])(0)) << ',' << format_double((*lasso[t])(1)) << ','
          << format_double((*ls[t])(0)) << ',' << format_double((*ls[t])(1)) << ','
          << pats[t]->hex() << '\n';
    }
    auto brief = open_csv(*outdir / "fig1_summary.txt");
    brief << "shared_axis=" << (out.shared_axis() ? 1 : 0) << "\nls_relative_change="
          << format_double(out.ls_relative_change)
          << "\nperturbation=" << format_double(out.perturbation) << "\nb1=" << format_double(b(0))
          << "\nb2=" << format_double(b(1)) << "\nb3=" << format_double(b(2)) << "\n";
  }
  return out;
}

Fig2Result replicate_fig2(const Fig2Options& opt, const std::optional<fs::path>& outdir) {
  if (opt.instances < 1) throw std::invalid_argument("replicate fig2: instances must be >= 1");
  Fig2Result out;
  for (int group = 0; group < 2; ++group) {
    for (int i = 0; i < opt.instances; ++i) {
      LowRankParams prm;
      prm.size = opt.size;
      prm.rank = opt.rank;
      prm.degenerate = group == 1;
      prm.seed = mix_seed(opt.seed, static_cast<std::uint64_t>(2 * i + group));
      const CompositeProblem p = gen_lowrank_matrix_problem(prm);
      SolverConfig cfg;
      cfg.max_iter = opt.max_iter;
      cfg.stop_tol = opt.stop_tol;
      cfg.timing = opt.timing;
      const SolverResult res = run_pg(p, cfg);
      Fig2Run run;
      run.degenerate = prm.degenerate;
      run.instance = i;
      run.iterations = res.iterations;
      run.converged = res.converged;
      for (const auto& rec : res.trace) run.ranks.push_back(rec.nnz);
      out.runs.push_back(std::move(run));
    }
  }

  double sums[2] = {0.0, 0.0};
  int exact = 0;
  std::size_t longest = 0;
  for (const auto& run : out.runs) {
    sums[run.degenerate ? 1 : 0] += static_cast<double>(run.final_rank());
    if (!run.degenerate && run.final_rank() == opt.rank) ++exact;
    longest = std::max(longest, run.ranks.size());
  }
  out.well_posed_mean_rank = sums[0] / opt.instances;
  out.degenerate_mean_rank = sums[1] / opt.instances;
  out.well_posed_exact_fraction = static_cast<double>(exact) / opt.instances;

  if (outdir) {
    fs::create_directories(*outdir);
    auto traj = open_csv(*outdir / "fig2_trajectories.csv");
    traj << "group,instance,k,rank\n";
    for (const auto& run : out.runs)
      for (std::size_t k = 0; k < run.ranks.size(); ++k)
        traj << (run.degenerate ? "degenerate" : "well-posed") << ',' << run.instance << ','
             << k + 1 << ',' << run.ranks[k] << '\n';

    // Runs that stopped early keep contributing their final rank.
    auto mean = open_csv(*outdir / "fig2_mean.csv");
    mean << "group,k,mean_rank\n";
    for (int group = 0; group < 2; ++group)
      for (std::size_t k = 0; k < longest; ++k) {
        double s = 0.0;
        for (const auto& run : out.runs)
          if (run.degenerate == (group == 1))
            s += static_cast<double>(k < run.ranks.size() ? run.ranks[k] : run.final_rank());
        mean << (group ? "degenerate" : "well-posed") << ',' << k + 1 << ','
             << format_double(s / opt.instances) << '\n';
      }

    auto summary = open_csv(*outdir / "fig2_summary.csv");
    summary << "group,instance,final_rank,iterations,converged\n";
    for (const auto& run : out.runs)
      summary << (run.degenerate ? "degenerate" : "well-posed") << ',' << run.instance << ','
              << run.final_rank() << ',' << run.iterations << ',' << (run.converged ? 1 : 0)
              << '\n';
    auto brief = open_csv(*outdir / "fig2_summary.txt");
    brief << "instances_per_group=" << opt.instances
          << "\nwell_posed_mean_rank=" << format_double(out.well_posed_mean_rank)
          << "\ndegenerate_mean_rank=" << format_double(out.degenerate_mean_rank)
          << "\nwell_posed_exact_fraction=" << format_double(out.well_posed_exact_fraction)
          << "\n";
  }
  return out;
}

Fig3Result replicate_fig3(const Fig3Options& opt, const std::optional<fs::path>& outdir) {
  if (!(opt.gap > 0.0)) throw std::invalid_argument("replicate fig3: gap must be positive");
  LassoParams prm;
  prm.m = 200;
  prm.n = 100;
  prm.seed = opt.seed;
  const CompositeProblem p = gen_lasso(prm);

  SolverConfig ref_cfg;
  ref_cfg.max_iter = 200000;
  ref_cfg.stop_tol = 1e-14;
  ref_cfg.trace_every = ref_cfg.max_iter;
  ref_cfg.timing = false;
  const SolverResult ref = run_pg(p, ref_cfg);

  Fig3Result out;
  out.reference_objective = p.objective(ref.solution.point);

  SolverConfig cfg;
  cfg.max_iter = opt.max_iter;
  cfg.stop_tol = 1e-13;
  cfg.seed = opt.seed;
  cfg.timing = opt.timing;
  for (Fig3Series* s : {&out.dense, &out.sparse}) {
    s->encoding = s == &out.dense ? Encoding::Dense : Encoding::Sparse;
    DavePgOptions dopt;
    dopt.workers = static_cast<std::size_t>(opt.workers);
    dopt.delay = opt.delay;
    dopt.encoding = s->encoding;
    s->trace = run_dave_pg(p, cfg, dopt).trace;
    for (const auto& rec : s->trace)
      out.reference_objective = std::min(out.reference_objective, rec.objective);
  }
  for (Fig3Series* s : {&out.dense, &out.sparse})
    for (const auto& rec : s->trace)
      if (rec.objective - out.reference_objective <= opt.gap) {
        s->coords_at_gap = rec.comm_coords;
        s->iteration_at_gap = rec.k;
        break;
      }
  if (out.dense.coords_at_gap > 0 && out.sparse.coords_at_gap >= 0)
    out.ratio = static_cast<double>(out.sparse.coords_at_gap) /
                static_cast<double>(out.dense.coords_at_gap);
  const auto& last = out.sparse.trace.back();
  out.final_support_fraction = static_cast<double>(last.nnz) / static_cast<double>(prm.n);
  out.oscillation_count = analyze_trace(out.sparse.trace).oscillation_count;

  if (outdir) {
    fs::create_directories(*outdir);
    write_trace_csv(*outdir / "fig3_dense_trace.csv", out.dense.trace);
    write_trace_csv(*outdir / "fig3_sparse_trace.csv", out.sparse.trace);
    auto curve = open_csv(*outdir / "fig3_curve.csv");
    curve << "encoding,k,comm_coords,objective_gap,nnz\n";
    for (const Fig3Series* s : {&out.dense, &out.sparse})
      for (const auto& rec : s->trace)
        curve << (s->encoding == Encoding::Dense ? "dense" : "sparse") << ',' << rec.k << ','
              << rec.comm_coords << ',' << format_double(rec.objective - out.reference_objective)
              << ',' << rec.nnz << '\n';
    auto brief = open_csv(*outdir / "fig3_summary.txt");
    brief << "workers=" << opt.workers << "\ndelay=" << opt.delay.describe()
          << "\nreference_objective=" << format_double(out.reference_objective)
          << "\ngap=" << format_double(opt.gap)
          << "\ndense_coords_at_gap=" << out.dense.coords_at_gap
          << "\nsparse_coords_at_gap=" << out.sparse.coords_at_gap
          << "\niteration_at_gap=" << out.sparse.iteration_at_gap
          << "\nratio=" << format_double(out.ratio)
          << "\nfinal_support_fraction=" << format_double(out.final_support_fraction)
          << "\noscillation_count=" << out.oscillation_count << "\n";
  }
  return out;
}

}  // namespace proxident
