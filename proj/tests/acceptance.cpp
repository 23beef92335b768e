// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include "oracles.hpp"

#include "proxident/exploit.hpp"
#include "proxident/identify.hpp"
#include "proxident/io.hpp"
#include "proxident/replicate.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace proxident;
namespace fs = std::filesystem;

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::cout << "criterion " << id << " [" << (pass ? "PASS" : "FAIL") << "] " << name << ": "
            << detail << std::endl;
  if (!pass) ++failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "proxident-acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

bool same_files(const fs::path& a, const fs::path& b) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().extension() != ".csv") continue;
    ++n;
    const fs::path other = b / e.path().filename();
    if (!fs::exists(other) || slurp(e.path()) != slurp(other)) return false;
  }
  return n > 0;
}

using Runner = std::function<SolverResult(const CompositeProblem&, const SolverConfig&)>;

struct NamedRunner {
  std::string name;
  Runner run;
  bool exploit;
};

std::vector<NamedRunner> all_solvers(std::size_t workers) {
  return {
      {"pg", run_pg, false},
      {"apg", run_apg, false},
      {"dr", run_dr, false},
      {"saga", run_saga, false},
      {"dave-pg",
       [workers](const CompositeProblem& p, const SolverConfig& c) {
         DavePgOptions o;
         o.workers = workers;
         return run_dave_pg(p, c, o);
       },
       false},
      {"adaptive-inertia", run_pg_adaptive_inertia, true},
      {"predictor-corrector", run_predictor_corrector, true},
      {"random-subspace",
       [](const CompositeProblem& p, const SolverConfig& c) {
         SubspaceSamplerConfig s;
         s.seed = c.seed;
         return run_random_subspace(p, c, s);
       },
       true},
  };
}

void criterion1() {
  Stopwatch clock;
  Rng rng(101);
  double worst_residual = 0.0;
  for (auto kind : {RegularizerKind::L1, RegularizerKind::TV1D, RegularizerKind::Nuclear}) {
    for (int t = 0; t < 1000; ++t) {
      Shape shape = kind == RegularizerKind::Nuclear
                        ? Shape::matrix_shape(2 + static_cast<Index>(rng.index(5)),
                                              2 + static_cast<Index>(rng.index(5)))
                        : Shape::vector(2 + static_cast<Index>(rng.index(30)));
      const Regularizer reg = Regularizer::make(kind, shape, rng.uniform(0.05, 2.0));
      const double gamma = rng.uniform(0.1, 3.0);
      const Vector u = oracle::random_vector(rng, shape.size(), rng.uniform(0.1, 3.0));
      const Vector x = reg.prox(u, gamma).point;
      worst_residual = std::max(worst_residual, prox_optimality_residual(reg, u, gamma, x));
    }
  }
  double worst_tv = 0.0, worst_potts = 0.0;
  for (int t = 0; t < 400; ++t) {
    const Index n = 2 + static_cast<Index>(t % 11);
    Vector u = oracle::random_vector(rng, n, 2.0);
    if (t % 4 == 0)
      for (Index i = 1; i < n; ++i)
        if (rng.bernoulli(0.4)) u(i) = u(i - 1);
    const double thr = rng.uniform(0.05, 2.0);
    worst_tv = std::max(worst_tv, (prox_tv1d(u, thr).point - oracle::tv_brute_force(u, thr)).norm());
    worst_potts = std::max(worst_potts,
                           (prox_potts1d(u, 1.0, thr).point - oracle::potts_brute_force(u, thr)).norm());
  }
  const double secs = clock.seconds();
  report(1, "prox correctness",
         worst_residual <= 1e-10 && worst_tv <= 1e-9 && worst_potts <= 1e-9 && secs < 60.0,
         "max residual " + fmt(worst_residual) + " (<= 1e-10), TV brute-force gap " + fmt(worst_tv) +
             ", Potts brute-force gap " + fmt(worst_potts) + " (<= 1e-9), " + fmt(secs) + " s");
}

void criterion2() {
  Rng rng(202);
  double worst = -1e300;
  for (auto kind : {RegularizerKind::L1, RegularizerKind::TV1D, RegularizerKind::Nuclear}) {
    const Shape shape = kind == RegularizerKind::Nuclear ? Shape::matrix_shape(4, 3) : Shape::vector(10);
    for (int t = 0; t < 10000; ++t) {
      const Regularizer reg = Regularizer::make(kind, shape, rng.uniform(0.05, 2.0));
      const double gamma = rng.uniform(0.1, 3.0);
      const Vector u = oracle::random_vector(rng, shape.size(), 2.0);
      const Vector v = t % 2 == 0 ? Vector(u + oracle::random_vector(rng, shape.size(), rng.uniform(1e-6, 1.0)))
                                  : oracle::random_vector(rng, shape.size(), 2.0);
      const double excess =
          (reg.prox(u, gamma).point - reg.prox(v, gamma).point).norm() - (u - v).norm();
      worst = std::max(worst, excess);
    }
  }
  report(2, "nonexpansiveness", worst <= 1e-12,
         "max ||prox(u)-prox(v)|| - ||u-v|| = " + fmt(worst) + " (<= 1e-12) over 3 x 10^4 pairs");
}

void criterion3() {
  Stopwatch clock;
  double worst = 0.0;
  std::string worst_solver;
  int unconverged = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    LassoParams prm;
    prm.m = 50;
    prm.n = 20;
    prm.seed = seed;
    const CompositeProblem p = gen_lasso(prm);
    SolverConfig ref;
    ref.stop_tol = 1e-14;
    ref.max_iter = 200000;
    ref.timing = false;
    const Vector x_star = run_pg(p, ref).solution.point;
    SolverConfig cfg;
    cfg.stop_tol = 1e-12;
    cfg.max_iter = 2000000;
    cfg.trace_every = 1000;
    cfg.timing = false;
    cfg.seed = seed;
    for (const auto& s : all_solvers(2)) {
      const SolverResult r = s.run(p, cfg);
      if (!r.converged) ++unconverged;
      const double err = (r.solution.point - x_star).norm() / (1.0 + x_star.norm());
      if (err > worst) {
        worst = err;
        worst_solver = s.name;
      }
    }
  }
  const double secs = clock.seconds();
  report(3, "cross-solver agreement", worst <= 1e-6 && unconverged == 0 && secs < 120.0,
         "max ||x - x*||/(1+||x*||) = " + fmt(worst) + " (" + worst_solver +
             ", <= 1e-6) over 20 instances x 8 solvers, " + std::to_string(unconverged) +
             " unconverged, " + fmt(secs) + " s");
}

// Criteria 4 and 5 share the runs; the concatenated CSVs feed criterion 11.
struct IdentificationOutcome {
  int runs = 0;
  int exact = 0;
  int stable = 0;
  int sandwich = 0;
  std::string csv;
};

IdentificationOutcome identification_runs() {
  IdentificationOutcome out;
  std::ostringstream csv;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    QcLassoParams prm;
    prm.delta = 0.5;
    prm.seed = seed;
    const CompositeProblem p = gen_qc_lasso(prm);
    const GroundTruth& truth = *p.truth;
    SolverConfig cfg;
    cfg.stop_tol = 1e-10;
    cfg.max_iter = 1000000;
    cfg.record_iterates = true;
    cfg.timing = false;
    cfg.seed = seed;
    for (const auto& s : all_solvers(10)) {
      const SolverResult r = s.run(p, cfg);
      ++out.runs;
      write_trace_csv(csv, r.trace, s.exploit);
      const IdentificationReport rep = analyze_trace(r.trace);
      if (r.solution.pattern == truth.pattern && rep.pattern_final == truth.pattern) ++out.exact;
      const std::size_t from = rep.first_stable_iter.value_or(r.trace.size());
      bool stable = rep.first_stable_iter.has_value();
      bool sandwich = stable;
      const Vector u_star = p.u_star_for(r.gamma);
      const double gl = r.gamma * p.reg.weight();
      for (std::size_t i = from; i < r.trace.size(); ++i) {
        const TraceRecord& rec = r.trace[i];
        stable = stable && rec.pattern == rep.pattern_final;
        const SparsityPattern upper = enlarged_bound_l1(u_star, gl, (rec.u - u_star).norm());
        sandwich = sandwich && pattern_leq(truth.pattern, rec.pattern) && pattern_leq(rec.pattern, upper);
      }
      if (stable) ++out.stable;
      if (sandwich) ++out.sandwich;
    }
  }
  out.csv = csv.str();
  return out;
}

bool criteria4and5() {
  const IdentificationOutcome o = identification_runs();
  const std::string runs = std::to_string(o.runs);
  report(4, "exact identification", o.exact == o.runs && o.stable == o.runs,
         std::to_string(o.exact) + "/" + runs + " final patterns equal S(x*), " +
             std::to_string(o.stable) + "/" + runs + " constant after first_stable_iter");
  report(5, "enlarged identification sandwich", o.sandwich == o.runs,
         std::to_string(o.sandwich) + "/" + runs + " runs satisfy the bounds at every traced k");
  const IdentificationOutcome again = identification_runs();
  return again.csv == o.csv && !o.csv.empty();
}

bool criterion6() {
  Stopwatch clock;
  const fs::path a = scratch("fig2-a");
  const Fig2Result r = replicate_fig2(Fig2Options{}, a);
  const double secs = clock.seconds();
  report(6, "rank identification (Fig 2)",
         r.well_posed_exact_fraction >= 0.9 && r.degenerate_mean_rank >= r.well_posed_mean_rank &&
             secs < 300.0,
         "well-posed exact-rank fraction " + fmt(r.well_posed_exact_fraction) +
             " (>= 0.9), mean final rank well-posed " + fmt(r.well_posed_mean_rank) +
             " vs degenerate " + fmt(r.degenerate_mean_rank) + ", " + fmt(secs) + " s");
  const fs::path b = scratch("fig2-b");
  replicate_fig2(Fig2Options{}, b);
  return same_files(a, b);
}

bool criterion7() {
  Stopwatch clock;
  const fs::path a = scratch("fig3-a");
  const Fig3Result r = replicate_fig3(Fig3Options{}, a);
  const double secs = clock.seconds();
  const bool reached = r.dense.coords_at_gap > 0 && r.sparse.coords_at_gap > 0;
  report(7, "communication savings (Fig 3)", reached && r.ratio <= 0.6 && secs < 180.0,
         "coordinates at gap 1e-6: sparse " + std::to_string(r.sparse.coords_at_gap) + " vs dense " +
             std::to_string(r.dense.coords_at_gap) + ", ratio " + fmt(r.ratio) +
             " (<= 0.6), final support fraction " + fmt(r.final_support_fraction) + ", " +
             fmt(secs) + " s");
  const fs::path b = scratch("fig3-b");
  replicate_fig3(Fig3Options{}, b);
  return same_files(a, b);
}

void criterion8() {
  const Fig1Result r = replicate_fig1(Fig1Options{});
  report(8, "stable axis under perturbation (Fig 1)",
         r.shared_axis() && r.ls_relative_change > r.perturbation,
         "lasso patterns " + r.pattern_a.hex() + "/" + r.pattern_b.hex() + " share a zero bit: " +
             (r.shared_axis() ? "yes" : "no") + ", least-squares relative change " +
             fmt(r.ls_relative_change) + " > perturbation " + fmt(r.perturbation));
}

int iterations_to_gap(const Trace& trace, double f_star, double gap) {
  for (const auto& rec : trace)
    if (rec.objective - f_star <= gap) return rec.k;
  return -1;
}

void criterion9() {
  int wins = 0;
  std::ostringstream counts;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    LassoParams prm;
    prm.seed = seed;
    const CompositeProblem p = gen_lasso(prm);
    SolverConfig ref;
    ref.stop_tol = 1e-14;
    ref.max_iter = 200000;
    ref.trace_every = 1000000;
    ref.timing = false;
    const Vector x_ref = run_pg(p, ref).solution.point;
    SolverConfig cfg;
    cfg.stop_tol = 0.0;
    cfg.max_iter = 20000;
    cfg.timing = false;
    const SolverResult pg = run_pg(p, cfg), apg = run_apg(p, cfg);
    double f_star = p.objective(x_ref);
    for (const auto* t : {&pg.trace, &apg.trace})
      for (const auto& rec : *t) f_star = std::min(f_star, rec.objective);
    const int kp = iterations_to_gap(pg.trace, f_star, 1e-6);
    const int ka = iterations_to_gap(apg.trace, f_star, 1e-6);
    if (ka > 0 && (kp < 0 || ka < kp)) ++wins;
    counts << (seed > 1 ? " " : "") << ka << "/" << kp;
  }
  report(9, "APG speedup", wins >= 9,
         std::to_string(wins) + "/10 instances with fewer APG iterations to gap 1e-6 (APG/PG: " +
             counts.str() + ")");
}

void criterion10() {
  const Index n = 8;
  const std::vector<Index> candidates{0, 2, 3, 6};
  double worst = 0.0, worst_q = 0.0;
  for (double p : {0.25, 0.5, 0.75}) {
    Rng rng(1000 + static_cast<std::uint64_t>(p * 100));
    Vector mean = Vector::Zero(n);
    const int draws = 100000;
    for (int d = 0; d < draws; ++d) {
      const std::vector<char> enforced = draw_enforced(rng, n, candidates, p);
      for (Index i = 0; i < n; ++i)
        if (!enforced[static_cast<std::size_t>(i)]) mean(i) += 1.0;
    }
    mean /= static_cast<double>(draws);
    const Vector expect = averaged_projection(n, candidates, p);
    worst = std::max(worst, (mean - expect).lpNorm<Eigen::Infinity>());
    const Vector q = debias_scaling(n, candidates, p);
    worst_q = std::max(worst_q, (q.array() - expect.array().rsqrt()).abs().maxCoeff());
  }
  report(10, "debiasing", worst <= 1e-2 && worst_q <= 1e-12,
         "max |MC E[proj_W] - diag| = " + fmt(worst) + " (<= 1e-2) for p in {0.25, 0.5, 0.75}, " +
             "max |q - diag^(-1/2)| = " + fmt(worst_q));
}

}  // namespace

int main() {
  Stopwatch total;
  try {
    criterion1();
    criterion2();
    criterion3();
    const bool det4 = criteria4and5();
    const bool det6 = criterion6();
    const bool det7 = criterion7();
    criterion8();
    criterion9();
    criterion10();
    report(11, "determinism", det4 && det6 && det7,
           std::string("byte-identical CSVs on rerun: identification ") + (det4 ? "yes" : "no") +
               ", fig2 " + (det6 ? "yes" : "no") + ", fig3 " + (det7 ? "yes" : "no"));
  } catch (const std::exception& e) {
    std::cout << "acceptance aborted: " << e.what() << std::endl;
    return 1;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << " in " << fmt(total.seconds()) << " s" << std::endl;
  return failures == 0 ? 0 : 1;
}
