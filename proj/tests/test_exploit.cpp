#include "oracles.hpp"

#include "proxident/exploit.hpp"

#include <doctest.h>

using namespace proxident;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

CompositeProblem smooth_only(std::uint64_t seed) {
  CompositeProblem p = oracle::random_lasso(seed, 25, 8, 0.0);
  return p;
}

}  // namespace

TEST_CASE("sparse messages") {
  const SparseMessage m = sparse_encode(vec({0.0, 0.0, 3.5, 0.0, -1.0}));
  REQUIRE(m.entries.size() == 2);
  CHECK(m.entries[0] == std::pair<Index, double>{2, 3.5});
  CHECK(m.entries[1] == std::pair<Index, double>{4, -1.0});
  CHECK(m.cost() == 2);
  CHECK(sparse_encode(Vector::Zero(6)).cost() == 0);

  Rng rng(41);
  for (int t = 0; t < 100; ++t) {
    Vector x = oracle::random_vector(rng, 12);
    for (Index i = 0; i < 12; ++i)
      if (rng.bernoulli(0.6)) x(i) = 0.0;
    CHECK(sparse_decode(sparse_encode(x)) == x);
  }

  SparseMessage bad{{{3, 1.0}, {1, 2.0}}, 5};
  CHECK_THROWS_AS(sparse_decode(bad), std::invalid_argument);
  bad.entries = {{5, 1.0}};
  CHECK_THROWS_AS(sparse_decode(bad), std::invalid_argument);
  bad.entries = {{1, 1.0}, {1, 2.0}};
  CHECK_THROWS_AS(sparse_decode(bad), std::invalid_argument);
}

TEST_CASE("adaptive inertia is APG while no structure is lost") {
  const CompositeProblem p = smooth_only(3);
  SolverConfig cfg;
  cfg.max_iter = 60;
  cfg.stop_tol = 0.0;
  const SolverResult ai = run_pg_adaptive_inertia(p, cfg), apg = run_apg(p, cfg);
  CHECK((ai.solution.point - apg.solution.point).norm() <= 1e-12);
  CHECK(ai.trace[0].accel_active == 0);
  CHECK(ai.trace[5].accel_active == 1);
}

TEST_CASE("adaptive inertia falls back to the PG step") {
  const CompositeProblem p = oracle::random_lasso(5, 40, 30, 0.15);
  SolverConfig cfg;
  cfg.max_iter = 3000;
  cfg.record_iterates = true;
  const SolverResult r = run_pg_adaptive_inertia(p, cfg);
  CHECK(r.converged);
  int rejected = 0;
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    const auto& rec = r.trace[i];
    const Vector x_prev = p.reg.prox(r.trace[i - 1].u, r.gamma).point;
    if (rec.accel_active == 0) {
      ++rejected;
      CHECK((rec.u - (x_prev - r.gamma * p.smooth->gradient(x_prev))).norm() <= 1e-12);
    } else {
      CHECK(pattern_leq(rec.pattern, r.trace[i - 1].pattern));
    }
  }
  CHECK(rejected > 0);
  SolverConfig ref = cfg;
  ref.stop_tol = 1e-13;
  ref.max_iter = 100000;
  CHECK((r.solution.point - run_pg(p, ref).solution.point).norm() <= 1e-7);
}

TEST_CASE("predictor-corrector") {
  const CompositeProblem p = smooth_only(7);
  SolverConfig cfg;
  cfg.max_iter = 40;
  cfg.stop_tol = 0.0;
  CHECK((run_predictor_corrector(p, cfg).solution.point - run_pg(p, cfg).solution.point).norm() <=
        1e-12);

  const CompositeProblem q = oracle::random_lasso(8, 40, 30, 0.15);
  cfg.max_iter = 20000;
  cfg.stop_tol = 1e-10;
  cfg.full_step_period = 4;
  const SolverResult r = run_predictor_corrector(q, cfg);
  CHECK(r.converged);
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    const auto& rec = r.trace[i];
    const bool full = (rec.k - 1) % 4 == 0;
    CHECK(rec.accel_active == (full ? 0 : 1));
    if (!full) {
      CHECK(pattern_leq(rec.pattern, r.trace[i - 1].pattern));
      CHECK(rec.enforced_count == static_cast<Index>(r.trace[i - 1].pattern.count_zeros()));
    }
  }
  SolverConfig ref;
  ref.stop_tol = 1e-13;
  ref.max_iter = 100000;
  CHECK((r.solution.point - run_pg(q, ref).solution.point).norm() <= 1e-7);

  CompositeProblem nuc{matrix_ls_oracle(Matrix::Ones(2, 2)), Regularizer::nuclear(2, 2, 0.1),
                       std::nullopt, 0};
  CHECK_THROWS_AS(run_predictor_corrector(nuc, cfg), std::invalid_argument);
  cfg.full_step_period = 0;
  CHECK_THROWS_AS(run_predictor_corrector(q, cfg), std::invalid_argument);
}

TEST_CASE("debiasing scale") {
  const std::vector<Index> cand{0, 2};
  CHECK(debias_scaling(4, cand, 0.75).isApprox(vec({2.0, 1.0, 2.0, 1.0})));
  CHECK(averaged_projection(4, cand, 0.75).isApprox(vec({0.25, 1.0, 0.25, 1.0})));
  CHECK(debias_scaling(3, {}, 0.5) == Vector::Ones(3));

  Rng rng(43);
  const int draws = 20000;
  Vector mean = Vector::Zero(4);
  for (int d = 0; d < draws; ++d) {
    const auto mask = draw_enforced(rng, 4, cand, 0.75);
    for (Index i = 0; i < 4; ++i) mean(i) += mask[static_cast<std::size_t>(i)] ? 0.0 : 1.0;
  }
  mean /= draws;
  CHECK((mean - averaged_projection(4, cand, 0.75)).lpNorm<Eigen::Infinity>() <= 0.02);
  CHECK(mean(1) == 1.0);
}

TEST_CASE("random subspace") {
  const CompositeProblem p = oracle::random_lasso(9, 40, 30, 0.15);
  SolverConfig cfg;
  cfg.max_iter = 50;
  cfg.stop_tol = 0.0;
  SubspaceSamplerConfig smp;
  smp.refresh_wait = 1000;
  const SolverResult idle = run_random_subspace(p, cfg, smp);
  CHECK((idle.solution.point - run_pg(p, cfg).solution.point).norm() <= 1e-12);
  for (const auto& rec : idle.trace) CHECK(rec.enforced_count == 0);

  cfg.max_iter = 50000;
  cfg.stop_tol = 1e-11;
  smp.refresh_wait = 10;
  smp.seed = 5;
  const SolverResult r = run_random_subspace(p, cfg, smp);
  CHECK(r.converged);
  SolverConfig ref;
  ref.stop_tol = 1e-13;
  ref.max_iter = 100000;
  CHECK((r.solution.point - run_pg(p, ref).solution.point).norm() <= 1e-6);
  bool enforced = false;
  for (const auto& rec : r.trace) enforced = enforced || rec.enforced_count > 0;
  CHECK(enforced);
  CHECK(run_random_subspace(p, cfg, smp).solution.point == r.solution.point);

  smp.keep_probability = 1.0;
  CHECK_THROWS_AS(run_random_subspace(p, cfg, smp), std::invalid_argument);
  const CompositeProblem tv{p.smooth, Regularizer::tv1d(30, 0.1), std::nullopt, 0};
  smp.keep_probability = 0.5;
  CHECK_THROWS_AS(run_random_subspace(tv, cfg, smp), std::invalid_argument);
}
