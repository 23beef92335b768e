#include "oracles.hpp"

#include "proxident/linalg.hpp"
#include "proxident/problems.hpp"
#include "proxident/solvers.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace proxident;

TEST_CASE("least squares constants on small examples") {
  const auto id = least_squares_oracle(Matrix::Identity(3, 3), Vector::Zero(3));
  CHECK(id->lipschitz() == doctest::Approx(1.0));
  CHECK(id->strong_convexity() == doctest::Approx(1.0));
  Vector x(3);
  x << 1.0, -2.0, 0.5;
  CHECK(id->gradient(x).isApprox(x));
  CHECK(id->value(x) == doctest::Approx(0.5 * x.squaredNorm()));

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 1.0;
  const auto lsd = least_squares_oracle(d, Vector::Zero(2));
  CHECK(lsd->lipschitz() == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(lsd->strong_convexity() == doctest::Approx(1.0).epsilon(1e-9));

  // A wide matrix has a nontrivial kernel.
  Rng rng(1);
  const auto wide = least_squares_oracle(oracle::random_matrix(rng, 3, 6), Vector::Zero(3));
  CHECK(wide->strong_convexity() == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("Lipschitz constant matches a dense eigensolver") {
  Rng rng(4);
  for (int t = 0; t < 5; ++t) {
    const Matrix a = oracle::random_matrix(rng, 50, 20);
    const auto ls = least_squares_oracle(a, oracle::random_vector(rng, 50));
    Eigen::SelfAdjointEigenSolver<Matrix> eig(a.transpose() * a);
    const double lmax = eig.eigenvalues().maxCoeff();
    CHECK(std::abs(ls->lipschitz() - lmax) <= 1e-6 * lmax);
    CHECK(std::abs(ls->strong_convexity() - eig.eigenvalues().minCoeff()) <= 1e-6 * lmax);
  }
}

TEST_CASE("gradients agree with central finite differences") {
  Rng rng(6);
  const Matrix a = oracle::random_matrix(rng, 8, 5);
  const auto ls = least_squares_oracle(a, oracle::random_vector(rng, 8));
  Matrix mask = Matrix::Ones(3, 4);
  mask(0, 1) = mask(2, 3) = mask(1, 0) = 0.0;
  const auto masked = matrix_ls_oracle(oracle::random_matrix(rng, 3, 4), mask);
  const std::vector<const SmoothOracle*> oracles{ls.get(), masked.get()};
  for (const SmoothOracle* f : oracles) {
    const Vector x = oracle::random_vector(rng, f->dim());
    const Vector g = f->gradient(x);
    const double h = 1e-6;
    for (Index i = 0; i < f->dim(); ++i) {
      Vector e = Vector::Zero(f->dim());
      e(i) = h;
      const double fd = (f->value(x + e) - f->value(x - e)) / (2.0 * h);
      CHECK(std::abs(fd - g(i)) <= 1e-6 * (1.0 + std::abs(g(i))));
    }
  }
  CHECK(masked->strong_convexity() == 0.0);
  CHECK(matrix_ls_oracle(Matrix::Ones(2, 2))->strong_convexity() == 1.0);
}

TEST_CASE("prox of f") {
  Rng rng(8);
  const Matrix a = oracle::random_matrix(rng, 10, 6);
  const Vector b = oracle::random_vector(rng, 10);
  const auto ls = least_squares_oracle(a, b);
  const Vector v = oracle::random_vector(rng, 6);
  CHECK((ls->prox(v, 1e-8) - v).norm() <= 1e-6);
  const Vector p = ls->prox(v, 0.7);
  // Optimality: (p - v) / gamma + grad f(p) = 0.
  CHECK(((p - v) / 0.7 + ls->gradient(p)).norm() <= 1e-10);

  const auto id = least_squares_oracle(Matrix::Identity(4, 4), Vector::Zero(4));
  const Vector w = oracle::random_vector(rng, 4);
  CHECK((id->prox(w, 1.0) - 0.5 * w).norm() <= 1e-14);

  Matrix mask = Matrix::Ones(2, 2);
  mask(0, 0) = 0.0;
  const Matrix target = oracle::random_matrix(rng, 2, 2);
  const auto masked = matrix_ls_oracle(target, mask);
  const Vector x = oracle::random_vector(rng, 4);
  const Vector px = masked->prox(x, 2.0);
  CHECK(((px - x) / 2.0 + masked->gradient(px)).norm() <= 1e-12);
  CHECK_THROWS_AS(ls->prox(v, 0.0), std::invalid_argument);
}

TEST_CASE("quadratically conditioned lasso instances") {
  QcLassoParams prm;
  prm.n = 30;
  prm.m = 40;
  prm.support = 6;
  prm.delta = 0.4;
  prm.seed = 12;
  const CompositeProblem p = gen_qc_lasso(prm);
  REQUIRE(p.truth);
  const auto& t = *p.truth;
  CHECK(t.pattern.count_ones() == 6);
  CHECK(t.margin == 0.4);
  const Vector grad = p.smooth->gradient(t.x_star);
  for (Index i = 0; i < prm.n; ++i) {
    if (t.x_star(i) == 0.0)
      CHECK(std::abs(grad(i)) <= (1.0 - prm.delta) * prm.lambda + 1e-10);
    else
      CHECK(grad(i) == doctest::Approx(-prm.lambda * (t.x_star(i) > 0 ? 1.0 : -1.0)).epsilon(1e-9));
  }
  const ProxResult fixed = p.reg.prox(t.u_star, t.gamma);
  CHECK((fixed.point - t.x_star).norm() <= 1e-10);
  CHECK(fixed.pattern == t.pattern);
  CHECK((p.u_star_for(t.gamma) - t.u_star).norm() == 0.0);

  // Same seed, same instance.
  const CompositeProblem q = gen_qc_lasso(prm);
  CHECK(q.truth->u_star == t.u_star);

  prm.degenerate = true;
  const CompositeProblem d = gen_qc_lasso(prm);
  const Vector gd = d.smooth->gradient(d.truth->x_star);
  int boundary = 0;
  for (Index i = 0; i < prm.n; ++i)
    if (d.truth->x_star(i) == 0.0 && std::abs(std::abs(gd(i)) - prm.lambda) <= 1e-10) ++boundary;
  CHECK(boundary == 1);
  CHECK(d.truth->margin == 0.0);

  prm.delta = 1.0;
  CHECK_THROWS_AS(gen_qc_lasso(prm), std::invalid_argument);
}

TEST_CASE("random lasso uses the requested lambda ratio") {
  LassoParams prm;
  prm.m = 30;
  prm.n = 15;
  const CompositeProblem p = gen_lasso(prm);
  const auto& ls = dynamic_cast<const LeastSquaresOracle&>(*p.smooth);
  CHECK(p.reg.weight() ==
        doctest::Approx(0.1 * (ls.a().transpose() * ls.b()).lpNorm<Eigen::Infinity>()));
  CHECK_FALSE(p.truth);
}

TEST_CASE("low-rank instances identify their planted rank") {
  LowRankParams prm;
  prm.size = 8;
  prm.rank = 2;
  prm.seed = 5;
  const CompositeProblem p = gen_lowrank_matrix_problem(prm);
  REQUIRE(p.truth);
  CHECK(p.truth->pattern == SparsityPattern({1, 1, 0, 1, 1, 1, 1, 1, 1}));
  const Vector fp = p.reg.prox(p.truth->u_star, p.truth->gamma).point;
  CHECK((fp - p.truth->x_star).norm() <= 1e-9);

  SolverConfig cfg;
  cfg.max_iter = 20000;
  cfg.stop_tol = 1e-9;
  cfg.trace_every = 50;
  const SolverResult r = run_pg(p, cfg);
  CHECK(r.converged);
  CHECK(structure_size(r.solution.pattern, p.reg.collection()) == 2);
  CHECK(r.solution.pattern == p.truth->pattern);
  const SolverResult again = run_pg(p, cfg);
  CHECK(again.solution.point == r.solution.point);

  prm.degenerate = true;
  const CompositeProblem d = gen_lowrank_matrix_problem(prm);
  const Svd svd = thin_svd(as_matrix(d.truth->u_star, prm.size, prm.size));
  // One singular value of u_star beyond the planted rank sits on the threshold.
  CHECK(svd.sigma(prm.rank) == doctest::Approx(d.truth->gamma * prm.lambda).epsilon(1e-8));
  const SolverResult rd = run_pg(d, cfg);
  CHECK(structure_size(rd.solution.pattern, d.reg.collection()) >= 2);
}

TEST_CASE("finite-sum components average to f") {
  Rng rng(14);
  const Matrix a = oracle::random_matrix(rng, 23, 5);
  const Vector b = oracle::random_vector(rng, 23);
  for (std::size_t m : {std::size_t{1}, std::size_t{4}, std::size_t{23}}) {
    const auto ls = least_squares_oracle(a, b, m);
    CHECK(ls->component_count() == m);
    const Vector x = oracle::random_vector(rng, 5);
    double value = 0.0;
    Vector grad = Vector::Zero(5);
    for (std::size_t j = 0; j < m; ++j) {
      value += ls->component_value(j, x);
      grad += ls->component_gradient(j, x);
    }
    CHECK(value / static_cast<double>(m) == doctest::Approx(ls->value(x)).epsilon(1e-12));
    CHECK((grad / static_cast<double>(m) - ls->gradient(x)).norm() <= 1e-10 * (1.0 + grad.norm()));
    CHECK(ls->max_component_lipschitz() >= ls->lipschitz() - 1e-9);
    // Lipschitz on sampled pairs, per component.
    for (std::size_t j = 0; j < m; ++j)
      for (int s = 0; s < 5; ++s) {
        const Vector y = oracle::random_vector(rng, 5), z = oracle::random_vector(rng, 5);
        CHECK((ls->component_gradient(j, y) - ls->component_gradient(j, z)).norm() <=
              ls->component_lipschitz(j) * (y - z).norm() * (1.0 + 1e-9));
      }
  }
  CHECK(least_squares_oracle(a, b)->component_count() == 23);
  CHECK(least_squares_oracle(a, b, 3)->with_components(5)->component_count() == 5);
  CHECK_THROWS(matrix_ls_oracle(Matrix::Ones(2, 2))->with_components(2));
}
