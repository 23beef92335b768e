// Seeded instance generators with planted optimality certificates.

#include "proxident/linalg.hpp"
#include "proxident/problems.hpp"
#include "proxident/rng.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace proxident {

namespace {

Matrix gaussian_matrix(Rng& rng, Index rows, Index cols, double scale) {
  Matrix out(rows, cols);
  // Column-major fill order is part of the determinism contract.
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) out(i, j) = scale * rng.normal();
  return out;
}

Vector gaussian_vector(Rng& rng, Index n) {
  Vector out(n);
  for (Index i = 0; i < n; ++i) out(i) = rng.normal();
  return out;
}

std::vector<Index> random_subset(Rng& rng, Index n, Index k) {
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  for (Index i = 0; i < k; ++i) {
    const auto j = i + static_cast<Index>(rng.index(static_cast<std::uint64_t>(n - i)));
    std::swap(perm[i], perm[j]);
  }
  perm.resize(static_cast<std::size_t>(k));
  std::sort(perm.begin(), perm.end());
  return perm;
}

// Rewrites the component of every column of `a` along `r` so that
// a^T r = target exactly (up to rounding). Rank-one change of `a`.
void plant_certificate(Matrix& a, const Vector& r, const Vector& target) {
  const double rr = r.squaredNorm();
  for (Index i = 0; i < a.cols(); ++i) a.col(i) += ((target(i) - a.col(i).dot(r)) / rr) * r;
}

Matrix random_orthogonal(Rng& rng, Index n) {
  const Matrix g = gaussian_matrix(rng, n, n, 1.0);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  // Fix column signs from R's diagonal so Q is a function of g alone.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

GroundTruth make_truth(const CompositeProblem& p, const Vector& x_star, double margin) {
  GroundTruth t;
  t.x_star = x_star;
  t.gamma = 1.0 / p.smooth->lipschitz();
  t.u_star = x_star - t.gamma * p.smooth->gradient(x_star);
  t.margin = margin;
  return t;
}

}  // namespace

CompositeProblem gen_qc_lasso(const QcLassoParams& prm) {
  if (prm.n < 1 || prm.m < 1) throw std::invalid_argument("gen_qc_lasso: empty shape");
  if (prm.support < 1 || prm.support > std::min(prm.m, prm.n))
    throw std::invalid_argument("gen_qc_lasso: support size must lie in [1, min(m, n)]");
  if (!(prm.delta > 0.0 && prm.delta < 1.0))
    throw std::invalid_argument("gen_qc_lasso: delta must lie in (0, 1)");
  if (!(prm.lambda > 0.0)) throw std::invalid_argument("gen_qc_lasso: lambda must be positive");
  if (prm.degenerate && prm.support == prm.n)
    throw std::invalid_argument("gen_qc_lasso: degenerate instance needs an off-support entry");

  Rng rng(prm.seed);
  Matrix a = gaussian_matrix(rng, prm.m, prm.n, 1.0 / std::sqrt(static_cast<double>(prm.m)));
  const auto support = random_subset(rng, prm.n, prm.support);

  Vector x_star = Vector::Zero(prm.n);
  Vector z(prm.n);
  for (Index i = 0; i < prm.n; ++i) z(i) = rng.uniform(-(1.0 - prm.delta), 1.0 - prm.delta);
  for (Index i : support) {
    const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
    x_star(i) = sign * rng.uniform(1.0, 2.0);
    z(i) = sign;
  }
  if (prm.degenerate) {
    for (Index i = 0; i < prm.n; ++i)
      if (x_star(i) == 0.0) {
        z(i) = 1.0;
        break;
      }
  }

  Vector r = gaussian_vector(rng, prm.m);
  r *= prm.lambda * std::sqrt(static_cast<double>(prm.m)) / r.norm();
  plant_certificate(a, r, prm.lambda * z);
  const Vector b = a * x_star + r;

  CompositeProblem p{least_squares_oracle(a, b), Regularizer::l1(prm.n, prm.lambda), std::nullopt,
                     prm.seed};
  GroundTruth t = make_truth(p, x_star, prm.degenerate ? 0.0 : prm.delta);
  t.pattern = pattern_of(x_star, p.reg.collection());
  p.truth = std::move(t);
  return p;
}

CompositeProblem gen_lasso(const LassoParams& prm) {
  if (prm.m < 1 || prm.n < 1) throw std::invalid_argument("gen_lasso: empty shape");
  if (!(prm.lambda_ratio > 0.0 && prm.lambda_ratio < 1.0))
    throw std::invalid_argument("gen_lasso: lambda ratio must lie in (0, 1)");
  if (!(prm.sparsity > 0.0 && prm.sparsity <= 1.0))
    throw std::invalid_argument("gen_lasso: sparsity must lie in (0, 1]");
  Rng rng(prm.seed);
  const Matrix a = gaussian_matrix(rng, prm.m, prm.n, 1.0 / std::sqrt(static_cast<double>(prm.m)));
  const Index s = std::max<Index>(1, std::lround(prm.sparsity * static_cast<double>(prm.n)));
  Vector x_true = Vector::Zero(prm.n);
  for (Index i : random_subset(rng, prm.n, s)) x_true(i) = rng.normal();
  Vector b = a * x_true;
  for (Index i = 0; i < prm.m; ++i) b(i) += prm.noise * rng.normal();
  const double lambda = prm.lambda_ratio * (a.transpose() * b).lpNorm<Eigen::Infinity>();
  return {least_squares_oracle(a, b), Regularizer::l1(prm.n, lambda), std::nullopt, prm.seed};
}

CompositeProblem gen_lowrank_matrix_problem(const LowRankParams& prm) {
  const Index n = prm.size;
  if (n < 1) throw std::invalid_argument("gen_lowrank: size must be positive");
  if (prm.rank < 0 || prm.rank > n) throw std::invalid_argument("gen_lowrank: rank > size");
  if (prm.degenerate && prm.rank == n)
    throw std::invalid_argument("gen_lowrank: degenerate instance needs rank < size");
  if (!(prm.margin > 0.0 && prm.margin < 1.0))
    throw std::invalid_argument("gen_lowrank: margin must lie in (0, 1)");
  const Index dim = n * n;
  const Index m = prm.measurements > 0 ? prm.measurements : 2 * dim;

  Rng rng(prm.seed);
  const Matrix left = random_orthogonal(rng, n);
  const Matrix right = random_orthogonal(rng, n);
  Vector s(n), w(n);
  for (Index i = 0; i < n; ++i) {
    s(i) = i < prm.rank ? rng.uniform(1.0, 2.0) : 0.0;
    w(i) = i < prm.rank ? 1.0 : rng.uniform(0.0, 1.0 - prm.margin);
  }
  if (prm.degenerate) w(prm.rank) = 1.0;
  Vector top = s.head(prm.rank);
  std::sort(top.data(), top.data() + top.size(), std::greater<>());
  s.head(prm.rank) = top;

  const Matrix x_star = left * s.asDiagonal() * right.transpose();
  // Subgradient lambda * (U_r V_r^T + W) with W on the orthogonal complements.
  const Matrix certificate = prm.lambda * (left * w.asDiagonal() * right.transpose());

  Matrix a = gaussian_matrix(rng, m, dim, 1.0 / std::sqrt(static_cast<double>(m)));
  Vector r = gaussian_vector(rng, m);
  r *= prm.lambda * std::sqrt(static_cast<double>(m)) / r.norm();
  plant_certificate(a, r, flatten(certificate));
  const Vector xs = flatten(x_star);
  const Vector b = a * xs + r;

  CompositeProblem p{least_squares_oracle(a, b, 1), Regularizer::nuclear(n, n, prm.lambda),
                     std::nullopt, prm.seed};
  GroundTruth t = make_truth(p, xs, prm.degenerate ? 0.0 : prm.margin);
  t.pattern = SparsityPattern(static_cast<std::size_t>(n + 1), true);
  t.pattern.set(static_cast<std::size_t>(prm.rank), false);
  p.truth = std::move(t);
  return p;
}

}  // namespace proxident
