#pragma once

#include "proxident/core.hpp"
#include "proxident/prox.hpp"

#include <Eigen/Cholesky>

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace proxident {

/// Smooth part f of a composite problem. When the oracle is a finite sum,
/// f = (1/m) sum_j f^j and the component accessors describe the f^j.
class SmoothOracle {
 public:
  virtual ~SmoothOracle() = default;

  virtual Index dim() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  virtual double lipschitz() const = 0;
  virtual double strong_convexity() const = 0;

  virtual std::size_t component_count() const { return 0; }
  virtual double component_value(std::size_t j, const Vector& x) const;
  virtual Vector component_gradient(std::size_t j, const Vector& x) const;
  virtual double component_lipschitz(std::size_t j) const;
  virtual double component_strong_convexity(std::size_t j) const;
  /// Same function split into m components (throws if not supported).
  virtual std::shared_ptr<const SmoothOracle> with_components(std::size_t m) const;

  virtual bool has_prox() const { return false; }
  /// prox_{gamma f}(v); throws std::logic_error when has_prox() is false.
  virtual Vector prox(const Vector& v, double gamma) const;

  double max_component_lipschitz() const;
  double min_component_strong_convexity() const;
};

/// f(x) = 0.5 * ||A x - b||^2, split by contiguous row blocks into
/// components f^j = m * 0.5 * ||A_j x - b_j||^2 (so their mean is f).
class LeastSquaresOracle final : public SmoothOracle {
 public:
  /// components = 0 selects one component per row.
  LeastSquaresOracle(Matrix a, Vector b, std::size_t components = 0);

  Index dim() const override { return a_.cols(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  double lipschitz() const override { return lipschitz_; }
  /// Computed on first use.
  double strong_convexity() const override;

  std::size_t component_count() const override { return blocks_.size(); }
  double component_value(std::size_t j, const Vector& x) const override;
  Vector component_gradient(std::size_t j, const Vector& x) const override;
  double component_lipschitz(std::size_t j) const override;
  double component_strong_convexity(std::size_t j) const override;
  std::shared_ptr<const SmoothOracle> with_components(std::size_t m) const override;

  bool has_prox() const override { return true; }
  /// Solves (I + gamma A^T A) x = v + gamma A^T b; the factorization for the
  /// most recent gamma is cached.
  Vector prox(const Vector& v, double gamma) const override;

  const Matrix& a() const { return a_; }
  const Vector& b() const { return b_; }

 private:
  struct Block {
    Index start;
    Index rows;
  };
  void compute_component_constants() const;

  Matrix a_;
  Vector b_;
  std::vector<Block> blocks_;
  bool use_gram_;
  Matrix gram_;
  Vector atb_;
  double lipschitz_;

  mutable std::once_flag mu_once_;
  mutable double mu_ = 0.0;
  mutable std::once_flag components_once_;
  mutable std::vector<double> component_l_;
  mutable std::vector<double> component_mu_;
  mutable std::mutex prox_mutex_;
  mutable std::shared_ptr<const Eigen::LLT<Matrix>> prox_factor_;
  mutable double prox_gamma_ = -1.0;
};

std::shared_ptr<const LeastSquaresOracle> least_squares_oracle(const Matrix& a, const Vector& b,
                                                               std::size_t components = 0);

/// f(X) = 0.5 * ||M .* (X - B)||_F^2 for a 0/1 mask M (all ones = identity
/// map). Points are column-major flattened matrices.
class MaskedMatrixOracle final : public SmoothOracle {
 public:
  MaskedMatrixOracle(Matrix target, Matrix mask);

  Index dim() const override { return target_.size(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  double lipschitz() const override { return 1.0; }
  double strong_convexity() const override { return full_ ? 1.0 : 0.0; }
  bool has_prox() const override { return true; }
  Vector prox(const Vector& v, double gamma) const override;

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }

 private:
  Index rows_, cols_;
  Vector target_;
  Vector mask_;
  bool full_;
};

/// Identity map when no mask is given.
std::shared_ptr<const MaskedMatrixOracle> matrix_ls_oracle(const Matrix& target,
                                                           std::optional<Matrix> mask = {});

/// Planted optimum of a generated instance: x_star = prox_{gamma g}(u_star)
/// with u_star = x_star - gamma * grad f(x_star).
struct GroundTruth {
  Vector x_star;
  Vector u_star;
  double gamma = 0.0;
  /// Certificate margin delta: off-structure dual entries sit at most
  /// (1 - delta) * lambda from the origin.
  double margin = 0.0;
  SparsityPattern pattern;
};

struct CompositeProblem {
  std::shared_ptr<const SmoothOracle> smooth;
  Regularizer reg;
  std::optional<GroundTruth> truth;
  std::uint64_t seed = 0;

  double objective(const Vector& x) const { return smooth->value(x) + reg.value(x); }
  Index dim() const { return smooth->dim(); }
  /// x_star - gamma * grad f(x_star) for another stepsize; needs ground truth.
  Vector u_star_for(double gamma) const;
};

/// Lasso whose solution has support size s and whose dual certificate
/// satisfies |grad f(x_star)_i| <= (1 - delta) * lambda off the support.
/// With `degenerate`, one off-support entry is pinned to the boundary.
struct QcLassoParams {
  Index n = 20;
  Index m = 50;
  Index support = 5;
  double delta = 0.5;
  double lambda = 0.2;
  bool degenerate = false;
  std::uint64_t seed = 1;
};
CompositeProblem gen_qc_lasso(const QcLassoParams& params);

/// Random lasso: Gaussian A (entries of variance 1/m), sparse ground signal,
/// small noise, lambda = ratio * ||A^T b||_inf. No ground truth attached.
struct LassoParams {
  Index m = 200;
  Index n = 100;
  double sparsity = 0.1;
  double noise = 0.01;
  double lambda_ratio = 0.1;
  std::uint64_t seed = 1;
};
CompositeProblem gen_lasso(const LassoParams& params);

/// Nuclear-norm regularized matrix least squares with a Gaussian measurement
/// map on vec(X) and a planted rank-r optimum. The degenerate variant puts
/// one singular value of the u_star off-range block exactly on the threshold.
struct LowRankParams {
  Index size = 20;
  Index rank = 4;
  Index measurements = 0;  // 0 selects 2 * size^2
  double lambda = 0.5;
  double margin = 0.3;
  bool degenerate = false;
  std::uint64_t seed = 1;
};
CompositeProblem gen_lowrank_matrix_problem(const LowRankParams& params);

}  // namespace proxident
