#pragma once

#include "proxident/core.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace proxident {

/// Output of a structure-reporting proximal operator. The pattern is read
/// off the branch taken by the computation, never re-tested numerically.
struct ProxResult {
  Vector point;
  SparsityPattern pattern;
  std::optional<double> objective_residual;

  StructuredPoint structured() const { return {point, pattern, ProxBranch{}}; }
};

// Free operators for g = lambda * r. `gamma` must be positive; the effective
// threshold is gamma * lambda. Patterns are over the canonical collection of
// the kind: coordinates(n), adjacent(n), or rank_levels(rows, cols).

/// Soft thresholding; zero branch on |u_i| <= gamma*lambda.
ProxResult prox_l1(const Vector& u, double gamma, double lambda = 1.0);

/// Hard thresholding; zero branch on |u_i| <= sqrt(2*gamma*lambda).
ProxResult prox_l0(const Vector& u, double gamma, double lambda = 1.0);

/// 1-D total variation, exact (taut string). Requires n >= 2.
ProxResult prox_tv1d(const Vector& u, double gamma, double lambda = 1.0);

/// 1-D Potts (jump count) by O(n^2) dynamic programming. Requires n >= 2.
ProxResult prox_potts1d(const Vector& u, double gamma, double lambda = 1.0);

/// Singular value soft thresholding. Point is returned column-major.
ProxResult prox_nuclear(const Matrix& u, double gamma, double lambda = 1.0);

/// Singular value hard thresholding at sqrt(2*gamma*lambda).
ProxResult prox_rank(const Matrix& u, double gamma, double lambda = 1.0);

/// Raw TV denoising: y minimizing threshold*TV(y) + 0.5*||y - u||^2.
/// `jump_after[i]` (size n-1) is set when a segment boundary lies between
/// i and i+1.
void tv1d_denoise(std::span<const double> u, double threshold, std::span<double> y,
                  std::vector<char>& jump_after);

enum class RegularizerKind { L1, L0, TV1D, Potts1D, Nuclear, Rank };

std::string_view to_string(RegularizerKind kind);
RegularizerKind regularizer_kind_from_string(std::string_view name);

/// g = weight * r together with its bound collection.
class Regularizer {
 public:
  /// Throws std::invalid_argument if the collection family does not match
  /// the kind, or the weight is negative. A zero weight makes prox the
  /// identity (the zero branch then fires only on exact membership).
  Regularizer(RegularizerKind kind, double weight, ManifoldCollection collection);

  static Regularizer l1(Index n, double weight);
  static Regularizer l0(Index n, double weight);
  static Regularizer tv1d(Index n, double weight);
  static Regularizer potts1d(Index n, double weight);
  static Regularizer nuclear(Index rows, Index cols, double weight);
  static Regularizer rank(Index rows, Index cols, double weight);
  /// Canonical collection for the kind over `shape`.
  static Regularizer make(RegularizerKind kind, Shape shape, double weight);

  RegularizerKind kind() const { return kind_; }
  double weight() const { return weight_; }
  const ManifoldCollection& collection() const { return collection_; }
  const Shape& shape() const { return collection_.ambient(); }
  bool convex() const;

  double value(const Vector& x) const;
  ProxResult prox(const Vector& u, double gamma) const;

 private:
  RegularizerKind kind_;
  double weight_;
  ManifoldCollection collection_;
};

/// Upper bound on dist((u - x)/gamma, subdifferential of g at x); zero iff
/// x = prox_{gamma g}(u). Exact distance for L1 and Nuclear. For TV1D the
/// bound is |sum of the residual| + 2 * (box violation of the cumulative
/// dual variable). Throws std::invalid_argument for nonconvex kinds.
double prox_optimality_residual(const Regularizer& reg, const Vector& u, double gamma,
                                const Vector& x);

}  // namespace proxident
