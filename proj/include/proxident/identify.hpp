#pragma once

#include "proxident/core.hpp"
#include "proxident/problems.hpp"
#include "proxident/solvers.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace proxident {

struct IdentificationReport {
  /// Trace index after which the pattern never changes.
  std::optional<std::size_t> first_stable_iter;
  SparsityPattern pattern_final;
  /// Whether the structure size (nnz or rank) never increased.
  bool monotone = true;
  /// Number of pattern changes between consecutive records.
  std::size_t oscillation_count = 0;

  /// key=value lines: first_stable_iter, oscillation_count, monotone,
  /// pattern_hash, zeros.
  std::string to_text() const;
};

IdentificationReport analyze_trace(const Trace& trace);

/// Closed-form max of S(prox_{gamma lambda |.|_1}(u)) over the ball of radius
/// eps around u_star: bit i is 1 iff |u_star_i| + eps > gamma*lambda.
SparsityPattern enlarged_bound_l1(const Vector& u_star, double gamma_lambda, double eps);

/// Coordinate-wise max of S(prox(u)) over uniform draws in the eps-ball. A
/// sampled lower estimate of the true maximum.
SparsityPattern enlarged_bound_sampled(const Regularizer& reg, const Vector& u_star, double gamma,
                                       double eps, std::size_t n_samples = 1000,
                                       std::uint64_t seed = 0);

/// Whether prox maps the whole eps-ball around u_star onto the pattern of
/// x_star. Exact for L1; for other kinds every one of `n_samples` draws must
/// reproduce the pattern.
bool qc_check(const CompositeProblem& problem, double eps, std::size_t n_samples = 1000,
              std::uint64_t seed = 0);

/// Coordinates certified zero at the optimum given a ball that contains
/// u_star: {i : |center_i| + radius <= gamma*lambda}. Indices are 0-based.
std::vector<Index> safe_screen_l1(const Vector& center, double radius, double gamma_lambda);

struct RateModel {
  enum class Kind { Sublinear, Linear };
  Kind kind = Kind::Sublinear;
  double rho = 0.0;

  static RateModel sublinear() { return {Kind::Sublinear, 0.0}; }
  static RateModel linear(double rho) { return {Kind::Linear, rho}; }
};

/// Smallest k >= 1 with C/k <= eps (sublinear) or C*rho^k <= eps (linear).
long long identification_time_estimate(double c, RateModel rate, double eps);

}  // namespace proxident
