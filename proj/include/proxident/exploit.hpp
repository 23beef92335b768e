#pragma once

#include "proxident/core.hpp"
#include "proxident/problems.hpp"
#include "proxident/rng.hpp"
#include "proxident/solvers.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace proxident {

/// (index, value) encoding of the nonzero entries of a vector. Indices are
/// 0-based and strictly increasing.
struct SparseMessage {
  std::vector<std::pair<Index, double>> entries;
  Index ambient = 0;

  std::int64_t cost() const { return static_cast<std::int64_t>(entries.size()); }
};

SparseMessage sparse_encode(const Vector& x);
Vector sparse_decode(const SparseMessage& message);

/// Momentum is kept only while the candidate stays on every manifold the
/// current iterate lies on; otherwise the PG step is taken and momentum is
/// restarted. Trace records carry accel_active.
SolverResult run_pg_adaptive_inertia(const CompositeProblem& problem, const SolverConfig& config);

/// Gradient steps projected onto the intersection of the identified linear
/// manifolds, with a full-space step every config.full_step_period
/// iterations (the first iteration is a full step). Stops when a full step
/// moves x by at most stop_tol.
SolverResult run_predictor_corrector(const CompositeProblem& problem, const SolverConfig& config);

struct SubspaceSamplerConfig {
  /// Probability that the constraint of an identified manifold is enforced.
  double keep_probability = 0.5;
  /// Initial (and minimal) number of iterations between collection refreshes.
  int refresh_wait = 10;
  std::uint64_t seed = 0;
};

/// One draw of the enforced mask: each candidate coordinate is enforced
/// independently with probability p.
std::vector<char> draw_enforced(Rng& rng, Index n, const std::vector<Index>& candidates, double p);

/// Diagonal of Q: (1 - p)^(-1/2) on candidate coordinates, 1 elsewhere.
Vector debias_scaling(Index n, const std::vector<Index>& candidates, double p);

/// Diagonal of E[proj_W]: 1 - p on candidate coordinates, 1 elsewhere.
Vector averaged_projection(Index n, const std::vector<Index>& candidates, double p);

/// Randomized subspace proximal gradient for L1 problems. Stops once the
/// full-space fixed-point residual drops to stop_tol. Trace records carry
/// enforced_count.
SolverResult run_random_subspace(const CompositeProblem& problem, const SolverConfig& config,
                                 const SubspaceSamplerConfig& sampler);

}  // namespace proxident
