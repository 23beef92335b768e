#pragma once

#include "proxident/core.hpp"
#include "proxident/solvers.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace proxident {

/// Two 2-d lasso instances whose design matrices differ by a relative
/// perturbation of `perturbation` in Frobenius norm.
struct Fig1Options {
  std::uint64_t seed = 1;
  double perturbation = 0.01;
  double lambda = 0.5;
};

struct Fig1Result {
  Vector lasso_a, lasso_b;
  Vector ls_a, ls_b;
  SparsityPattern pattern_a, pattern_b;
  /// ||ls_a - ls_b|| / ||ls_a||
  double ls_relative_change = 0.0;
  double perturbation = 0.0;
  bool shared_axis() const { return pattern_a == pattern_b && pattern_a.count_zeros() > 0; }
};

Fig1Result replicate_fig1(const Fig1Options& options,
                          const std::optional<std::filesystem::path>& outdir = {});

struct Fig2Options {
  std::uint64_t seed = 1;
  int instances = 50;
  int size = 20;
  int rank = 4;
  int max_iter = 20000;
  double stop_tol = 1e-9;
  bool timing = false;
};

struct Fig2Run {
  bool degenerate = false;
  int instance = 0;
  std::vector<Index> ranks;  // rank of x_k along the run
  int iterations = 0;
  bool converged = false;
  Index final_rank() const { return ranks.empty() ? -1 : ranks.back(); }
};

struct Fig2Result {
  std::vector<Fig2Run> runs;
  double well_posed_mean_rank = 0.0;
  double degenerate_mean_rank = 0.0;
  /// Fraction of well-posed runs ending at exactly the planted rank.
  double well_posed_exact_fraction = 0.0;
};

Fig2Result replicate_fig2(const Fig2Options& options,
                          const std::optional<std::filesystem::path>& outdir = {});

struct Fig3Options {
  std::uint64_t seed = 1;
  int workers = 10;
  DelayModel delay = DelayModel::uniform(0.0, 5.0);
  double gap = 1e-6;
  int max_iter = 400000;
  bool timing = false;
};

struct Fig3Series {
  Encoding encoding = Encoding::Dense;
  Trace trace;
  /// Cumulative coordinates exchanged when the gap first drops below the
  /// target; -1 if never reached.
  std::int64_t coords_at_gap = -1;
  int iteration_at_gap = -1;
};

struct Fig3Result {
  double reference_objective = 0.0;
  Fig3Series dense, sparse;
  double ratio = 0.0;  // sparse / dense coordinates at the gap
  double final_support_fraction = 0.0;
  std::size_t oscillation_count = 0;
};

Fig3Result replicate_fig3(const Fig3Options& options,
                          const std::optional<std::filesystem::path>& outdir = {});

}  // namespace proxident
