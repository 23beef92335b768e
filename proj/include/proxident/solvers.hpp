#pragma once

#include "proxident/core.hpp"
#include "proxident/problems.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace proxident {

struct SolverConfig {
  /// Stepsize; the algorithm default is used when empty.
  std::optional<double> gamma;
  int max_iter = 10000;
  /// Stop once ||u_{k+1} - u_k|| <= stop_tol.
  double stop_tol = 1e-10;
  std::uint64_t seed = 0;
  int trace_every = 1;
  /// Starting point, zero when empty.
  std::optional<Vector> x0;
  /// Keep u_k in every trace record.
  bool record_iterates = false;
  /// Fill wallclock_s; when false the column is written as 0.
  bool timing = true;
  /// SAGA: re-derive the gradient-table mean every iteration and throw if it
  /// drifts from the incrementally maintained one.
  bool audit = false;
  /// Predictor-corrector: a full-space step every `full_step_period` steps.
  int full_step_period = 5;
};

struct TraceRecord {
  int k = 0;
  double objective = 0.0;
  SparsityPattern pattern;
  Index nnz = 0;
  double u_step = 0.0;
  std::int64_t comm_coords = 0;
  double wallclock_s = 0.0;
  // Exploit solvers only (-1 otherwise).
  int accel_active = -1;
  Index enforced_count = -1;
  /// Filled when SolverConfig::record_iterates is set.
  Vector u;
};

using Trace = std::vector<TraceRecord>;

struct SolverResult {
  StructuredPoint solution;
  Trace trace;
  Vector u_final;
  double gamma = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string solver;
};

/// Proximal gradient, gamma in (0, 2/L); default 1/L.
SolverResult run_pg(const CompositeProblem& problem, const SolverConfig& config);

/// Accelerated proximal gradient with alpha_k = (k-1)/(k+3), gamma in
/// (0, 1/L]; default 1/L.
SolverResult run_apg(const CompositeProblem& problem, const SolverConfig& config);

/// Douglas-Rachford with prox of f; any gamma > 0, default 1/L.
SolverResult run_dr(const CompositeProblem& problem, const SolverConfig& config);

/// SAGA over the oracle's finite-sum components, gamma in (0, 1/(3 L_max)];
/// default 1/(3 L_max). Stops on a moving average (window = number of
/// components) of the u-steps.
SolverResult run_saga(const CompositeProblem& problem, const SolverConfig& config);

/// Worker completion-time model for the asynchronous simulator. A worker
/// busy on a point for 1 + d time units, with d drawn from the model.
struct DelayModel {
  enum class Kind { Constant, Uniform, Geometric };
  Kind kind = Kind::Constant;
  double a = 0.0;  // constant d, uniform lower bound, geometric success probability
  double b = 0.0;  // uniform upper bound

  static DelayModel constant(double d) { return {Kind::Constant, d, 0.0}; }
  static DelayModel uniform(double lo, double hi) { return {Kind::Uniform, lo, hi}; }
  static DelayModel geometric(double q) { return {Kind::Geometric, q, 0.0}; }
  /// "constant:D", "uniform:LO:HI", "geometric:Q"
  static DelayModel parse(const std::string& text);
  std::string describe() const;
};

enum class Encoding { Dense, Sparse };

struct DavePgOptions {
  std::size_t workers = 10;
  DelayModel delay = DelayModel::constant(0.0);
  Encoding encoding = Encoding::Dense;
};

/// Asynchronous master/worker proximal gradient, simulated by a seeded
/// single-threaded event queue. gamma in (0, 2/(mu + L)] with
/// L = max component Lipschitz constant and mu = min component strong
/// convexity; default is the upper end. comm_coords counts coordinates of
/// the iterates sent from the master to the workers.
SolverResult run_dave_pg(const CompositeProblem& problem, const SolverConfig& config,
                         const DavePgOptions& options);

/// ||x - prox_{gamma g}(x - gamma grad f(x))||
double fixed_point_residual(const CompositeProblem& problem, const Vector& x, double gamma);

/// Records the trace contract shared by every solver: 1-based iteration
/// index, a record whenever (k - 1) % trace_every == 0.
class TraceWriter {
 public:
  TraceWriter(const CompositeProblem& problem, const SolverConfig& config);
  /// Returns the record if k is traced, nullptr otherwise.
  TraceRecord* record(int k, const Vector& x, const SparsityPattern& pattern, double u_step,
                      const Vector& u);
  Trace take() { return std::move(trace_); }

 private:
  const CompositeProblem& problem_;
  const SolverConfig& config_;
  Trace trace_;
  double start_;
};

}  // namespace proxident
