#include "proxident/exploit.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace proxident {

namespace {

void check_common(const CompositeProblem& problem, const SolverConfig& cfg, const char* who) {
  if (cfg.max_iter < 1 || cfg.trace_every < 1 || !(cfg.stop_tol >= 0.0))
    throw std::invalid_argument(std::string(who) + ": invalid iteration settings");
  if (problem.reg.shape().size() != problem.dim())
    throw std::invalid_argument(std::string(who) + ": regularizer and oracle dimensions differ");
  if (cfg.x0 && cfg.x0->size() != problem.dim())
    throw std::invalid_argument(std::string(who) + ": x0 has the wrong dimension");
}

double checked_gamma(const SolverConfig& cfg, double fallback, double hi, bool closed,
                     const char* who) {
  const double gamma = cfg.gamma.value_or(fallback);
  const bool ok = gamma > 0.0 && (closed ? gamma <= hi * (1.0 + 1e-12) : gamma < hi);
  if (!ok) {
    std::ostringstream os;
    os.precision(17);
    os << who << ": gamma = " << gamma << " outside admissible range (0, " << hi
       << (closed ? "]" : ")");
    throw std::invalid_argument(os.str());
  }
  return gamma;
}

// True when `next` leaves a manifold that `current` lies on.
bool loses_structure(const SparsityPattern& current, const SparsityPattern& next) {
  for (std::size_t i = 0; i < current.size(); ++i)
    if (!current[i] && next[i]) return true;
  return false;
}

SolverResult pack(const char* name, const ProxResult& last, Vector u, double gamma, int iters,
                  bool converged, TraceWriter& writer) {
  SolverResult out;
  out.solution = last.structured();
  out.trace = writer.take();
  out.u_final = std::move(u);
  out.gamma = gamma;
  out.iterations = iters;
  out.converged = converged;
  out.solver = name;
  return out;
}

}  // namespace

SparseMessage sparse_encode(const Vector& x) {
  SparseMessage msg;
  msg.ambient = x.size();
  for (Index i = 0; i < x.size(); ++i)
    if (x(i) != 0.0) msg.entries.emplace_back(i, x(i));
  return msg;
}

Vector sparse_decode(const SparseMessage& msg) {
  Vector x = Vector::Zero(msg.ambient);
  Index prev = -1;
  for (const auto& [i, v] : msg.entries) {
    if (i <= prev || i >= msg.ambient)
      throw std::invalid_argument("sparse_decode: indices must be increasing and in range");
    x(i) = v;
    prev = i;
  }
  return x;
}

SolverResult run_pg_adaptive_inertia(const CompositeProblem& problem, const SolverConfig& cfg) {
  check_common(problem, cfg, "run_pg_adaptive_inertia");
  const double lip = problem.smooth->lipschitz();
  const double gamma = checked_gamma(cfg, 1.0 / lip, 1.0 / lip, true, "run_pg_adaptive_inertia");
  TraceWriter writer(problem, cfg);
  const auto& f = *problem.smooth;

  Vector x = cfg.x0 ? *cfg.x0 : Vector::Zero(problem.dim());
  Vector x_prev = x;
  Vector u_prev = x;
  ProxResult last{x, pattern_of(x, problem.reg.collection(), Membership::standard()), {}};
  SparsityPattern current = last.pattern;
  int t = 1;
  bool converged = false;
  int k = 1;
  for (; k <= cfg.max_iter; ++k) {
    const double alpha = static_cast<double>(t - 1) / static_cast<double>(t + 3);
    const Vector y = x + alpha * (x - x_prev);
    Vector u = y - gamma * f.gradient(y);
    ProxResult cand = problem.reg.prox(u, gamma);
    bool accelerated = alpha > 0.0;
    if (accelerated && loses_structure(current, cand.pattern)) {
      u = x - gamma * f.gradient(x);
      cand = problem.reg.prox(u, gamma);
      accelerated = false;
      t = 1;
    } else {
      ++t;
    }
    last = std::move(cand);
    x_prev = std::move(x);
    x = last.point;
    current = last.pattern;
    const double step = (u - u_prev).norm();
    if (TraceRecord* rec = writer.record(k, x, last.pattern, step, u))
      rec->accel_active = accelerated ? 1 : 0;
    u_prev = std::move(u);
    if (k > 1 && step <= cfg.stop_tol) {
      converged = true;
      break;
    }
  }
  return pack("adaptive-inertia", last, u_prev, gamma, std::min(k, cfg.max_iter), converged,
              writer);
}

SolverResult run_predictor_corrector(const CompositeProblem& problem, const SolverConfig& cfg) {
  check_common(problem, cfg, "run_predictor_corrector");
  if (!problem.reg.collection().is_linear())
    throw std::invalid_argument("run_predictor_corrector: needs a linear manifold collection");
  if (cfg.full_step_period < 1)
    throw std::invalid_argument("run_predictor_corrector: full_step_period must be >= 1");
  const double lip = problem.smooth->lipschitz();
  const double gamma = checked_gamma(cfg, 1.0 / lip, 2.0 / lip, false, "run_predictor_corrector");
  TraceWriter writer(problem, cfg);
  const auto& coll = problem.reg.collection();

  Vector x = cfg.x0 ? *cfg.x0 : Vector::Zero(problem.dim());
  Vector u_prev = x;
  ProxResult last{x, pattern_of(x, coll, Membership::standard()), {}};
  bool converged = false;
  int k = 1;
  for (; k <= cfg.max_iter; ++k) {
    const bool full = (k - 1) % cfg.full_step_period == 0;
    const Vector g = problem.smooth->gradient(x);
    Vector u = full ? Vector(x - gamma * g)
                    : Vector(x - gamma * project_identified(coll, last.pattern, g));
    const auto held = static_cast<Index>(last.pattern.count_zeros());
    ProxResult next = problem.reg.prox(u, gamma);
    const double move = (next.point - x).norm();
    last = std::move(next);
    x = last.point;
    const double step = (u - u_prev).norm();
    if (TraceRecord* rec = writer.record(k, x, last.pattern, step, u)) {
      rec->accel_active = full ? 0 : 1;
      rec->enforced_count = full ? 0 : held;
    }
    u_prev = std::move(u);
    if (full && move <= cfg.stop_tol) {
      converged = true;
      break;
    }
  }
  return pack("predictor-corrector", last, u_prev, gamma, std::min(k, cfg.max_iter), converged,
              writer);
}

std::vector<char> draw_enforced(Rng& rng, Index n, const std::vector<Index>& candidates,
                                double p) {
  std::vector<char> mask(static_cast<std::size_t>(n), 0);
  for (Index i : candidates) mask[static_cast<std::size_t>(i)] = rng.bernoulli(p) ? 1 : 0;
  return mask;
}

Vector debias_scaling(Index n, const std::vector<Index>& candidates, double p) {
  Vector q = Vector::Ones(n);
  for (Index i : candidates) q(i) = 1.0 / std::sqrt(1.0 - p);
  return q;
}

Vector averaged_projection(Index n, const std::vector<Index>& candidates, double p) {
  Vector d = Vector::Ones(n);
  for (Index i : candidates) d(i) = 1.0 - p;
  return d;
}

SolverResult run_random_subspace(const CompositeProblem& problem, const SolverConfig& cfg,
                                 const SubspaceSamplerConfig& smp) {
  check_common(problem, cfg, "run_random_subspace");
  if (problem.reg.kind() != RegularizerKind::L1)
    throw std::invalid_argument("run_random_subspace: needs an L1 regularizer");
  if (!(smp.keep_probability > 0.0 && smp.keep_probability < 1.0))
    throw std::invalid_argument("run_random_subspace: keep probability must lie in (0, 1)");
  if (smp.refresh_wait < 1)
    throw std::invalid_argument("run_random_subspace: refresh wait must be >= 1");
  const double lip = problem.smooth->lipschitz();
  const double gamma = checked_gamma(cfg, 1.0 / lip, 2.0 / lip, false, "run_random_subspace");
  const double p = smp.keep_probability;
  const Index n = problem.dim();
  Rng rng(smp.seed);
  TraceWriter writer(problem, cfg);

  Vector x = cfg.x0 ? *cfg.x0 : Vector::Zero(n);
  Vector u_prev = x;
  ProxResult last{x, pattern_of(x, problem.reg.collection(), Membership::standard()), {}};
  std::vector<Index> frozen;
  Vector q = Vector::Ones(n);
  int wait = smp.refresh_wait;
  int next_refresh = smp.refresh_wait;
  bool converged = false;
  int k = 1;
  for (; k <= cfg.max_iter; ++k) {
    if (k == next_refresh) {
      std::vector<Index> fresh;
      for (std::size_t i : last.pattern.zero_indices()) fresh.push_back(static_cast<Index>(i));
      wait = fresh != frozen ? 2 * wait : std::max(smp.refresh_wait, wait / 2);
      frozen = std::move(fresh);
      q = debias_scaling(n, frozen, p);
      next_refresh = k + wait;
    }
    const Vector y = x - gamma * problem.smooth->gradient(x);
    ProxResult full = problem.reg.prox(y, gamma);
    if ((full.point - x).norm() <= cfg.stop_tol) {
      const double step = (y - u_prev).norm();
      if (TraceRecord* rec = writer.record(k, full.point, full.pattern, step, y))
        rec->enforced_count = 0;
      last = std::move(full);
      u_prev = y;
      converged = true;
      break;
    }
    const std::vector<char> enforced = draw_enforced(rng, n, frozen, p);
    Vector u(n);
    Index count = 0;
    for (Index i = 0; i < n; ++i) {
      if (enforced[static_cast<std::size_t>(i)]) {
        u(i) = u_prev(i) / q(i);
        ++count;
      } else {
        u(i) = y(i);
      }
    }
    last = problem.reg.prox(u, gamma);
    x = last.point;
    const double step = (u - u_prev).norm();
    if (TraceRecord* rec = writer.record(k, x, last.pattern, step, u)) rec->enforced_count = count;
    u_prev = std::move(u);
  }
  return pack("random-subspace", last, u_prev, gamma, std::min(k, cfg.max_iter), converged,
              writer);
}

}  // namespace proxident
