#include "proxident/solvers.hpp"

#include "proxident/rng.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace proxident {

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::string format_range(double lo, double hi, bool hi_closed) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << lo << ", " << hi << (hi_closed ? "]" : ")");
  return os.str();
}

// Validates gamma against (0, hi) or (0, hi]; a relative slack of 1e-12 on
// a closed upper end absorbs rounding from user-supplied values.
double resolve_gamma(const SolverConfig& cfg, double fallback, double hi, bool hi_closed,
                     const char* who) {
  const double gamma = cfg.gamma.value_or(fallback);
  const bool ok = gamma > 0.0 && std::isfinite(gamma) &&
                  (hi_closed ? gamma <= hi * (1.0 + 1e-12) : gamma < hi);
  if (!ok) {
    std::ostringstream os;
    os.precision(17);
    os << who << ": gamma = " << gamma << " outside admissible range "
       << format_range(0.0, hi, hi_closed);
    throw std::invalid_argument(os.str());
  }
  return gamma;
}

void check_config(const CompositeProblem& problem, const SolverConfig& cfg, const char* who) {
  if (cfg.max_iter < 1) throw std::invalid_argument(std::string(who) + ": max_iter must be >= 1");
  if (cfg.trace_every < 1)
    throw std::invalid_argument(std::string(who) + ": trace_every must be >= 1");
  if (!(cfg.stop_tol >= 0.0)) throw std::invalid_argument(std::string(who) + ": stop_tol < 0");
  if (problem.reg.shape().size() != problem.dim())
    throw std::invalid_argument(std::string(who) + ": regularizer and oracle dimensions differ");
  if (cfg.x0 && cfg.x0->size() != problem.dim())
    throw std::invalid_argument(std::string(who) + ": x0 has the wrong dimension");
}

Vector initial_point(const CompositeProblem& problem, const SolverConfig& cfg) {
  return cfg.x0 ? *cfg.x0 : Vector::Zero(problem.dim());
}

SolverResult finish(std::string name, ProxResult last, Vector u, double gamma, int iters,
                    bool converged, TraceWriter& writer) {
  SolverResult out;
  out.solution = last.structured();
  out.trace = writer.take();
  out.u_final = std::move(u);
  out.gamma = gamma;
  out.iterations = iters;
  out.converged = converged;
  out.solver = std::move(name);
  return out;
}

}  // namespace

TraceWriter::TraceWriter(const CompositeProblem& problem, const SolverConfig& config)
    : problem_(problem), config_(config), start_(now_seconds()) {}

TraceRecord* TraceWriter::record(int k, const Vector& x, const SparsityPattern& pattern,
                                 double u_step, const Vector& u) {
  if ((k - 1) % config_.trace_every != 0) return nullptr;
  TraceRecord rec;
  rec.k = k;
  rec.objective = problem_.objective(x);
  rec.pattern = pattern;
  rec.nnz = structure_size(pattern, problem_.reg.collection());
  rec.u_step = u_step;
  rec.wallclock_s = config_.timing ? now_seconds() - start_ : 0.0;
  if (config_.record_iterates) rec.u = u;
  trace_.push_back(std::move(rec));
  return &trace_.back();
}

double fixed_point_residual(const CompositeProblem& problem, const Vector& x, double gamma) {
  const Vector u = x - gamma * problem.smooth->gradient(x);
  return (x - problem.reg.prox(u, gamma).point).norm();
}

SolverResult run_pg(const CompositeProblem& problem, const SolverConfig& cfg) {
  check_config(problem, cfg, "run_pg");
  const double lip = problem.smooth->lipschitz();
  const double gamma = resolve_gamma(cfg, 1.0 / lip, 2.0 / lip, false, "run_pg");
  TraceWriter writer(problem, cfg);
  Vector x = initial_point(problem, cfg);
  Vector u_prev = x;
  ProxResult last{x, pattern_of(x, problem.reg.collection(), Membership::standard()), {}};
  bool converged = false;
  int k = 1;
  for (; k <= cfg.max_iter; ++k) {
    Vector u = x - gamma * problem.smooth->gradient(x);
    last = problem.reg.prox(u, gamma);
    x = last.point;
    const double step = (u - u_prev).norm();
    writer.record(k, x, last.pattern, step, u);
    u_prev = std::move(u);
    if (k > 1 && step <= cfg.stop_tol) {
      converged = true;
      break;
    }
  }
  return finish("pg", std::move(last), u_prev, gamma, std::min(k, cfg.max_iter), converged,
                writer);
}

SolverResult run_apg(const CompositeProblem& problem, const SolverConfig& cfg) {
  check_config(problem, cfg, "run_apg");
  const double lip = problem.smooth->lipschitz();
  const double gamma = resolve_gamma(cfg, 1.0 / lip, 1.0 / lip, true, "run_apg");
  TraceWriter writer(problem, cfg);
  Vector x = initial_point(problem, cfg);
  Vector x_prev = x;
  Vector u_prev = x;
  ProxResult last{x, pattern_of(x, problem.reg.collection(), Membership::standard()), {}};
  bool converged = false;
  int k = 1;
  for (; k <= cfg.max_iter; ++k) {
    const double alpha = static_cast<double>(k - 1) / static_cast<double>(k + 3);
    const Vector y = x + alpha * (x - x_prev);
    Vector u = y - gamma * problem.smooth->gradient(y);
    last = problem.reg.prox(u, gamma);
    x_prev = std::move(x);
    x = last.point;
    const double step = (u - u_prev).norm();
    writer.record(k, x, last.pattern, step, u);
    u_prev = std::move(u);
    if (k > 1 && step <= cfg.stop_tol) {
      converged = true;
      break;
    }
  }
  return finish("apg", std::move(last), u_prev, gamma, std::min(k, cfg.max_iter), converged,
                writer);
}

SolverResult run_dr(const CompositeProblem& problem, const SolverConfig& cfg) {
  check_config(problem, cfg, "run_dr");
  if (!problem.smooth->has_prox())
    throw std::invalid_argument("run_dr: smooth part has no proximal operator");
  const double lip = problem.smooth->lipschitz();
  const double gamma =
      resolve_gamma(cfg, 1.0 / lip, std::numeric_limits<double>::infinity(), false, "run_dr");
  TraceWriter writer(problem, cfg);
  Vector u = initial_point(problem, cfg);
  ProxResult last = problem.reg.prox(u, gamma);
  bool converged = false;
  int k = 1;
  for (; k <= cfg.max_iter; ++k) {
    const Vector& x = last.point;
    Vector u_next = problem.smooth->prox(2.0 * x - u, gamma) + u - x;
    last = problem.reg.prox(u_next, gamma);
    const double step = (u_next - u).norm();
    writer.record(k, last.point, last.pattern, step, u_next);
    u = std::move(u_next);
    if (step <= cfg.stop_tol) {
      converged = true;
      break;
    }
  }
  return finish("dr", std::move(last), u, gamma, std::min(k, cfg.max_iter), converged, writer);
}

SolverResult run_saga(const CompositeProblem& problem, const SolverConfig& cfg) {
  check_config(problem, cfg, "run_saga");
  const auto& f = *problem.smooth;
  const std::size_t m = f.component_count();
  if (m == 0) throw std::invalid_argument("run_saga: oracle has no finite-sum components");
  const double lmax = f.max_component_lipschitz();
  const double gamma = resolve_gamma(cfg, 1.0 / (3.0 * lmax), 1.0 / (3.0 * lmax), true, "run_saga");
  Rng rng(cfg.seed);
  TraceWriter writer(problem, cfg);

  Vector x = initial_point(problem, cfg);
  std::vector<Vector> table;
  table.reserve(m);
  Vector sum = Vector::Zero(x.size());
  for (std::size_t j = 0; j < m; ++j) {
    table.push_back(f.component_gradient(j, x));
    sum += table.back();
  }
  const double inv_m = 1.0 / static_cast<double>(m);
  Vector u_prev = x;
  ProxResult last{x, pattern_of(x, problem.reg.collection(), Membership::standard()), {}};
  std::deque<double> window;
  double window_sum = 0.0;
  bool converged = false;
  int k = 1;
  for (; k <= cfg.max_iter; ++k) {
    const auto i = static_cast<std::size_t>(rng.index(m));
    Vector g = f.component_gradient(i, x);
    const Vector mean = m == 1 ? table[0] : Vector(sum * inv_m);
    Vector u = x - gamma * (g + (mean - table[i]));
    sum += g - table[i];
    table[i] = std::move(g);
    // Re-derive the running sum periodically so rounding does not drift.
    if (m > 1 && k % static_cast<int>(10 * m) == 0) {
      sum.setZero();
      for (const auto& t : table) sum += t;
    }
    if (cfg.audit) {
      Vector exact = Vector::Zero(x.size());
      for (const auto& t : table) exact += t;
      if ((exact - sum).norm() > 1e-10 * std::max(1.0, exact.norm()))
        throw std::logic_error("run_saga: gradient table mean drifted");
    }
    last = problem.reg.prox(u, gamma);
    x = last.point;
    const double step = (u - u_prev).norm();
    writer.record(k, x, last.pattern, step, u);
    u_prev = std::move(u);
    window.push_back(step);
    window_sum += step;
    if (window.size() > m) {
      window_sum -= window.front();
      window.pop_front();
    }
    if (k > 1 && window.size() == m &&
        window_sum / static_cast<double>(m) <= cfg.stop_tol) {
      converged = true;
      break;
    }
  }
  return finish("saga", std::move(last), u_prev, gamma, std::min(k, cfg.max_iter), converged,
                writer);
}

}  // namespace proxident
