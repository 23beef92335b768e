// Asynchronous master/worker proximal gradient on a simulated event queue.

#include "proxident/exploit.hpp"
#include "proxident/rng.hpp"
#include "proxident/solvers.hpp"

#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace proxident {

namespace {

double parse_number(const std::string& text, const std::string& whole) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size())
    throw std::invalid_argument("delay model: cannot parse '" + whole + "'");
  return v;
}

void validate(const DelayModel& d) {
  const bool finite = std::isfinite(d.a) && std::isfinite(d.b);
  switch (d.kind) {
    case DelayModel::Kind::Constant:
      if (!finite || d.a < 0.0) throw std::invalid_argument("delay model: constant delay must be >= 0");
      break;
    case DelayModel::Kind::Uniform:
      if (!finite || d.a < 0.0 || d.b < d.a)
        throw std::invalid_argument("delay model: uniform bounds need 0 <= lo <= hi");
      break;
    case DelayModel::Kind::Geometric:
      if (!finite || !(d.a > 0.0 && d.a <= 1.0))
        throw std::invalid_argument("delay model: geometric parameter must lie in (0, 1]");
      break;
  }
}

double draw_delay(const DelayModel& d, Rng& rng) {
  switch (d.kind) {
    case DelayModel::Kind::Constant:
      return d.a;
    case DelayModel::Kind::Uniform:
      return rng.uniform(d.a, d.b);
    case DelayModel::Kind::Geometric: {
      // Number of failures before the first success.
      double failures = 0.0;
      while (!rng.bernoulli(d.a)) failures += 1.0;
      return failures;
    }
  }
  return 0.0;
}

std::int64_t message_cost(const Vector& x, Encoding enc) {
  if (enc == Encoding::Dense) return x.size();
  return sparse_encode(x).cost();
}

struct Event {
  double time;
  std::size_t worker;
  bool operator>(const Event& o) const {
    return time != o.time ? time > o.time : worker > o.worker;
  }
};

}  // namespace

DelayModel DelayModel::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  DelayModel out;
  if (parts.size() == 2 && parts[0] == "constant") {
    out = constant(parse_number(parts[1], text));
  } else if (parts.size() == 3 && parts[0] == "uniform") {
    out = uniform(parse_number(parts[1], text), parse_number(parts[2], text));
  } else if (parts.size() == 2 && parts[0] == "geometric") {
    out = geometric(parse_number(parts[1], text));
  } else {
    throw std::invalid_argument("delay model: expected constant:D, uniform:LO:HI or geometric:Q, got '" +
                                text + "'");
  }
  validate(out);
  return out;
}

std::string DelayModel::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::Constant: os << "constant:" << a; break;
    case Kind::Uniform: os << "uniform:" << a << ":" << b; break;
    case Kind::Geometric: os << "geometric:" << a; break;
  }
  return os.str();
}

SolverResult run_dave_pg(const CompositeProblem& problem, const SolverConfig& cfg,
                         const DavePgOptions& opt) {
  if (cfg.max_iter < 1 || cfg.trace_every < 1 || !(cfg.stop_tol >= 0.0))
    throw std::invalid_argument("run_dave_pg: invalid iteration settings");
  if (cfg.x0 && cfg.x0->size() != problem.dim())
    throw std::invalid_argument("run_dave_pg: x0 has the wrong dimension");
  if (opt.workers < 1) throw std::invalid_argument("run_dave_pg: need at least one worker");
  validate(opt.delay);

  std::shared_ptr<const SmoothOracle> f = problem.smooth;
  if (f->component_count() != opt.workers) f = f->with_components(opt.workers);
  if (!(f->strong_convexity() > 0.0))
    throw std::invalid_argument("run_dave_pg: smooth part is not strongly convex (mu = 0)");
  const double lmax = f->max_component_lipschitz();
  const double mu = f->min_component_strong_convexity();
  const double hi = 2.0 / (mu + lmax);
  const double gamma = cfg.gamma.value_or(hi);
  if (!(gamma > 0.0 && gamma <= hi * (1.0 + 1e-12))) {
    std::ostringstream os;
    os.precision(17);
    os << "run_dave_pg: gamma = " << gamma << " outside admissible range (0, " << hi << "]";
    throw std::invalid_argument(os.str());
  }

  const std::size_t m = opt.workers;
  const double inv_m = 1.0 / static_cast<double>(m);
  Rng rng(cfg.seed);
  TraceWriter writer(problem, cfg);

  Vector x = cfg.x0 ? *cfg.x0 : Vector::Zero(problem.dim());
  std::vector<Vector> contribution(m);
  std::vector<Vector> held(m, x);
  std::int64_t comm = static_cast<std::int64_t>(m) * message_cost(x, opt.encoding);

  auto contribution_at = [&](std::size_t j, const Vector& p) {
    return Vector(p - gamma * f->component_gradient(j, p));
  };
  auto mean_contribution = [&] {
    Vector u = Vector::Zero(x.size());
    for (const auto& c : contribution) u += c;
    return Vector(u * inv_m);
  };

  // Round zero: every worker reports at x0 before asynchrony starts.
  for (std::size_t j = 0; j < m; ++j) contribution[j] = contribution_at(j, x);
  Vector u = mean_contribution();
  ProxResult last = problem.reg.prox(u, gamma);
  x = last.point;
  Vector u_prev = u;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue;
  const auto dispatch = [&](std::size_t j, double now) {
    held[j] = x;
    comm += message_cost(x, opt.encoding);
    queue.push({now + 1.0 + draw_delay(opt.delay, rng), j});
  };
  for (std::size_t j = 0; j < m; ++j) dispatch(j, 0.0);
  if (TraceRecord* rec = writer.record(1, x, last.pattern, (u - (cfg.x0 ? *cfg.x0 : Vector::Zero(x.size()))).norm(), u))
    rec->comm_coords = comm;

  bool converged = false;
  int k = 2;
  std::vector<std::size_t> finished;
  for (; k <= cfg.max_iter; ++k) {
    const double now = queue.top().time;
    finished.clear();
    while (!queue.empty() && queue.top().time == now) {
      finished.push_back(queue.top().worker);
      queue.pop();
    }
    for (std::size_t j : finished) contribution[j] = contribution_at(j, held[j]);
    u = mean_contribution();
    last = problem.reg.prox(u, gamma);
    x = last.point;
    for (std::size_t j : finished) dispatch(j, now);
    const double step = (u - u_prev).norm();
    if (TraceRecord* rec = writer.record(k, x, last.pattern, step, u)) rec->comm_coords = comm;
    u_prev = u;
    if (step <= cfg.stop_tol) {
      converged = true;
      break;
    }
  }

  SolverResult out;
  out.solution = last.structured();
  out.trace = writer.take();
  out.u_final = u;
  out.gamma = gamma;
  out.iterations = std::min(k, cfg.max_iter);
  out.converged = converged;
  out.solver = "dave-pg";
  return out;
}

}  // namespace proxident
