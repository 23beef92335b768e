#include "proxident/identify.hpp"

#include "proxident/rng.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace proxident {

std::string IdentificationReport::to_text() const {
  std::ostringstream os;
  os << "first_stable_iter=";
  if (first_stable_iter) os << *first_stable_iter;
  else os << "none";
  os << "\noscillation_count=" << oscillation_count << "\nmonotone=" << (monotone ? 1 : 0)
     << "\npattern_hash=" << pattern_final.hex()
     << "\nzeros=" << pattern_final.count_zeros() << "\n";
  return os.str();
}

IdentificationReport analyze_trace(const Trace& trace) {
  if (trace.empty()) throw std::invalid_argument("analyze_trace: empty trace");
  IdentificationReport rep;
  std::size_t last_change = 0;
  for (std::size_t t = 1; t < trace.size(); ++t) {
    if (trace[t].pattern.size() != trace[t - 1].pattern.size())
      throw std::invalid_argument("analyze_trace: pattern length changes within the trace");
    if (!(trace[t].pattern == trace[t - 1].pattern)) {
      ++rep.oscillation_count;
      last_change = t;
    }
    if (trace[t].nnz > trace[t - 1].nnz) rep.monotone = false;
  }
  rep.first_stable_iter = last_change;
  rep.pattern_final = trace.back().pattern;
  return rep;
}

SparsityPattern enlarged_bound_l1(const Vector& u_star, double gamma_lambda, double eps) {
  if (!(eps >= 0.0)) throw std::invalid_argument("enlarged_bound_l1: eps must be >= 0");
  SparsityPattern out(static_cast<std::size_t>(u_star.size()), false);
  for (Index i = 0; i < u_star.size(); ++i)
    if (std::abs(u_star(i)) + eps > gamma_lambda) out.set(static_cast<std::size_t>(i), true);
  return out;
}

namespace {

Vector ball_sample(Rng& rng, const Vector& center, double eps) {
  const Index n = center.size();
  Vector dir(n);
  double norm = 0.0;
  do {
    for (Index i = 0; i < n; ++i) dir(i) = rng.normal();
    norm = dir.norm();
  } while (norm == 0.0);
  const double radius = eps * std::pow(rng.uniform(), 1.0 / static_cast<double>(n));
  return center + (radius / norm) * dir;
}

}  // namespace

SparsityPattern enlarged_bound_sampled(const Regularizer& reg, const Vector& u_star, double gamma,
                                       double eps, std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("enlarged_bound_sampled: n_samples must be >= 1");
  if (!(eps >= 0.0)) throw std::invalid_argument("enlarged_bound_sampled: eps must be >= 0");
  SparsityPattern out = reg.prox(u_star, gamma).pattern;
  if (eps == 0.0) return out;
  Rng rng(seed);
  for (std::size_t s = 0; s < n_samples; ++s)
    out = out.merge_max(reg.prox(ball_sample(rng, u_star, eps), gamma).pattern);
  return out;
}

bool qc_check(const CompositeProblem& problem, double eps, std::size_t n_samples,
              std::uint64_t seed) {
  if (!problem.truth) throw std::invalid_argument("qc_check: problem carries no ground truth");
  if (!(eps >= 0.0)) throw std::invalid_argument("qc_check: eps must be >= 0");
  const GroundTruth& t = *problem.truth;
  if (problem.reg.kind() == RegularizerKind::L1) {
    const double thr = t.gamma * problem.reg.weight();
    for (Index i = 0; i < t.x_star.size(); ++i) {
      const double a = std::abs(t.u_star(i));
      if (t.x_star(i) == 0.0 ? !(a + eps <= thr) : !(a - eps > thr)) return false;
    }
    return true;
  }
  if (!(problem.reg.prox(t.u_star, t.gamma).pattern == t.pattern)) return false;
  Rng rng(seed);
  for (std::size_t s = 0; s < n_samples; ++s)
    if (!(problem.reg.prox(ball_sample(rng, t.u_star, eps), t.gamma).pattern == t.pattern))
      return false;
  return true;
}

std::vector<Index> safe_screen_l1(const Vector& center, double radius, double gamma_lambda) {
  if (!(radius >= 0.0)) throw std::invalid_argument("safe_screen_l1: radius must be >= 0");
  std::vector<Index> out;
  for (Index i = 0; i < center.size(); ++i)
    if (std::abs(center(i)) + radius <= gamma_lambda) out.push_back(i);
  return out;
}

long long identification_time_estimate(double c, RateModel rate, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("identification_time_estimate: eps must be > 0");
  if (!(c > 0.0)) throw std::invalid_argument("identification_time_estimate: C must be > 0");
  if (rate.kind == RateModel::Kind::Sublinear) {
    const double k = std::ceil(c / eps);
    if (k >= static_cast<double>(std::numeric_limits<long long>::max()))
      throw std::overflow_error("identification_time_estimate: estimate overflows");
    return std::max(1LL, static_cast<long long>(k));
  }
  if (!(rate.rho > 0.0 && rate.rho < 1.0))
    throw std::invalid_argument("identification_time_estimate: rho must lie in (0, 1)");
  if (c <= eps) return 1;
  // Start from the real-valued solution and correct for rounding either way.
  auto k = static_cast<long long>(std::ceil(std::log(eps / c) / std::log(rate.rho)));
  k = std::max(1LL, k);
  while (k > 1 && c * std::pow(rate.rho, static_cast<double>(k - 1)) <= eps) --k;
  while (c * std::pow(rate.rho, static_cast<double>(k)) > eps) ++k;
  return k;
}

}  // namespace proxident
