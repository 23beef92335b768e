// 1-D total variation and Potts proximal operators.

#include "proxident/prox.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace proxident {

// Condat's direct taut-string pass. Every `do ... while` fill below writes one
// constant segment; its end is recorded as a jump so the structure comes out
// of the construction itself.
void tv1d_denoise(std::span<const double> input, double lambda, std::span<double> output,
                  std::vector<char>& jump_after) {
  const auto width = static_cast<std::ptrdiff_t>(input.size());
  jump_after.assign(input.size() > 0 ? input.size() - 1 : 0, 0);
  if (width == 0) return;
  if (lambda <= 0.0) {
    for (std::ptrdiff_t i = 0; i < width; ++i) output[i] = input[i];
    for (std::ptrdiff_t i = 0; i + 1 < width; ++i) jump_after[i] = 1;
    return;
  }
  auto close_segment = [&](std::ptrdiff_t end) {
    if (end >= 0 && end + 1 < width) jump_after[end] = 1;
  };

  std::ptrdiff_t k = 0, k0 = 0;
  double umin = lambda, umax = -lambda;
  double vmin = input[0] - lambda, vmax = input[0] + lambda;
  std::ptrdiff_t kplus = 0, kminus = 0;
  const double twolambda = 2.0 * lambda;
  const double minlambda = -lambda;
  for (;;) {
    while (k == width - 1) {
      if (umin < 0.0) {
        do output[k0++] = vmin;
        while (k0 <= kminus);
        close_segment(k0 - 1);
        umax = (vmin = input[kminus = k = k0]) + (umin = lambda) - vmax;
      } else if (umax > 0.0) {
        do output[k0++] = vmax;
        while (k0 <= kplus);
        close_segment(k0 - 1);
        umin = (vmax = input[kplus = k = k0]) + (umax = minlambda) - vmin;
      } else {
        vmin += umin / static_cast<double>(k - k0 + 1);
        do output[k0++] = vmin;
        while (k0 <= k);
        return;
      }
    }
    if ((umin += input[k + 1] - vmin) < minlambda) {
      do output[k0++] = vmin;
      while (k0 <= kminus);
      close_segment(k0 - 1);
      vmax = (vmin = input[kplus = kminus = k = k0]) + twolambda;
      umin = lambda;
      umax = minlambda;
    } else if ((umax += input[k + 1] - vmax) > lambda) {
      do output[k0++] = vmax;
      while (k0 <= kplus);
      close_segment(k0 - 1);
      vmin = (vmax = input[kplus = kminus = k = k0]) - twolambda;
      umin = lambda;
      umax = minlambda;
    } else {
      ++k;
      if (umin >= lambda) {
        vmin += (umin - lambda) / static_cast<double>((kminus = k) - k0 + 1);
        umin = lambda;
      }
      if (umax <= minlambda) {
        vmax += (umax + lambda) / static_cast<double>((kplus = k) - k0 + 1);
        umax = minlambda;
      }
    }
  }
}

namespace {

void check_input(const Vector& u, double gamma, const char* who) {
  if (!(gamma > 0.0)) throw std::invalid_argument(std::string(who) + ": gamma must be positive");
  if (u.size() < 2) throw std::invalid_argument(std::string(who) + ": need n >= 2");
  if (!u.allFinite()) throw std::domain_error(std::string(who) + ": non-finite input");
}

}  // namespace

ProxResult prox_tv1d(const Vector& u, double gamma, double lambda) {
  check_input(u, gamma, "prox_tv1d");
  const Index n = u.size();
  ProxResult out{Vector(n), SparsityPattern(static_cast<std::size_t>(n - 1)), std::nullopt};
  std::vector<char> jumps;
  tv1d_denoise({u.data(), static_cast<std::size_t>(n)}, gamma * lambda,
               {out.point.data(), static_cast<std::size_t>(n)}, jumps);
  // Two neighbouring segments may land on the same level in a tie; they are
  // then one flat piece.
  for (Index i = 1; i < n; ++i)
    out.pattern.set(static_cast<std::size_t>(i - 1),
                    jumps[i - 1] != 0 && out.point(i) != out.point(i - 1));
  return out;
}

ProxResult prox_potts1d(const Vector& u, double gamma, double lambda) {
  check_input(u, gamma, "prox_potts1d");
  const Index n = u.size();
  const double jump_cost = gamma * lambda;
  // best[r] = optimal cost for u[0..r-1]; start[r] = first index of the last
  // segment; jumps[r] = number of jumps, used to break exact ties.
  std::vector<double> best(n + 1, std::numeric_limits<double>::infinity());
  std::vector<Index> start(n + 1, 0), jumps(n + 1, 0);
  best[0] = -jump_cost;
  for (Index r = 1; r <= n; ++r) {
    double mean = 0.0, m2 = 0.0;
    for (Index l = r; l >= 1; --l) {
      // Welford update with u[l-1] prepended to the segment [l-1, r-1].
      const double len = static_cast<double>(r - l + 1);
      const double delta = u(l - 1) - mean;
      mean += delta / len;
      m2 += delta * (u(l - 1) - mean);
      const double cost = best[l - 1] + jump_cost + 0.5 * m2;
      const Index j = l == 1 ? 0 : jumps[l - 1] + 1;
      if (cost < best[r] || (cost == best[r] && j < jumps[r])) {
        best[r] = cost;
        start[r] = l - 1;
        jumps[r] = j;
      }
    }
  }
  ProxResult out{Vector(n), SparsityPattern(static_cast<std::size_t>(n - 1)), std::nullopt};
  for (Index r = n; r > 0;) {
    const Index l = start[r];
    const double mean = u.segment(l, r - l).mean();
    out.point.segment(l, r - l).setConstant(mean);
    if (l > 0) out.pattern.set(static_cast<std::size_t>(l - 1), true);
    r = l;
  }
  for (Index i = 1; i < n; ++i)
    if (out.pattern[i - 1] && out.point(i) == out.point(i - 1)) out.pattern.set(i - 1, false);
  return out;
}

}  // namespace proxident
