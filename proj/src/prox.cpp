#include "proxident/prox.hpp"

#include "proxident/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace proxident {

namespace {

void check_common(const Vector& u, double gamma, const char* who) {
  if (!(gamma > 0.0)) throw std::invalid_argument(std::string(who) + ": gamma must be positive");
  if (!u.allFinite()) throw std::domain_error(std::string(who) + ": non-finite input");
}

void check_weight(double lambda, const char* who) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument(std::string(who) + ": weight must be finite and nonnegative");
}

ProxResult rank_result(const Svd& svd, const Vector& values, Index rows, Index cols) {
  const Index k = (values.array() > 0.0).count();
  ProxResult out{flatten(svd.reassemble(values)),
                 SparsityPattern(static_cast<std::size_t>(std::min(rows, cols) + 1), true),
                 std::nullopt};
  out.pattern.set(static_cast<std::size_t>(k), false);
  return out;
}

// Bit position of `spec` in the canonical collection of its kind.
std::size_t canonical_bit(const ManifoldSpec& spec) {
  switch (spec.kind) {
    case ManifoldKind::CoordinateZero:
      return static_cast<std::size_t>(spec.index);
    case ManifoldKind::AdjacentEqual:
      return static_cast<std::size_t>(spec.index - 1);
    case ManifoldKind::RankLevel:
      return static_cast<std::size_t>(spec.index);
  }
  return 0;
}

}  // namespace

ProxResult prox_l1(const Vector& u, double gamma, double lambda) {
  check_common(u, gamma, "prox_l1");
  check_weight(lambda, "prox_l1");
  const double t = gamma * lambda;
  ProxResult out{Vector(u.size()), SparsityPattern(static_cast<std::size_t>(u.size())),
                 std::nullopt};
  for (Index i = 0; i < u.size(); ++i) {
    const double ui = u(i);
    if (ui >= -t && ui <= t) {
      out.point(i) = 0.0;
    } else {
      out.point(i) = ui > t ? ui - t : ui + t;
      out.pattern.set(static_cast<std::size_t>(i), true);
    }
  }
  return out;
}

ProxResult prox_l0(const Vector& u, double gamma, double lambda) {
  check_common(u, gamma, "prox_l0");
  check_weight(lambda, "prox_l0");
  const double t = std::sqrt(2.0 * gamma * lambda);
  ProxResult out{Vector(u.size()), SparsityPattern(static_cast<std::size_t>(u.size())),
                 std::nullopt};
  for (Index i = 0; i < u.size(); ++i) {
    if (std::abs(u(i)) <= t) {
      out.point(i) = 0.0;
    } else {
      out.point(i) = u(i);
      out.pattern.set(static_cast<std::size_t>(i), true);
    }
  }
  return out;
}

ProxResult prox_nuclear(const Matrix& u, double gamma, double lambda) {
  if (!(gamma > 0.0)) throw std::invalid_argument("prox_nuclear: gamma must be positive");
  check_weight(lambda, "prox_nuclear");
  const Svd svd = thin_svd(u);
  const double t = gamma * lambda;
  Vector values = svd.sigma;
  for (Index i = 0; i < values.size(); ++i) values(i) = values(i) <= t ? 0.0 : values(i) - t;
  return rank_result(svd, values, u.rows(), u.cols());
}

ProxResult prox_rank(const Matrix& u, double gamma, double lambda) {
  if (!(gamma > 0.0)) throw std::invalid_argument("prox_rank: gamma must be positive");
  check_weight(lambda, "prox_rank");
  const Svd svd = thin_svd(u);
  const double t = std::sqrt(2.0 * gamma * lambda);
  Vector values = svd.sigma;
  for (Index i = 0; i < values.size(); ++i)
    if (values(i) <= t) values(i) = 0.0;
  return rank_result(svd, values, u.rows(), u.cols());
}

std::string_view to_string(RegularizerKind kind) {
  switch (kind) {
    case RegularizerKind::L1: return "l1";
    case RegularizerKind::L0: return "l0";
    case RegularizerKind::TV1D: return "tv1d";
    case RegularizerKind::Potts1D: return "potts1d";
    case RegularizerKind::Nuclear: return "nuclear";
    case RegularizerKind::Rank: return "rank";
  }
  return "?";
}

RegularizerKind regularizer_kind_from_string(std::string_view name) {
  for (auto k : {RegularizerKind::L1, RegularizerKind::L0, RegularizerKind::TV1D,
                 RegularizerKind::Potts1D, RegularizerKind::Nuclear, RegularizerKind::Rank})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown regularizer '" + std::string(name) + "'");
}

Regularizer::Regularizer(RegularizerKind kind, double weight, ManifoldCollection collection)
    : kind_(kind), weight_(weight), collection_(std::move(collection)) {
  check_weight(weight, "Regularizer");
  ManifoldKind expected = ManifoldKind::CoordinateZero;
  switch (kind) {
    case RegularizerKind::L1:
    case RegularizerKind::L0:
      expected = ManifoldKind::CoordinateZero;
      break;
    case RegularizerKind::TV1D:
    case RegularizerKind::Potts1D:
      expected = ManifoldKind::AdjacentEqual;
      break;
    case RegularizerKind::Nuclear:
    case RegularizerKind::Rank:
      expected = ManifoldKind::RankLevel;
      break;
  }
  for (const auto& s : collection_.specs())
    if (s.kind != expected)
      throw std::invalid_argument("Regularizer: collection kind does not match " +
                                  std::string(to_string(kind)));
}

Regularizer Regularizer::l1(Index n, double w) {
  return {RegularizerKind::L1, w, ManifoldCollection::coordinates(n)};
}
Regularizer Regularizer::l0(Index n, double w) {
  return {RegularizerKind::L0, w, ManifoldCollection::coordinates(n)};
}
Regularizer Regularizer::tv1d(Index n, double w) {
  return {RegularizerKind::TV1D, w, ManifoldCollection::adjacent(n)};
}
Regularizer Regularizer::potts1d(Index n, double w) {
  return {RegularizerKind::Potts1D, w, ManifoldCollection::adjacent(n)};
}
Regularizer Regularizer::nuclear(Index rows, Index cols, double w) {
  return {RegularizerKind::Nuclear, w, ManifoldCollection::rank_levels(rows, cols)};
}
Regularizer Regularizer::rank(Index rows, Index cols, double w) {
  return {RegularizerKind::Rank, w, ManifoldCollection::rank_levels(rows, cols)};
}

Regularizer Regularizer::make(RegularizerKind kind, Shape shape, double weight) {
  switch (kind) {
    case RegularizerKind::L1: return l1(shape.size(), weight);
    case RegularizerKind::L0: return l0(shape.size(), weight);
    case RegularizerKind::TV1D: return tv1d(shape.size(), weight);
    case RegularizerKind::Potts1D: return potts1d(shape.size(), weight);
    case RegularizerKind::Nuclear: return nuclear(shape.rows, shape.cols, weight);
    case RegularizerKind::Rank: return rank(shape.rows, shape.cols, weight);
  }
  throw std::invalid_argument("Regularizer::make: unknown kind");
}

bool Regularizer::convex() const {
  return kind_ == RegularizerKind::L1 || kind_ == RegularizerKind::TV1D ||
         kind_ == RegularizerKind::Nuclear;
}

double Regularizer::value(const Vector& x) const {
  if (x.size() != shape().size()) throw std::invalid_argument("Regularizer::value: dimension");
  const Index n = x.size();
  double total = 0.0;
  switch (kind_) {
    case RegularizerKind::L1:
      total = x.lpNorm<1>();
      break;
    case RegularizerKind::L0:
      total = static_cast<double>((x.array() != 0.0).count());
      break;
    case RegularizerKind::TV1D:
      for (Index i = 1; i < n; ++i) total += std::abs(x(i) - x(i - 1));
      break;
    case RegularizerKind::Potts1D:
      for (Index i = 1; i < n; ++i) total += x(i) != x(i - 1) ? 1.0 : 0.0;
      break;
    case RegularizerKind::Nuclear:
      total = thin_svd(as_matrix(x, shape().rows, shape().cols)).sigma.sum();
      break;
    case RegularizerKind::Rank: {
      const auto full = ManifoldCollection::rank_levels(shape().rows, shape().cols);
      total = static_cast<double>(structure_size(pattern_of(x, full, Membership::standard()), full));
      break;
    }
  }
  return weight_ * total;
}

ProxResult Regularizer::prox(const Vector& u, double gamma) const {
  if (u.size() != shape().size()) throw std::invalid_argument("Regularizer::prox: dimension");
  ProxResult raw;
  switch (kind_) {
    case RegularizerKind::L1: raw = prox_l1(u, gamma, weight_); break;
    case RegularizerKind::L0: raw = prox_l0(u, gamma, weight_); break;
    case RegularizerKind::TV1D: raw = prox_tv1d(u, gamma, weight_); break;
    case RegularizerKind::Potts1D: raw = prox_potts1d(u, gamma, weight_); break;
    case RegularizerKind::Nuclear:
      raw = prox_nuclear(as_matrix(u, shape().rows, shape().cols), gamma, weight_);
      break;
    case RegularizerKind::Rank:
      raw = prox_rank(as_matrix(u, shape().rows, shape().cols), gamma, weight_);
      break;
  }
  const std::size_t canonical_size = raw.pattern.size();
  bool canonical = collection_.size() == canonical_size;
  for (std::size_t i = 0; canonical && i < collection_.size(); ++i)
    canonical = canonical_bit(collection_[i]) == i;
  if (canonical) return raw;
  SparsityPattern mapped(collection_.size());
  for (std::size_t i = 0; i < collection_.size(); ++i)
    mapped.set(i, raw.pattern[canonical_bit(collection_[i])]);
  raw.pattern = std::move(mapped);
  return raw;
}

double prox_optimality_residual(const Regularizer& reg, const Vector& u, double gamma,
                                const Vector& x) {
  if (!reg.convex())
    throw std::invalid_argument("prox_optimality_residual: regularizer is not convex");
  if (!(gamma > 0.0)) throw std::invalid_argument("prox_optimality_residual: gamma");
  if (u.size() != x.size() || u.size() != reg.shape().size())
    throw std::invalid_argument("prox_optimality_residual: dimension mismatch");
  const double lambda = reg.weight();
  const Vector v = (u - x) / gamma;
  const Index n = v.size();

  if (reg.kind() == RegularizerKind::L1) {
    double sq = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double d = x(i) != 0.0 ? v(i) - std::copysign(lambda, x(i))
                                   : std::max(0.0, std::abs(v(i)) - lambda);
      sq += d * d;
    }
    return std::sqrt(sq);
  }

  if (reg.kind() == RegularizerKind::TV1D) {
    // Dual variable z on the differences (D x)_j = x_{j+1} - x_j, with
    // (D^T z)_j = z_{j-1} - z_j. D^T z = v fixes z from the first n-1
    // equations; the last one is sum(v) = 0. A jump pins z_j = lambda*sign.
    double z = 0.0, violation = 0.0;
    for (Index j = 0; j + 1 < n; ++j) {
      z -= v(j);
      const double diff = x(j + 1) - x(j);
      double d = 0.0;
      if (diff > 0.0) {
        d = z - lambda;
      } else if (diff < 0.0) {
        d = z + lambda;
      } else {
        d = std::max(0.0, std::abs(z) - lambda);
      }
      violation += d * d;
    }
    return std::abs(v.sum()) + 2.0 * std::sqrt(violation);
  }

  // Nuclear: split (u - x)/gamma along range(X) and its complement.
  const auto& shape = reg.shape();
  const Matrix V = as_matrix(v, shape.rows, shape.cols);
  const Svd svd = thin_svd(as_matrix(x, shape.rows, shape.cols));
  const double smax = svd.sigma.size() ? svd.sigma(0) : 0.0;
  const double tol = 1e-10 * std::max(1.0, smax);
  Index k = 0;
  while (k < svd.sigma.size() && svd.sigma(k) > tol) ++k;
  const Matrix U1 = svd.left.leftCols(k);
  const Matrix V1 = svd.right.leftCols(k);
  const Matrix top = U1.transpose() * V * V1 - lambda * Matrix::Identity(k, k);
  const Matrix left_rest = U1.transpose() * V - (U1.transpose() * V * V1) * V1.transpose();
  const Matrix VV1 = V * V1;
  const Matrix right_rest = VV1 - U1 * (U1.transpose() * VV1);
  const Matrix Pperp_V = V - U1 * (U1.transpose() * V);
  const Matrix corner = Pperp_V - (Pperp_V * V1) * V1.transpose();
  double sq = top.squaredNorm() + left_rest.squaredNorm() + right_rest.squaredNorm();
  if (corner.size() > 0) {
    Eigen::JacobiSVD<Matrix> csvd(corner);
    for (Index i = 0; i < csvd.singularValues().size(); ++i) {
      const double excess = std::max(0.0, csvd.singularValues()(i) - lambda);
      sq += excess * excess;
    }
  }
  return std::sqrt(sq);
}

}  // namespace proxident
