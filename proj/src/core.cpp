#include "proxident/core.hpp"

#include "proxident/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace proxident {

namespace {

CollectionFamily family_of(ManifoldKind kind) {
  return kind == ManifoldKind::RankLevel ? CollectionFamily::Matrix : CollectionFamily::Vector;
}

void check_dimension(const Vector& x, const ManifoldCollection& c, const char* who) {
  if (x.size() != c.ambient().size())
    throw std::invalid_argument(std::string(who) + ": point dimension " + std::to_string(x.size()) +
                                " does not match ambient dimension " +
                                std::to_string(c.ambient().size()));
}

}  // namespace

ManifoldCollection::ManifoldCollection(std::vector<ManifoldSpec> specs, Shape ambient)
    : specs_(std::move(specs)), ambient_(ambient) {
  if (specs_.empty()) throw std::invalid_argument("ManifoldCollection: empty collection");
  family_ = family_of(specs_.front().kind);
  std::set<ManifoldSpec> seen;
  const Index n = ambient_.size();
  const Index max_rank = std::min(ambient_.rows, ambient_.cols);
  for (const auto& s : specs_) {
    if (family_of(s.kind) != family_)
      throw std::invalid_argument("ManifoldCollection: mixed vector and matrix kinds");
    if (!seen.insert(s).second) throw std::invalid_argument("ManifoldCollection: duplicate spec");
    switch (s.kind) {
      case ManifoldKind::CoordinateZero:
        if (s.index < 0 || s.index >= n)
          throw std::invalid_argument("ManifoldCollection: coordinate index out of range");
        break;
      case ManifoldKind::AdjacentEqual:
        if (s.index < 1 || s.index >= n)
          throw std::invalid_argument("ManifoldCollection: adjacent index out of range");
        break;
      case ManifoldKind::RankLevel:
        if (!ambient_.matrix)
          throw std::invalid_argument("ManifoldCollection: rank levels need a matrix ambient");
        if (s.index < 0 || s.index > max_rank)
          throw std::invalid_argument("ManifoldCollection: rank level out of range");
        break;
    }
  }
}

ManifoldCollection ManifoldCollection::coordinates(Index n) {
  std::vector<ManifoldSpec> specs;
  specs.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) specs.push_back(ManifoldSpec::coordinate_zero(i));
  return {std::move(specs), Shape::vector(n)};
}

ManifoldCollection ManifoldCollection::adjacent(Index n) {
  std::vector<ManifoldSpec> specs;
  for (Index i = 1; i < n; ++i) specs.push_back(ManifoldSpec::adjacent_equal(i));
  return {std::move(specs), Shape::vector(n)};
}

ManifoldCollection ManifoldCollection::rank_levels(Index rows, Index cols) {
  std::vector<ManifoldSpec> specs;
  for (Index r = 0; r <= std::min(rows, cols); ++r) specs.push_back(ManifoldSpec::rank_level(r));
  return {std::move(specs), Shape::matrix_shape(rows, cols)};
}

SparsityPattern::SparsityPattern(std::initializer_list<int> bits) {
  bits_.reserve(bits.size());
  for (int b : bits) bits_.push_back(b != 0 ? 1 : 0);
}

std::size_t SparsityPattern::count_ones() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<std::size_t> SparsityPattern::zero_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] == 0) out.push_back(i);
  return out;
}

std::string SparsityPattern::hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  const std::size_t bytes = (bits_.size() + 7) / 8;
  out.reserve(2 * bytes);
  for (std::size_t b = 0; b < bytes; ++b) {
    unsigned value = 0;
    for (std::size_t j = 0; j < 8 && 8 * b + j < bits_.size(); ++j)
      if (bits_[8 * b + j]) value |= 1u << j;
    out.push_back(kDigits[value >> 4]);
    out.push_back(kDigits[value & 0xf]);
  }
  return out;
}

SparsityPattern& SparsityPattern::merge_max(const SparsityPattern& other) {
  if (other.size() != size()) throw std::invalid_argument("merge_max: length mismatch");
  for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] = std::max(bits_[i], other.bits_[i]);
  return *this;
}

bool pattern_leq(const SparsityPattern& a, const SparsityPattern& b) {
  if (a.size() != b.size()) throw std::invalid_argument("pattern_leq: length mismatch");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] && !b[i]) return false;
  return true;
}

SparsityPattern pattern_of(const Vector& x, const ManifoldCollection& collection, Membership mode) {
  check_dimension(x, collection, "pattern_of");
  SparsityPattern out(collection.size(), true);
  if (collection.family() == CollectionFamily::Matrix) {
    if (mode.mode == Membership::Mode::Exact)
      throw std::invalid_argument("pattern_of: rank membership needs a tolerance");
    const auto& shape = collection.ambient();
    const Svd svd = thin_svd(as_matrix(x, shape.rows, shape.cols));
    const double smax = svd.sigma.size() ? svd.sigma(0) : 0.0;
    const double tau =
        mode.mode == Membership::Mode::Standard ? kRelativeRankTolerance * smax : mode.tau;
    Index rank = 0;
    for (Index i = 0; i < svd.sigma.size(); ++i)
      if (svd.sigma(i) > tau) ++rank;
    for (std::size_t i = 0; i < collection.size(); ++i)
      if (collection[i].index == rank) out.set(i, false);
    return out;
  }
  const double tau = mode.mode == Membership::Mode::Exact      ? 0.0
                     : mode.mode == Membership::Mode::Standard ? kCoordinateTolerance
                                                               : mode.tau;
  for (std::size_t i = 0; i < collection.size(); ++i) {
    const auto& s = collection[i];
    const double gap =
        s.kind == ManifoldKind::CoordinateZero ? x(s.index) : x(s.index) - x(s.index - 1);
    out.set(i, !(std::abs(gap) <= tau));
  }
  return out;
}

Vector project(const ManifoldCollection& collection, std::span<const std::size_t> subset,
               const Vector& x) {
  check_dimension(x, collection, "project");
  for (std::size_t i : subset)
    if (i >= collection.size()) throw std::invalid_argument("project: subset index out of range");

  if (collection.family() == CollectionFamily::Matrix) {
    if (subset.empty()) return x;
    const Index level = collection[subset.front()].index;
    for (std::size_t i : subset)
      if (collection[i].index != level)
        throw std::invalid_argument("project: distinct rank levels have empty intersection");
    const auto& shape = collection.ambient();
    const Svd svd = thin_svd(as_matrix(x, shape.rows, shape.cols));
    Vector kept = svd.sigma;
    for (Index i = level; i < kept.size(); ++i) kept(i) = 0.0;
    return flatten(svd.reassemble(kept));
  }

  // Linear kinds: adjacent equalities chain coordinates into groups (union
  // find over consecutive pairs), zero constraints pin a whole group to 0.
  const Index n = x.size();
  std::vector<Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  std::vector<char> zeroed(static_cast<std::size_t>(n), 0);
  for (std::size_t i : subset) {
    const auto& s = collection[i];
    if (s.kind == ManifoldKind::CoordinateZero) {
      zeroed[s.index] = 1;
    } else {
      const Index a = find(s.index - 1), b = find(s.index);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<double> sum(static_cast<std::size_t>(n), 0.0);
  std::vector<Index> count(static_cast<std::size_t>(n), 0);
  std::vector<char> group_zero(static_cast<std::size_t>(n), 0);
  for (Index i = 0; i < n; ++i) {
    const Index r = find(i);
    sum[r] += x(i);
    ++count[r];
    if (zeroed[i]) group_zero[r] = 1;
  }
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    const Index r = find(i);
    y(i) = group_zero[r] ? 0.0 : sum[r] / static_cast<double>(count[r]);
  }
  return y;
}

Vector project_identified(const ManifoldCollection& collection, const SparsityPattern& pattern,
                          const Vector& x) {
  if (pattern.size() != collection.size())
    throw std::invalid_argument("project_identified: pattern length mismatch");
  const auto subset = pattern.zero_indices();
  return project(collection, subset, x);
}

Index structure_size(const SparsityPattern& pattern, const ManifoldCollection& collection) {
  if (pattern.size() != collection.size())
    throw std::invalid_argument("structure_size: pattern length mismatch");
  if (collection.family() == CollectionFamily::Matrix) {
    for (std::size_t i = 0; i < collection.size(); ++i)
      if (!pattern[i]) return collection[i].index;
    return -1;
  }
  return static_cast<Index>(pattern.count_ones());
}

}  // namespace proxident
