#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace proxident {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

enum class ManifoldKind { CoordinateZero, AdjacentEqual, RankLevel };

/// One structure set of a collection.
///
/// Indices are 0-based. CoordinateZero(i) is {x : x_i = 0}; AdjacentEqual(i),
/// i >= 1, is {x : x_i = x_{i-1}}; RankLevel(r) is {X : rank(X) = r}.
struct ManifoldSpec {
  ManifoldKind kind;
  Index index;

  static ManifoldSpec coordinate_zero(Index i) { return {ManifoldKind::CoordinateZero, i}; }
  static ManifoldSpec adjacent_equal(Index i) { return {ManifoldKind::AdjacentEqual, i}; }
  static ManifoldSpec rank_level(Index r) { return {ManifoldKind::RankLevel, r}; }

  friend auto operator<=>(const ManifoldSpec&, const ManifoldSpec&) = default;
};

/// Ambient space: a vector of length `rows` (cols == 1, matrix == false) or a
/// rows x cols matrix stored column-major in a Vector of length rows*cols.
struct Shape {
  Index rows = 0;
  Index cols = 1;
  bool matrix = false;

  static Shape vector(Index n) { return {n, 1, false}; }
  static Shape matrix_shape(Index r, Index c) { return {r, c, true}; }
  Index size() const { return rows * cols; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

enum class CollectionFamily { Vector, Matrix };

class ManifoldCollection {
 public:
  /// Throws std::invalid_argument on an empty list, duplicates, mixed
  /// families or out-of-range indices.
  ManifoldCollection(std::vector<ManifoldSpec> specs, Shape ambient);

  /// {x_i = 0 : i = 0..n-1}
  static ManifoldCollection coordinates(Index n);
  /// {x_i = x_{i-1} : i = 1..n-1}
  static ManifoldCollection adjacent(Index n);
  /// {rank = r : r = 0..min(rows, cols)}
  static ManifoldCollection rank_levels(Index rows, Index cols);

  std::size_t size() const { return specs_.size(); }
  const ManifoldSpec& operator[](std::size_t i) const { return specs_[i]; }
  const std::vector<ManifoldSpec>& specs() const { return specs_; }
  const Shape& ambient() const { return ambient_; }
  CollectionFamily family() const { return family_; }
  /// True when every member is a linear subspace (coordinate / adjacent kinds).
  bool is_linear() const { return family_ == CollectionFamily::Vector; }

 private:
  std::vector<ManifoldSpec> specs_;
  Shape ambient_;
  CollectionFamily family_;
};

/// S(x): bit i is 0 when the point lies in the i-th set of the collection.
class SparsityPattern {
 public:
  SparsityPattern() = default;
  explicit SparsityPattern(std::size_t n, bool value = false) : bits_(n, value ? 1 : 0) {}
  SparsityPattern(std::initializer_list<int> bits);

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool value) { bits_[i] = value ? 1 : 0; }

  std::size_t count_ones() const;
  std::size_t count_zeros() const { return size() - count_ones(); }
  /// Indices with bit 0, i.e. the sets the point belongs to.
  std::vector<std::size_t> zero_indices() const;
  /// Lowercase hex of the bits packed little-endian (bit i -> byte i/8, bit i%8).
  std::string hex() const;
  /// Coordinate-wise maximum.
  SparsityPattern& merge_max(const SparsityPattern& other);

  friend bool operator==(const SparsityPattern&, const SparsityPattern&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// a_i <= b_i for all i. Throws on length mismatch.
bool pattern_leq(const SparsityPattern& a, const SparsityPattern& b);

/// How pattern_of decides membership.
struct Membership {
  enum class Mode { Exact, Tolerance, Standard };
  Mode mode = Mode::Exact;
  double tau = 0.0;

  static Membership exact() { return {Mode::Exact, 0.0}; }
  static Membership tolerance(double tau) { return {Mode::Tolerance, tau}; }
  /// 1e-12 for coordinate/adjacent tests, sigma <= 1e-10 * sigma_max for rank.
  static Membership standard() { return {Mode::Standard, 0.0}; }
};

inline constexpr double kCoordinateTolerance = 1e-12;
inline constexpr double kRelativeRankTolerance = 1e-10;

struct ProxBranch {};
struct NumericTest {
  double tolerance = 0.0;
};
using Provenance = std::variant<ProxBranch, NumericTest>;

struct StructuredPoint {
  Vector point;
  SparsityPattern pattern;
  Provenance provenance = ProxBranch{};

  bool exact() const { return std::holds_alternative<ProxBranch>(provenance); }
};

/// Throws on dimension mismatch, or when exact mode is requested for a rank
/// collection (rank is not decidable without a tolerance).
SparsityPattern pattern_of(const Vector& x, const ManifoldCollection& collection,
                           Membership mode = Membership::exact());

/// Euclidean projection onto the intersection of the listed sets. Rank
/// collections accept a single level and truncate the SVD to it.
Vector project(const ManifoldCollection& collection, std::span<const std::size_t> subset,
               const Vector& x);

/// Projection onto the intersection of every set whose bit is 0 in `pattern`.
Vector project_identified(const ManifoldCollection& collection, const SparsityPattern& pattern,
                          const Vector& x);

/// Number of structure-free bits: nnz for coordinates, jumps for adjacent,
/// the rank for rank levels.
Index structure_size(const SparsityPattern& pattern, const ManifoldCollection& collection);

}  // namespace proxident
