#pragma once

#include "proxident/core.hpp"

#include <functional>

namespace proxident {

/// Thin SVD with singular values sorted in decreasing order. Each left
/// singular vector is signed so that its largest-magnitude entry is positive
/// (the matching right vector is flipped with it).
struct Svd {
  Matrix left;
  Vector sigma;
  Matrix right;

  Matrix reassemble(const Vector& values) const;
};

/// Throws std::domain_error on non-finite input.
Svd thin_svd(const Matrix& m);

inline Eigen::Map<const Matrix> as_matrix(const Vector& v, Index rows, Index cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

inline Vector flatten(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

struct PowerIterationResult {
  double eigenvalue = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Largest eigenvalue of a symmetric positive semidefinite operator given
/// through its action. Stops when successive Rayleigh quotients differ by
/// less than tol * max(1, |value|).
PowerIterationResult power_iteration(const std::function<Vector(const Vector&)>& apply, Index dim,
                                     double tol = 1e-10, int max_iter = 10000);

}  // namespace proxident
