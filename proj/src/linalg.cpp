#include "proxident/linalg.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace proxident {

Matrix Svd::reassemble(const Vector& values) const {
  return left * values.asDiagonal() * right.transpose();
}

Svd thin_svd(const Matrix& m) {
  if (!m.allFinite()) throw std::domain_error("thin_svd: non-finite input");
  Eigen::JacobiSVD<Matrix> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Svd out{solver.matrixU(), solver.singularValues(), solver.matrixV()};
  for (Index j = 0; j < out.left.cols(); ++j) {
    Index arg = 0;
    out.left.col(j).cwiseAbs().maxCoeff(&arg);
    if (out.left(arg, j) < 0.0) {
      out.left.col(j) *= -1.0;
      out.right.col(j) *= -1.0;
    }
  }
  return out;
}

PowerIterationResult power_iteration(const std::function<Vector(const Vector&)>& apply, Index dim,
                                     double tol, int max_iter) {
  PowerIterationResult res;
  if (dim == 0) {
    res.converged = true;
    return res;
  }
  // Deterministic start with distinct entries so it is not orthogonal to
  // the leading eigenvector in structured cases.
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = 1.0 + 0.5 * std::sin(static_cast<double>(i) + 1.0);
  v.normalize();
  double prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    Vector w = apply(v);
    const double rq = v.dot(w);
    const double norm = w.norm();
    res.iterations = it;
    res.eigenvalue = rq;
    if (norm == 0.0) {
      res.converged = true;
      res.eigenvalue = 0.0;
      return res;
    }
    v = w / norm;
    if (it > 1 && std::abs(rq - prev) <= tol * std::max(1.0, std::abs(rq))) {
      res.converged = true;
      break;
    }
    prev = rq;
  }
  // Final Rayleigh quotient at the last normalized iterate.
  res.eigenvalue = std::max(res.eigenvalue, v.dot(apply(v)));
  return res;
}

}  // namespace proxident
