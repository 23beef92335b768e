#include "proxident/problems.hpp"

#include "proxident/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace proxident {

double SmoothOracle::component_value(std::size_t, const Vector&) const {
  throw std::logic_error("oracle has no finite-sum components");
}
Vector SmoothOracle::component_gradient(std::size_t, const Vector&) const {
  throw std::logic_error("oracle has no finite-sum components");
}
double SmoothOracle::component_lipschitz(std::size_t) const {
  throw std::logic_error("oracle has no finite-sum components");
}
double SmoothOracle::component_strong_convexity(std::size_t) const {
  throw std::logic_error("oracle has no finite-sum components");
}
std::shared_ptr<const SmoothOracle> SmoothOracle::with_components(std::size_t) const {
  throw std::logic_error("oracle cannot be split into components");
}
Vector SmoothOracle::prox(const Vector&, double) const {
  throw std::logic_error("oracle has no proximal operator");
}

double SmoothOracle::max_component_lipschitz() const {
  double out = 0.0;
  for (std::size_t j = 0; j < component_count(); ++j) out = std::max(out, component_lipschitz(j));
  return out;
}

double SmoothOracle::min_component_strong_convexity() const {
  if (component_count() == 0) return 0.0;
  double out = component_strong_convexity(0);
  for (std::size_t j = 1; j < component_count(); ++j)
    out = std::min(out, component_strong_convexity(j));
  return out;
}

namespace {

double gram_max_eig(const Matrix& a) {
  if (a.rows() == 0) return 0.0;
  const Matrix g = a.transpose() * a;
  return power_iteration([&](const Vector& v) -> Vector { return g * v; }, g.rows()).eigenvalue;
}

// lambda_min(A^T A) from power iteration on L*I - A^T A; 0 when A has fewer
// rows than columns.
double gram_min_eig(const Matrix& a, double lmax) {
  if (a.rows() < a.cols()) return 0.0;
  const Matrix g = a.transpose() * a;
  const auto shifted = power_iteration(
      [&](const Vector& v) -> Vector { return lmax * v - g * v; }, g.rows());
  const double mu = lmax - shifted.eigenvalue;
  return mu > 1e-12 * std::max(1.0, lmax) ? mu : 0.0;
}

}  // namespace

LeastSquaresOracle::LeastSquaresOracle(Matrix a, Vector b, std::size_t components)
    : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != b_.size())
    throw std::invalid_argument("least_squares_oracle: A has " + std::to_string(a_.rows()) +
                                " rows but b has " + std::to_string(b_.size()) + " entries");
  if (a_.rows() == 0 || a_.cols() == 0)
    throw std::invalid_argument("least_squares_oracle: empty matrix");
  const auto m = static_cast<std::size_t>(a_.rows());
  if (components == 0) components = m;
  if (components > m)
    throw std::invalid_argument("least_squares_oracle: more components than rows");
  for (std::size_t j = 0; j < components; ++j) {
    const auto start = static_cast<Index>(j * m / components);
    const auto end = static_cast<Index>((j + 1) * m / components);
    blocks_.push_back({start, end - start});
  }
  use_gram_ = a_.rows() > a_.cols();
  if (use_gram_) {
    gram_ = a_.transpose() * a_;
    atb_ = a_.transpose() * b_;
    lipschitz_ = power_iteration([&](const Vector& v) -> Vector { return gram_ * v; },
                                 gram_.rows())
                     .eigenvalue;
  } else {
    lipschitz_ = power_iteration(
                     [&](const Vector& v) -> Vector {
                       return a_.transpose() * (a_ * v);
                     },
                     a_.cols())
                     .eigenvalue;
  }
}

double LeastSquaresOracle::value(const Vector& x) const {
  return 0.5 * (a_ * x - b_).squaredNorm();
}

Vector LeastSquaresOracle::gradient(const Vector& x) const {
  if (use_gram_) return gram_ * x - atb_;
  return a_.transpose() * (a_ * x - b_);
}

double LeastSquaresOracle::strong_convexity() const {
  std::call_once(mu_once_, [&] { mu_ = gram_min_eig(a_, lipschitz_); });
  return mu_;
}

double LeastSquaresOracle::component_value(std::size_t j, const Vector& x) const {
  const auto& blk = blocks_.at(j);
  const double scale = static_cast<double>(blocks_.size());
  return scale * 0.5 *
         (a_.middleRows(blk.start, blk.rows) * x - b_.segment(blk.start, blk.rows)).squaredNorm();
}

Vector LeastSquaresOracle::component_gradient(std::size_t j, const Vector& x) const {
  const auto& blk = blocks_.at(j);
  const double scale = static_cast<double>(blocks_.size());
  const auto rows = a_.middleRows(blk.start, blk.rows);
  return scale * (rows.transpose() * (rows * x - b_.segment(blk.start, blk.rows)));
}

void LeastSquaresOracle::compute_component_constants() const {
  std::call_once(components_once_, [&] {
    const double scale = static_cast<double>(blocks_.size());
    component_l_.resize(blocks_.size());
    component_mu_.resize(blocks_.size());
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
      const Matrix rows = a_.middleRows(blocks_[j].start, blocks_[j].rows);
      double l = 0.0;
      if (rows.rows() == 1) {
        l = rows.squaredNorm();
      } else {
        l = gram_max_eig(rows);
      }
      component_l_[j] = scale * l;
      component_mu_[j] = scale * gram_min_eig(rows, l);
    }
  });
}

double LeastSquaresOracle::component_lipschitz(std::size_t j) const {
  compute_component_constants();
  return component_l_.at(j);
}

double LeastSquaresOracle::component_strong_convexity(std::size_t j) const {
  compute_component_constants();
  return component_mu_.at(j);
}

std::shared_ptr<const SmoothOracle> LeastSquaresOracle::with_components(std::size_t m) const {
  return std::make_shared<LeastSquaresOracle>(a_, b_, m);
}

Vector LeastSquaresOracle::prox(const Vector& v, double gamma) const {
  if (!(gamma > 0.0)) throw std::invalid_argument("LeastSquaresOracle::prox: gamma");
  std::shared_ptr<const Eigen::LLT<Matrix>> factor;
  {
    std::lock_guard lock(prox_mutex_);
    if (!prox_factor_ || prox_gamma_ != gamma) {
      Matrix sys = use_gram_ ? gram_ : Matrix(a_.transpose() * a_);
      sys *= gamma;
      sys.diagonal().array() += 1.0;
      prox_factor_ = std::make_shared<Eigen::LLT<Matrix>>(sys);
      prox_gamma_ = gamma;
    }
    factor = prox_factor_;
  }
  const Vector rhs = v + gamma * (use_gram_ ? atb_ : Vector(a_.transpose() * b_));
  return factor->solve(rhs);
}

std::shared_ptr<const LeastSquaresOracle> least_squares_oracle(const Matrix& a, const Vector& b,
                                                               std::size_t components) {
  return std::make_shared<LeastSquaresOracle>(a, b, components);
}

MaskedMatrixOracle::MaskedMatrixOracle(Matrix target, Matrix mask)
    : rows_(target.rows()), cols_(target.cols()) {
  if (mask.rows() != rows_ || mask.cols() != cols_)
    throw std::invalid_argument("matrix_ls_oracle: mask shape does not match target");
  mask_ = flatten(mask);
  target_ = flatten(target);
  for (Index i = 0; i < mask_.size(); ++i)
    if (mask_(i) != 0.0 && mask_(i) != 1.0)
      throw std::invalid_argument("matrix_ls_oracle: mask entries must be 0 or 1");
  if (mask_.sum() == 0.0) throw std::invalid_argument("matrix_ls_oracle: empty mask");
  full_ = mask_.minCoeff() == 1.0;
}

double MaskedMatrixOracle::value(const Vector& x) const {
  if (x.size() != target_.size()) throw std::invalid_argument("matrix_ls_oracle: dimension");
  return 0.5 * (mask_.array() * (x - target_).array()).matrix().squaredNorm();
}

Vector MaskedMatrixOracle::gradient(const Vector& x) const {
  if (x.size() != target_.size()) throw std::invalid_argument("matrix_ls_oracle: dimension");
  return (mask_.array() * (x - target_).array()).matrix();
}

Vector MaskedMatrixOracle::prox(const Vector& v, double gamma) const {
  return ((v.array() + gamma * mask_.array() * target_.array()) / (1.0 + gamma * mask_.array()))
      .matrix();
}

std::shared_ptr<const MaskedMatrixOracle> matrix_ls_oracle(const Matrix& target,
                                                           std::optional<Matrix> mask) {
  Matrix m = mask ? *mask : Matrix::Ones(target.rows(), target.cols());
  return std::make_shared<MaskedMatrixOracle>(target, std::move(m));
}

Vector CompositeProblem::u_star_for(double gamma) const {
  if (!truth) throw std::logic_error("problem has no ground truth");
  return truth->x_star - gamma * smooth->gradient(truth->x_star);
}

}  // namespace proxident
