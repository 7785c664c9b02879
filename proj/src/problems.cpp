#include "strataopt/problems.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace strataopt {

namespace {

void check_shape(const Matrix& x, int rows, int cols, const char* what) {
  if (x.rows() != rows || x.cols() != cols) {
    throw Error(std::string(what) + ": unexpected shape");
  }
}

}  // namespace

double phi(double t) {
  const double u = t + 1.0;
  return 0.25 * t * t * t * t - 0.5 * u * u;
}

double phi_prime(double t) { return t * t * t - t - 1.0; }

double phi_root() {
  // phi' is increasing on [1, 2] with a sign change.
  double lo = 1.0, hi = 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (phi_prime(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double Lkb22Cost::value_impl(const Matrix& x) const {
  check_shape(x, 3, 3, "lkb22 cost");
  const double d1 = x(0, 0) - 1.0;
  const double q = 0.5 * (d1 * d1 + x(0, 1) * x(0, 1) +
                          0.25 * (x(1, 0) * x(1, 0) + x(1, 1) * x(1, 1)));
  return q + phi(x(2, 2));
}

Matrix Lkb22Cost::gradient_impl(const Matrix& x) const {
  check_shape(x, 3, 3, "lkb22 cost");
  Matrix g = Matrix::Zero(3, 3);
  g(0, 0) = x(0, 0) - 1.0;
  g(0, 1) = x(0, 1);
  g(1, 0) = 0.25 * x(1, 0);
  g(1, 1) = 0.25 * x(1, 1);
  g(2, 2) = phi_prime(x(2, 2));
  return g;
}

Matrix Lkb22Cost::hessian_action_impl(const Matrix& x, const Matrix& u) const {
  check_shape(x, 3, 3, "lkb22 cost");
  check_shape(u, 3, 3, "lkb22 direction");
  Matrix h = Matrix::Zero(3, 3);
  h(0, 0) = u(0, 0);
  h(0, 1) = u(0, 1);
  h(1, 0) = 0.25 * u(1, 0);
  h(1, 1) = 0.25 * u(1, 1);
  h(2, 2) = (3.0 * x(2, 2) * x(2, 2) - 1.0) * u(2, 2);
  return h;
}

double TwoByTwoCost::value_impl(const Matrix& x) const {
  check_shape(x, 2, 2, "two_by_two cost");
  const double d2 = x(1, 1) - 1.0;
  const double skew = x(0, 1) - x(1, 0);
  return 0.5 * (x(0, 0) * x(0, 0) + d2 * d2 + skew * skew);
}

Matrix TwoByTwoCost::gradient_impl(const Matrix& x) const {
  check_shape(x, 2, 2, "two_by_two cost");
  Matrix g(2, 2);
  g(0, 0) = x(0, 0);
  g(0, 1) = x(0, 1) - x(1, 0);
  g(1, 0) = x(1, 0) - x(0, 1);
  g(1, 1) = x(1, 1) - 1.0;
  return g;
}

Matrix TwoByTwoCost::hessian_action_impl(const Matrix& x, const Matrix& u) const {
  check_shape(x, 2, 2, "two_by_two cost");
  check_shape(u, 2, 2, "two_by_two direction");
  Matrix h(2, 2);
  h(0, 0) = u(0, 0);
  h(0, 1) = u(0, 1) - u(1, 0);
  h(1, 0) = u(1, 0) - u(0, 1);
  h(1, 1) = u(1, 1);
  return h;
}

SparseApocCost::SparseApocCost(Vector x_star) : x_star_(std::move(x_star)) {}

double SparseApocCost::value_impl(const Matrix& x) const {
  check_shape(x, static_cast<int>(x_star_.size()), 1, "sparse cost");
  return 0.25 * (x.col(0) - x_star_).squaredNorm();
}

Matrix SparseApocCost::gradient_impl(const Matrix& x) const {
  check_shape(x, static_cast<int>(x_star_.size()), 1, "sparse cost");
  return 0.5 * (x.col(0) - x_star_);
}

Matrix SparseApocCost::hessian_action_impl(const Matrix& x, const Matrix& u) const {
  check_shape(x, static_cast<int>(x_star_.size()), 1, "sparse cost");
  check_shape(u, static_cast<int>(x_star_.size()), 1, "sparse direction");
  return 0.5 * u;
}

MaskedLsqCost::MaskedLsqCost(Matrix mask, Matrix b) : mask_(std::move(mask)), b_(std::move(b)) {
  if (mask_.rows() != b_.rows() || mask_.cols() != b_.cols()) {
    throw Error("masked cost: mask and target shapes differ");
  }
}

double MaskedLsqCost::value_impl(const Matrix& x) const {
  check_shape(x, static_cast<int>(mask_.rows()), static_cast<int>(mask_.cols()),
              "masked cost");
  return 0.5 * (mask_.cwiseProduct(x) - b_).squaredNorm();
}

Matrix MaskedLsqCost::gradient_impl(const Matrix& x) const {
  check_shape(x, static_cast<int>(mask_.rows()), static_cast<int>(mask_.cols()),
              "masked cost");
  // mask entries are 0/1, so masking the residual once suffices.
  return mask_.cwiseProduct(mask_.cwiseProduct(x) - b_);
}

Matrix MaskedLsqCost::hessian_action_impl(const Matrix&, const Matrix& u) const {
  return mask_.cwiseProduct(mask_.cwiseProduct(u));
}

Lkb22Instance lkb22_instance() {
  Lkb22Instance inst;
  inst.cost = std::make_shared<Lkb22Cost>();
  inst.x0 = Matrix::Zero(3, 3);
  inst.x0(0, 0) = 2.0;
  inst.x0(1, 1) = 1.0;
  inst.root = phi_root();
  inst.f_star = phi(inst.root);
  return inst;
}

TwoByTwoInstance two_by_two_instance() {
  TwoByTwoInstance inst;
  inst.cost = std::make_shared<TwoByTwoCost>();
  inst.minimizer = Matrix::Zero(2, 2);
  inst.minimizer(1, 1) = 1.0;
  return inst;
}

SparseApocInstance sparse_apocalypse_instance(int n, int s) {
  if (n < 2 || s < 1 || s >= n) {
    throw ParamOutOfRange("sparse instance needs 1 <= s < n");
  }
  SparseApocInstance inst;
  inst.n = n;
  inst.s = s;
  inst.x_star = Vector::Zero(n);
  for (int i = 0; i < s; ++i) inst.x_star(i) = 1.0;
  inst.x0 = Vector::Zero(n);
  inst.x0(n - 1) = 1.0;
  inst.cost = std::make_shared<SparseApocCost>(inst.x_star);
  return inst;
}

Vector SparseApocInstance::x_j(int j) const {
  if (j < 0 || j >= s) {
    throw ParamOutOfRange("family index outside [0, s)");
  }
  Vector v = x_star;
  v(j) = 0.0;
  return v;
}

Vector SparseApocInstance::x_kj(int k, int j) const {
  if (k < 0) {
    throw ParamOutOfRange("family step must be nonnegative");
  }
  const double w = std::pow(2.0, -static_cast<double>(k));
  return (1.0 - w) * x_j(j) + w * x0;
}

double SparseApocInstance::measure(int k) const {
  if (k < 0) {
    throw ParamOutOfRange("family step must be nonnegative");
  }
  return std::pow(2.0, -static_cast<double>(k + 1)) * std::sqrt(static_cast<double>(s));
}

std::pair<Matrix, Matrix> lifted_gradient(const CostFunction& f, const Matrix& l,
                                          const Matrix& r) {
  if (l.cols() != r.cols()) {
    throw Error("lifted gradient: factor widths differ");
  }
  const Matrix grad = f.gradient(l * r.transpose());
  return {grad * r, grad.transpose() * l};
}

Matrix lifted_hessian_matrix(const CostFunction& f, const Matrix& l, const Matrix& r) {
  if (!f.has_hessian()) {
    throw NoHessian("lifted Hessian needs a Hessian action");
  }
  if (l.cols() != r.cols()) {
    throw Error("lifted Hessian: factor widths differ");
  }
  const int m = static_cast<int>(l.rows());
  const int n = static_cast<int>(r.rows());
  const int k = static_cast<int>(l.cols());
  const int dim = (m + n) * k;
  const Matrix x = l * r.transpose();
  const Matrix grad = f.gradient(x);

  // Row-major coordinates: L(i, a) -> i*k + a, then R(j, a) -> m*k + j*k + a.
  Matrix h(dim, dim);
  for (int col = 0; col < dim; ++col) {
    Matrix dl = Matrix::Zero(m, k);
    Matrix dr = Matrix::Zero(n, k);
    if (col < m * k) {
      dl(col / k, col % k) = 1.0;
    } else {
      const int idx = col - m * k;
      dr(idx / k, idx % k) = 1.0;
    }
    const Matrix dx = dl * r.transpose() + l * dr.transpose();
    const Matrix hdx = f.hessian_action(x, dx);
    const Matrix bl = hdx * r + grad * dr;
    const Matrix br = hdx.transpose() * l + grad.transpose() * dl;
    for (int i = 0; i < m; ++i) {
      for (int a = 0; a < k; ++a) h(i * k + a, col) = bl(i, a);
    }
    for (int j = 0; j < n; ++j) {
      for (int a = 0; a < k; ++a) h(m * k + j * k + a, col) = br(j, a);
    }
  }
  return h;
}

double smallest_eigenvalue(const Matrix& h) {
  if (h.rows() != h.cols()) {
    throw NonSymmetric("matrix is not square");
  }
  const double asym = (h - h.transpose()).norm();
  if (asym > 1e-8 * std::max(1.0, h.norm())) {
    throw NonSymmetric("matrix asymmetry exceeds tolerance");
  }
  const Matrix sym = 0.5 * (h + h.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  return es.eigenvalues()(0);
}

}  // namespace strataopt
