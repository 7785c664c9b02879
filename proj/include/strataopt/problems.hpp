#pragma once

#include <memory>

#include "strataopt/core.hpp"

namespace strataopt {

// f(X) = Q(X(0:2,0:2)) + phi(X(2,2)) on 3x3 matrices, where
// Q(Y) = 0.5 * |D (Y - Y*)|^2 with D = diag(1, 1/2), Y* = diag(1, 0), and
// phi(t) = t^4/4 - (t+1)^2/2. Projected gradient descent on the rank-<=2
// variety from diag(2,1,0) with step 8/5 follows a sequence converging to
// the non-stationary rank-1 matrix diag(1,0,0).
class Lkb22Cost final : public CostFunction {
 public:
  bool has_hessian() const override { return true; }

 protected:
  double value_impl(const Matrix& x) const override;
  Matrix gradient_impl(const Matrix& x) const override;
  Matrix hessian_action_impl(const Matrix& x, const Matrix& u) const override;
};

// f(X) = (X(0,0)^2 + (X(1,1)-1)^2 + (X(0,1)-X(1,0))^2) / 2 on 2x2 matrices.
// On the rank-<=1 variety, gradient steps from diag(t,0) shrink t geometrically
// toward the non-stationary origin; the minimizer is diag(0,1).
class TwoByTwoCost final : public CostFunction {
 public:
  bool has_hessian() const override { return true; }

 protected:
  double value_impl(const Matrix& x) const override;
  Matrix gradient_impl(const Matrix& x) const override;
  Matrix hessian_action_impl(const Matrix& x, const Matrix& u) const override;
};

// f(x) = 0.25 * |x - x_star|^2 on n x 1 columns.
class SparseApocCost final : public CostFunction {
 public:
  explicit SparseApocCost(Vector x_star);
  const Vector& x_star() const { return x_star_; }
  bool has_hessian() const override { return true; }

 protected:
  double value_impl(const Matrix& x) const override;
  Matrix gradient_impl(const Matrix& x) const override;
  Matrix hessian_action_impl(const Matrix& x, const Matrix& u) const override;

 private:
  Vector x_star_;
};

// f(X) = 0.5 * |mask .* X - b|^2, a seeded matrix-completion style cost.
class MaskedLsqCost final : public CostFunction {
 public:
  MaskedLsqCost(Matrix mask, Matrix b);
  const Matrix& mask() const { return mask_; }
  const Matrix& target() const { return b_; }
  bool has_hessian() const override { return true; }

 protected:
  double value_impl(const Matrix& x) const override;
  Matrix gradient_impl(const Matrix& x) const override;
  Matrix hessian_action_impl(const Matrix& x, const Matrix& u) const override;

 private:
  Matrix mask_;
  Matrix b_;
};

// phi'(t) = t^3 - t - 1; its real root locates the (3,3) entry of every
// minimizer. Bisected to 1e-14.
double phi_root();
double phi(double t);
double phi_prime(double t);

struct Lkb22Instance {
  std::shared_ptr<Lkb22Cost> cost;
  Matrix x0;       // diag(2, 1, 0)
  double root;     // phi_root()
  double f_star;   // phi(root)
};
Lkb22Instance lkb22_instance();

struct TwoByTwoInstance {
  std::shared_ptr<TwoByTwoCost> cost;
  Matrix minimizer;  // diag(0, 1), f = 0
};
TwoByTwoInstance two_by_two_instance();

// The stall family for the sparse set: x_star has s leading ones, x0 = e_n,
// and x_kj(k, j) = (1 - 2^-k) * (x_star - e_j) + 2^-k * x0. The stationarity
// measure along each family is 2^-(k+1) * sqrt(s).
struct SparseApocInstance {
  int n = 0;
  int s = 0;
  std::shared_ptr<SparseApocCost> cost;
  Vector x_star;
  Vector x0;

  Vector x_j(int j) const;           // x_star with entry j zeroed, j in [0, s)
  Vector x_kj(int k, int j) const;   // k >= 0
  double measure(int k) const;       // 2^-(k+1) * sqrt(s)
};
SparseApocInstance sparse_apocalypse_instance(int n, int s);

// Gradient of g(L, R) = f(L R^T): (grad f(LR^T) R, grad f(LR^T)^T L).
std::pair<Matrix, Matrix> lifted_gradient(const CostFunction& f, const Matrix& l,
                                          const Matrix& r);

// Dense symmetric Hessian of g in the row-major (L, then R) coordinate basis.
// Throws NoHessian if f provides no Hessian action.
Matrix lifted_hessian_matrix(const CostFunction& f, const Matrix& l, const Matrix& r);

// Smallest eigenvalue of a symmetric matrix; throws NonSymmetric when the
// asymmetry exceeds 1e-8 * max(1, |h|).
double smallest_eigenvalue(const Matrix& h);

}  // namespace strataopt
