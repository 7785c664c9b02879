#pragma once

#include "strataopt/core.hpp"

namespace strataopt {

// Thin SVD factorization keeping only singular values above
// 1e-12 * sigma_max, stored in nonincreasing order.
struct FactoredMatrix {
  Matrix u;      // m x k, orthonormal columns
  Vector sigma;  // k strictly positive values, nonincreasing
  Matrix v;      // n x k, orthonormal columns

  int rank() const { return static_cast<int>(sigma.size()); }
  Matrix reconstruct() const;
};

FactoredMatrix factor(const Matrix& x);
int numerical_rank(const Matrix& x);

// Best approximation of z with rank at most r (singular value truncation).
// Throws RankOutOfRange unless 0 <= r <= min(m, n).
Matrix truncate_rank(const Matrix& z, int r);
Matrix project_to_variety(const Matrix& z, int r);

// Projection of z onto the tangent cone of the rank-<=r variety at x.
// Splits z into its component through the row/column spaces of x plus the
// residual (I - U U^T) z (I - V V^T), and keeps the best rank-(r - rank x)
// part of the residual. Orthonormal complements are never formed.
Matrix project_to_tangent_cone_variety(const Matrix& x, const Matrix& z, int r);

// Number of singular values strictly above delta.
int delta_rank_variety(const Matrix& x, double delta);

// Mordukhovich stationarity test at x with the given ambient gradient:
// the measure on the rank-<=rank(x) variety must not exceed tol, and at
// rank-deficient points the gradient rank may not exceed min(m,n) - r.
bool mordukhovich_check(const Matrix& x, const Matrix& grad, int r, double tol);

// Tangent direction z at x realizing the curvature lower bound: the distance
// d(x + z, C) equals (sqrt(5)-1)/2 * sigma_min and the sampled second-order
// ratio is at least (sqrt(5)-1) / ((r+1) * 2 * sigma_min).
struct CurvatureWitness {
  Matrix z;
  double distance = 0.0;  // predicted d(x + z, C)
  double ratio = 0.0;     // predicted d(x + z, C) / |z|^2
};

CurvatureWitness curvature_witness(const Matrix& x, int r);

class DeterminantalSet : public SetAdapter {
 public:
  DeterminantalSet(int m, int n, int r);

  int rows() const { return m_; }
  int cols() const { return n_; }
  int max_rank() const { return r_; }

  int num_strata() const override { return r_; }
  int stratum_index(const Matrix& x) const override;
  Matrix project_to_set(const Matrix& z) const override;
  Matrix project_to_stratum(const Matrix& x, int j) const override;
  double distance_to_stratum(const Matrix& x, int j) const override;
  Matrix project_to_tangent_cone(const Matrix& x, const Matrix& z) const override;

  bool has_delta_rank() const override { return true; }
  int delta_rank(const Matrix& x, double delta) const override;

 private:
  void check_shape(const Matrix& x) const;
  int m_, n_, r_;
};

}  // namespace strataopt
