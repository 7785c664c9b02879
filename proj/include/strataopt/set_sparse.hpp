#pragma once

#include "strataopt/core.hpp"

namespace strataopt {

// Projection result carrying the Euclidean distance together with the sum of
// the absolute values of the entries that were zeroed. The latter is a
// reporting figure only; `distance` is always Euclidean.
struct SparseProjection {
  Vector point;
  double distance = 0.0;
  double dropped_abs_sum = 0.0;
};

std::vector<int> support(const Vector& x);

// Zero the smallest-magnitude entries of y until at most s remain.
// Ties zero the lowest index first.
SparseProjection project_sparse_detailed(const Vector& y, int s);
Vector project_sparse(const Vector& y, int s);

// Clamp negative entries to zero first, then truncate the support as above.
SparseProjection project_nonneg_sparse_detailed(const Vector& y, int s);
Vector project_nonneg_sparse(const Vector& y, int s);

// Tangent cone projection at feasible x: zero the smallest-magnitude entries
// of v outside supp(x) until |supp(x) union supp(w)| <= s.
Vector project_tangent_cone_sparse(const Vector& x, const Vector& v, int s);

// Nonnegative variant: additionally zero negative entries outside supp(x)
// before truncating.
Vector project_tangent_cone_nonneg_sparse(const Vector& x, const Vector& v, int s);

// The restricted tangent cone of the sparse set is the tangent cone itself:
// x + w stays s-sparse for every tangent w. The associated norm ratio
// guarantee is mu = 1/sqrt(n).
Vector restricted_tangent_cone_project_sparse(const Vector& x, const Vector& v, int s);
double sparse_restricted_mu(int n);

class SparseSet : public SetAdapter {
 public:
  SparseSet(int n, int s);

  int dim() const { return n_; }
  int max_support() const { return s_; }

  int num_strata() const override { return s_; }
  int stratum_index(const Matrix& x) const override;
  Matrix project_to_set(const Matrix& z) const override;
  Matrix project_to_stratum(const Matrix& x, int j) const override;
  double distance_to_stratum(const Matrix& x, int j) const override;
  Matrix project_to_tangent_cone(const Matrix& x, const Matrix& z) const override;

  bool has_restricted_cone() const override { return true; }
  Matrix project_to_restricted_cone(const Matrix& x, const Matrix& z) const override;
  double restricted_cone_mu() const override;

 protected:
  Vector as_vector(const Matrix& x) const;
  int n_, s_;
};

class NonnegSparseSet : public SetAdapter {
 public:
  NonnegSparseSet(int n, int s);

  int dim() const { return n_; }
  int max_support() const { return s_; }

  int num_strata() const override { return s_; }
  int stratum_index(const Matrix& x) const override;
  Matrix project_to_set(const Matrix& z) const override;
  Matrix project_to_stratum(const Matrix& x, int j) const override;
  double distance_to_stratum(const Matrix& x, int j) const override;
  Matrix project_to_tangent_cone(const Matrix& x, const Matrix& z) const override;

 private:
  Vector as_vector(const Matrix& x) const;
  int n_, s_;
};

}  // namespace strataopt
