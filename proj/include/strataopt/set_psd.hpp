#pragma once

#include "strataopt/core.hpp"
#include "strataopt/set_determinantal.hpp"

namespace strataopt {

// Spectral factorization of the symmetric part keeping only eigenvalues
// above 1e-12 * max(1, lambda_max), in nonincreasing order.
struct EigenFactoredMatrix {
  Matrix u;       // n x k, orthonormal columns
  Vector lambda;  // k strictly positive values, nonincreasing

  int rank() const { return static_cast<int>(lambda.size()); }
  Matrix reconstruct() const;
};

EigenFactoredMatrix psd_factor(const Matrix& x);

// Projection of z onto the PSD matrices of rank at most r: symmetrize, then
// keep the top r strictly positive eigenvalues.
Matrix project_to_psd_bounded_rank(const Matrix& z, int r);

// Projection of z onto the tangent cone at a feasible x: the symmetric part
// through the range of x passes unchanged, the complementary residual is
// projected onto the PSD matrices of rank at most r - rank(x).
Matrix project_to_tangent_cone_psd(const Matrix& x, const Matrix& z, int r);

// Number of eigenvalues of the symmetric part strictly above delta.
int psd_delta_rank(const Matrix& x, double delta);

// Same construction as the determinantal witness with eigenvalues in place
// of singular values; the witness direction is symmetric.
CurvatureWitness psd_curvature_witness(const Matrix& x, int r);

class PsdSet : public SetAdapter {
 public:
  PsdSet(int n, int r);

  int dim() const { return n_; }
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
  int n_, r_;
};

}  // namespace strataopt
