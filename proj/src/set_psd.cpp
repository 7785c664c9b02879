#include "strataopt/set_psd.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace strataopt {

namespace {

Matrix symmetric_part(const Matrix& z) { return 0.5 * (z + z.transpose()); }

// Eigen orders eigenvalues ascending; flip to nonincreasing.
void eig_descending(const Matrix& sym, Matrix& u, Vector& lambda) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const int n = static_cast<int>(sym.rows());
  u.resize(n, n);
  lambda.resize(n);
  for (int i = 0; i < n; ++i) {
    lambda(i) = es.eigenvalues()(n - 1 - i);
    u.col(i) = es.eigenvectors().col(n - 1 - i);
  }
}

double positivity_cutoff(const Vector& lambda_desc) {
  const double top = lambda_desc.size() > 0 ? lambda_desc(0) : 0.0;
  return 1e-12 * std::max(1.0, top);
}

Matrix keep_top_positive(const Matrix& u, const Vector& lambda_desc, int r) {
  const int n = static_cast<int>(u.rows());
  const double cutoff = positivity_cutoff(lambda_desc);
  Matrix out = Matrix::Zero(n, n);
  int kept = 0;
  for (int i = 0; i < lambda_desc.size() && kept < r; ++i) {
    if (lambda_desc(i) > cutoff) {
      out += lambda_desc(i) * u.col(i) * u.col(i).transpose();
      ++kept;
    }
  }
  return out;
}

}  // namespace

Matrix EigenFactoredMatrix::reconstruct() const {
  if (rank() == 0) return Matrix::Zero(u.rows(), u.rows());
  return u * lambda.asDiagonal() * u.transpose();
}

EigenFactoredMatrix psd_factor(const Matrix& x) {
  Matrix u;
  Vector lam;
  eig_descending(symmetric_part(x), u, lam);
  const double cutoff = positivity_cutoff(lam);
  int k = 0;
  while (k < lam.size() && lam(k) > cutoff) ++k;
  EigenFactoredMatrix f;
  f.u = u.leftCols(k);
  f.lambda = lam.head(k);
  return f;
}

Matrix project_to_psd_bounded_rank(const Matrix& z, int r) {
  if (z.rows() != z.cols()) {
    throw Error("PSD projection requires a square matrix");
  }
  if (r < 1 || r > z.rows()) {
    throw RankOutOfRange("rank bound outside [1, n]");
  }
  Matrix u;
  Vector lam;
  eig_descending(symmetric_part(z), u, lam);
  return keep_top_positive(u, lam, r);
}

Matrix project_to_tangent_cone_psd(const Matrix& x, const Matrix& z, int r) {
  if (x.rows() != x.cols() || z.rows() != z.cols() || x.rows() != z.rows()) {
    throw Error("PSD tangent projection requires matching square shapes");
  }
  if (r < 1 || r > x.rows()) {
    throw RankOutOfRange("rank bound outside [1, n]");
  }
  const EigenFactoredMatrix f = psd_factor(x);
  const int k = f.rank();
  if (k > r) {
    throw RankOutOfRange("base point exceeds the rank bound");
  }
  const Matrix zs = symmetric_part(z);
  if (k == 0) {
    Matrix u;
    Vector lam;
    eig_descending(zs, u, lam);
    return keep_top_positive(u, lam, r);
  }
  const Matrix uz = f.u * (f.u.transpose() * zs);
  const Matrix residual = zs - uz - uz.transpose() + f.u * ((f.u.transpose() * zs) * f.u) * f.u.transpose();
  const Matrix through = zs - residual;
  Matrix out = through;
  if (r > k) {
    Matrix u;
    Vector lam;
    eig_descending(residual, u, lam);
    out += keep_top_positive(u, lam, r - k);
  }
  return symmetric_part(out);
}

int psd_delta_rank(const Matrix& x, double delta) {
  if (!(delta > 0.0)) {
    throw ParamOutOfRange("delta must be positive");
  }
  Matrix u;
  Vector lam;
  eig_descending(symmetric_part(x), u, lam);
  int count = 0;
  for (int i = 0; i < lam.size(); ++i) {
    if (lam(i) > delta) ++count;
  }
  return count;
}

CurvatureWitness psd_curvature_witness(const Matrix& x, int r) {
  const int n = static_cast<int>(x.rows());
  if (x.rows() != x.cols()) {
    throw Error("PSD witness requires a square matrix");
  }
  if (n <= r) {
    throw DimensionTooSmall("curvature witness needs n > r");
  }
  Matrix u;
  Vector lam;
  eig_descending(symmetric_part(x), u, lam);
  const double cutoff = positivity_cutoff(lam);
  int k = 0;
  while (k < lam.size() && lam(k) > cutoff) ++k;
  if (k < 1 || k > r) {
    throw RankOutOfRange("witness requires 1 <= rank(x) <= r");
  }
  const double lam_min = lam(k - 1);
  Matrix core = Matrix::Zero(n, n);
  core(k - 1, k) = lam_min;
  core(k, k - 1) = lam_min;
  for (int t = 0; t < r - k; ++t) {
    core(k + 1 + t, k + 1 + t) = lam_min;
  }
  CurvatureWitness w;
  w.z = u * core * u.transpose();
  w.distance = 0.5 * (std::sqrt(5.0) - 1.0) * lam_min;
  w.ratio = w.distance / ((r - k + 2) * lam_min * lam_min);
  return w;
}

PsdSet::PsdSet(int n, int r) : n_(n), r_(r) {
  if (n < 1) {
    throw DimensionTooSmall("matrix dimension must be positive");
  }
  if (r < 1 || r > n) {
    throw RankOutOfRange("rank bound outside [1, n]");
  }
}

void PsdSet::check_shape(const Matrix& x) const {
  if (x.rows() != n_ || x.cols() != n_) {
    throw Error("matrix shape does not match the set");
  }
}

int PsdSet::stratum_index(const Matrix& x) const {
  check_shape(x);
  count_svd();
  return psd_factor(x).rank();
}

Matrix PsdSet::project_to_set(const Matrix& z) const {
  check_shape(z);
  count_svd();
  return project_to_psd_bounded_rank(z, r_);
}

Matrix PsdSet::project_to_stratum(const Matrix& x, int j) const {
  check_shape(x);
  if (j < 0 || j > r_) {
    throw RankOutOfRange("stratum index outside [0, r]");
  }
  count_svd();
  if (j == 0) return Matrix::Zero(n_, n_);
  Matrix u;
  Vector lam;
  eig_descending(symmetric_part(x), u, lam);
  return keep_top_positive(u, lam, j);
}

double PsdSet::distance_to_stratum(const Matrix& x, int j) const {
  return (x - project_to_stratum(x, j)).norm();
}

Matrix PsdSet::project_to_tangent_cone(const Matrix& x, const Matrix& z) const {
  check_shape(x);
  check_shape(z);
  count_svd(2);
  return project_to_tangent_cone_psd(x, z, r_);
}

int PsdSet::delta_rank(const Matrix& x, double delta) const {
  check_shape(x);
  count_svd();
  return psd_delta_rank(x, delta);
}

}  // namespace strataopt
