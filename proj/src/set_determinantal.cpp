#include "strataopt/set_determinantal.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace strataopt {

namespace {

constexpr double kRankCutoff = 1e-12;

Eigen::JacobiSVD<Matrix> thin_svd(const Matrix& x) {
  return Eigen::JacobiSVD<Matrix>(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

}  // namespace

Matrix FactoredMatrix::reconstruct() const {
  if (rank() == 0) return Matrix::Zero(u.rows(), v.rows());
  return u * sigma.asDiagonal() * v.transpose();
}

FactoredMatrix factor(const Matrix& x) {
  const auto svd = thin_svd(x);
  const Vector& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? kRankCutoff * s(0) : 0.0;
  int k = 0;
  while (k < s.size() && s(k) > cutoff && s(k) > 0.0) ++k;
  FactoredMatrix f;
  f.u = svd.matrixU().leftCols(k);
  f.sigma = s.head(k);
  f.v = svd.matrixV().leftCols(k);
  return f;
}

int numerical_rank(const Matrix& x) { return factor(x).rank(); }

Matrix truncate_rank(const Matrix& z, int r) {
  const int rmax = static_cast<int>(std::min(z.rows(), z.cols()));
  if (r < 0 || r > rmax) {
    throw RankOutOfRange("rank bound outside [0, min(m, n)]");
  }
  if (r == 0) return Matrix::Zero(z.rows(), z.cols());
  const auto svd = thin_svd(z);
  const Vector& s = svd.singularValues();
  const int k = static_cast<int>(std::min<long>(r, s.size()));
  return svd.matrixU().leftCols(k) * s.head(k).asDiagonal() *
         svd.matrixV().leftCols(k).transpose();
}

Matrix project_to_variety(const Matrix& z, int r) {
  const int rmax = static_cast<int>(std::min(z.rows(), z.cols()));
  if (r < 1 || r > rmax) {
    throw RankOutOfRange("rank bound outside [1, min(m, n)]");
  }
  return truncate_rank(z, r);
}

Matrix project_to_tangent_cone_variety(const Matrix& x, const Matrix& z, int r) {
  const int rmax = static_cast<int>(std::min(x.rows(), x.cols()));
  if (r < 1 || r > rmax) {
    throw RankOutOfRange("rank bound outside [1, min(m, n)]");
  }
  if (x.rows() != z.rows() || x.cols() != z.cols()) {
    throw Error("tangent projection requires matching shapes");
  }
  const FactoredMatrix f = factor(x);
  const int k = f.rank();
  if (k > r) {
    throw RankOutOfRange("base point exceeds the rank bound");
  }
  if (k == 0) return truncate_rank(z, r);
  const Matrix uu_z = f.u * (f.u.transpose() * z);
  const Matrix z_vv = (z * f.v) * f.v.transpose();
  const Matrix uu_z_vv = f.u * ((f.u.transpose() * z) * f.v) * f.v.transpose();
  const Matrix residual = z - uu_z - z_vv + uu_z_vv;
  const Matrix through = uu_z + z_vv - uu_z_vv;
  if (r == k) return through;
  return through + truncate_rank(residual, r - k);
}

int delta_rank_variety(const Matrix& x, double delta) {
  if (!(delta > 0.0)) {
    throw ParamOutOfRange("delta must be positive");
  }
  const auto svd = thin_svd(x);
  const Vector& s = svd.singularValues();
  int count = 0;
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) > delta) ++count;
  }
  return count;
}

bool mordukhovich_check(const Matrix& x, const Matrix& grad, int r, double tol) {
  const int rmax = static_cast<int>(std::min(x.rows(), x.cols()));
  if (r < 1 || r > rmax) {
    throw RankOutOfRange("rank bound outside [1, min(m, n)]");
  }
  const int k = numerical_rank(x);
  if (k > r) {
    throw RankOutOfRange("point lies outside the variety");
  }
  // Stationarity on the rank-<=rank(x) variety; vacuous at the origin where
  // that variety is the singleton {0}.
  if (k > 0 && project_to_tangent_cone_variety(x, -grad, k).norm() > tol) {
    return false;
  }
  if (k >= r) return true;
  const auto svd = thin_svd(grad);
  const Vector& s = svd.singularValues();
  int grad_rank = 0;
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) > tol) ++grad_rank;
  }
  return grad_rank <= rmax - r;
}

CurvatureWitness curvature_witness(const Matrix& x, int r) {
  const int m = static_cast<int>(x.rows());
  const int n = static_cast<int>(x.cols());
  if (m <= r || n <= r) {
    throw DimensionTooSmall("curvature witness needs m > r and n > r");
  }
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? kRankCutoff * s(0) : 0.0;
  int k = 0;
  while (k < s.size() && s(k) > cutoff && s(k) > 0.0) ++k;
  if (k < 1 || k > r) {
    throw RankOutOfRange("witness requires 1 <= rank(x) <= r");
  }
  const double sig = s(k - 1);
  // Blocks in the full singular bases: a 2x2 swap block on index k-1..k plus
  // sigma_min times the identity on the next r - k diagonal slots.
  Matrix core = Matrix::Zero(m, n);
  core(k - 1, k) = sig;
  core(k, k - 1) = sig;
  for (int t = 0; t < r - k; ++t) {
    core(k + 1 + t, k + 1 + t) = sig;
  }
  CurvatureWitness w;
  w.z = svd.matrixU() * core * svd.matrixV().transpose();
  w.distance = 0.5 * (std::sqrt(5.0) - 1.0) * sig;
  const double znorm2 = (r - k + 2) * sig * sig;
  w.ratio = w.distance / znorm2;
  return w;
}

DeterminantalSet::DeterminantalSet(int m, int n, int r) : m_(m), n_(n), r_(r) {
  if (m < 1 || n < 1) {
    throw DimensionTooSmall("matrix dimensions must be positive");
  }
  if (r < 1 || r > std::min(m, n)) {
    throw RankOutOfRange("rank bound outside [1, min(m, n)]");
  }
}

void DeterminantalSet::check_shape(const Matrix& x) const {
  if (x.rows() != m_ || x.cols() != n_) {
    throw Error("matrix shape does not match the set");
  }
}

int DeterminantalSet::stratum_index(const Matrix& x) const {
  check_shape(x);
  count_svd();
  return numerical_rank(x);
}

Matrix DeterminantalSet::project_to_set(const Matrix& z) const {
  check_shape(z);
  count_svd();
  return truncate_rank(z, r_);
}

Matrix DeterminantalSet::project_to_stratum(const Matrix& x, int j) const {
  check_shape(x);
  if (j < 0 || j > r_) {
    throw RankOutOfRange("stratum index outside [0, r]");
  }
  count_svd();
  return truncate_rank(x, j);
}

double DeterminantalSet::distance_to_stratum(const Matrix& x, int j) const {
  check_shape(x);
  if (j < 0 || j > r_) {
    throw RankOutOfRange("stratum index outside [0, r]");
  }
  count_svd();
  const auto svd = thin_svd(x);
  const Vector& s = svd.singularValues();
  double acc = 0.0;
  for (int i = j; i < s.size(); ++i) acc += s(i) * s(i);
  return std::sqrt(acc);
}

Matrix DeterminantalSet::project_to_tangent_cone(const Matrix& x, const Matrix& z) const {
  check_shape(x);
  check_shape(z);
  count_svd(2);  // factor(x) plus the residual truncation
  return project_to_tangent_cone_variety(x, z, r_);
}

int DeterminantalSet::delta_rank(const Matrix& x, double delta) const {
  check_shape(x);
  count_svd();
  return delta_rank_variety(x, delta);
}

}  // namespace strataopt
