#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "strataopt/set_psd.hpp"

using namespace strataopt;

namespace {

Matrix random_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Matrix z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = gauss(rng);
  return z;
}

Matrix random_psd_rank(int n, int k, std::mt19937_64& rng) {
  if (k == 0) return Matrix::Zero(n, n);
  std::normal_distribution<double> gauss;
  Matrix b(n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) b(i, j) = gauss(rng);
  return b * b.transpose();
}

// Keep the top q strictly positive eigenvalues of a symmetric matrix.
Matrix psd_truncate_by_eig(const Matrix& s, int q) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
  const int n = static_cast<int>(s.rows());
  Matrix out = Matrix::Zero(n, n);
  for (int i = 0; i < q && i < n; ++i) {
    const double lam = eig.eigenvalues()(n - 1 - i);
    if (lam <= 0.0) break;
    const Vector v = eig.eigenvectors().col(n - 1 - i);
    out += lam * v * v.transpose();
  }
  return out;
}

// Tangent projection through an explicitly formed range complement.
Matrix psd_tangent_by_complements(const Matrix& x, const Matrix& z, int r) {
  const Matrix s = 0.5 * (z + z.transpose());
  const EigenFactoredMatrix fx = psd_factor(x);
  const int k = fx.rank();
  if (k == 0) return psd_truncate_by_eig(s, r);
  const int n = static_cast<int>(x.rows());
  const Matrix q = Eigen::HouseholderQR<Matrix>(fx.u).householderQ();
  const Matrix u_perp = q.rightCols(n - k);
  const Matrix pp = u_perp * u_perp.transpose();
  const Matrix residual = pp * s * pp;
  return (s - residual) + psd_truncate_by_eig(residual, r - k);
}

Matrix diag3(double a, double b, double c) {
  Matrix x = Matrix::Zero(3, 3);
  x(0, 0) = a;
  x(1, 1) = b;
  x(2, 2) = c;
  return x;
}

}  // namespace

TEST_CASE("spectral factorization keeps the positive part") {
  const EigenFactoredMatrix f = psd_factor(diag3(3.0, 1.0, -2.0));
  CHECK(f.rank() == 2);
  CHECK(f.lambda(0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.lambda(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((f.reconstruct() - diag3(3.0, 1.0, 0.0)).norm() < 1e-12);
  CHECK((f.u.transpose() * f.u - Matrix::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("bounded-rank projection matches hand values") {
  CHECK((project_to_psd_bounded_rank(diag3(3.0, 1.0, -2.0), 2) - diag3(3.0, 1.0, 0.0)).norm() <
        1e-12);
  CHECK((project_to_psd_bounded_rank(diag3(3.0, 1.0, -2.0), 1) - diag3(3.0, 0.0, 0.0)).norm() <
        1e-12);
  Matrix z(2, 2);
  z << 1.0, 2.0, 0.0, 1.0;
  Matrix want(2, 2);
  want << 1.0, 1.0, 1.0, 1.0;
  CHECK((project_to_psd_bounded_rank(z, 1) - want).norm() < 1e-12);
  CHECK_THROWS_AS(project_to_psd_bounded_rank(z, 0), RankOutOfRange);
  CHECK_THROWS_AS(project_to_psd_bounded_rank(z, 3), RankOutOfRange);
  CHECK_THROWS_AS(project_to_psd_bounded_rank(Matrix::Ones(2, 3), 1), Error);
}

TEST_CASE("distance to the set follows the kept-spectrum identity") {
  std::mt19937_64 rng(23);
  PsdSet set(4, 2);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix z = random_matrix(4, rng);
    const Matrix p = project_to_psd_bounded_rank(z, 2);
    const double direct = (z - p).norm();
    CHECK(set.distance_to_set(z) == doctest::Approx(direct).epsilon(1e-10));
    const double kept = p.squaredNorm();
    CHECK(direct * direct == doctest::Approx(z.squaredNorm() - kept).epsilon(1e-9));
  }
}

TEST_CASE("tangent projection agrees with the complement route") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 3 + trial % 2;
    const int k = trial % 3;
    const Matrix x = random_psd_rank(n, k, rng);
    const Matrix z = random_matrix(n, rng);
    const Matrix got = project_to_tangent_cone_psd(x, z, 2);
    const Matrix want = psd_tangent_by_complements(x, z, 2);
    CHECK((got - want).norm() < 1e-10 * std::max(1.0, z.norm()));
    CHECK((got - got.transpose()).norm() < 1e-12 * std::max(1.0, got.norm()));
  }
}

TEST_CASE("tangent projection is an idempotent cone projection") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix x = random_psd_rank(4, 1 + trial % 2, rng);
    const Matrix z = random_matrix(4, rng);
    const Matrix p = project_to_tangent_cone_psd(x, z, 2);
    const Matrix again = project_to_tangent_cone_psd(x, p, 2);
    CHECK((again - p).norm() < 1e-10 * std::max(1.0, p.norm()));
    // Orthogonal residual; holds for nonsymmetric z because the cone sits
    // inside the symmetric subspace.
    const double inner = (p.cwiseProduct(z - p)).sum();
    CHECK(std::abs(inner) < 1e-10 * std::max(1.0, z.squaredNorm()));
  }
}

TEST_CASE("delta rank counts eigenvalues strictly above the threshold") {
  const Matrix x = diag3(1.0, 0.5, 0.05);
  CHECK(psd_delta_rank(x, 0.1) == 2);
  CHECK(psd_delta_rank(x, 0.04) == 3);
  CHECK(psd_delta_rank(x, 1.0) == 0);
  CHECK(psd_delta_rank(x, 0.5) == 1);
  CHECK(psd_delta_rank(diag3(1.0, 0.5, -2.0), 0.4) == 2);
  Matrix z(2, 2);
  z << 1.0, 2.0, 0.0, 1.0;
  CHECK(psd_delta_rank(z, 1.0) == 1);
  CHECK_THROWS_AS(psd_delta_rank(x, -0.5), ParamOutOfRange);
}

TEST_CASE("curvature witness at a full-rank base point") {
  const Matrix x = diag3(2.0, 1.0, 0.0);
  const CurvatureWitness w = psd_curvature_witness(x, 2);
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  CHECK(w.distance == doctest::Approx(golden).epsilon(1e-12));
  CHECK(w.z.squaredNorm() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK((w.z - w.z.transpose()).norm() < 1e-12);
  PsdSet set(3, 2);
  CHECK(set.distance_to_set(x + w.z) == doctest::Approx(w.distance).epsilon(1e-10));
  const Matrix p = project_to_tangent_cone_psd(x, w.z, 2);
  CHECK((p - w.z).norm() < 1e-10);
}

TEST_CASE("curvature witness below full rank fills the remaining slots") {
  const Matrix x = diag3(1.5, 0.0, 0.0);
  const CurvatureWitness w = psd_curvature_witness(x, 2);
  CHECK(w.distance == doctest::Approx(0.5 * (std::sqrt(5.0) - 1.0) * 1.5).epsilon(1e-12));
  CHECK(w.z.squaredNorm() == doctest::Approx(6.75).epsilon(1e-12));
  PsdSet set(3, 2);
  CHECK(set.distance_to_set(x + w.z) == doctest::Approx(w.distance).epsilon(1e-10));
  const Matrix p = project_to_tangent_cone_psd(x, w.z, 2);
  CHECK((p - w.z).norm() < 1e-10);
}

TEST_CASE("curvature witness rejects degenerate setups") {
  CHECK_THROWS_AS(psd_curvature_witness(Matrix::Identity(2, 2), 2), DimensionTooSmall);
  CHECK_THROWS_AS(psd_curvature_witness(Matrix::Zero(3, 3), 2), RankOutOfRange);
}

TEST_CASE("set adapter exposes strata and operations") {
  PsdSet set(3, 2);
  CHECK(set.dim() == 3);
  CHECK(set.num_strata() == 2);
  CHECK(set.stratum_index(Matrix::Zero(3, 3)) == 0);
  CHECK(set.stratum_index(diag3(1.0, 0.5, 0.0)) == 2);
  CHECK(set.is_feasible(diag3(1.0, 0.5, 0.0)));
  CHECK(!set.is_feasible(diag3(1.0, 0.5, 0.25)));
  CHECK(!set.is_feasible(-Matrix::Identity(3, 3)));
  CHECK(set.project_to_set(-Matrix::Identity(3, 3)).norm() == 0.0);
  const Matrix y = diag3(1.0, 0.5, 0.25);
  CHECK((set.project_to_stratum(y, 1) - diag3(1.0, 0.0, 0.0)).norm() < 1e-12);
  CHECK(set.distance_to_stratum(y, 1) == doctest::Approx(std::sqrt(0.3125)).epsilon(1e-12));
  CHECK_THROWS_AS(set.project_to_stratum(y, 3), RankOutOfRange);
  CHECK_THROWS_AS(set.project_to_set(Matrix::Zero(2, 2)), Error);
  CHECK(set.has_delta_rank());
  CHECK(set.delta_rank(diag3(1.0, 0.5, 0.05), 0.1) == 2);
  CHECK_THROWS_AS(PsdSet(0, 1), DimensionTooSmall);
  CHECK_THROWS_AS(PsdSet(3, 0), RankOutOfRange);
  CHECK_THROWS_AS(PsdSet(3, 4), RankOutOfRange);

  OpCounters ops;
  set.attach_counters(&ops);
  set.project_to_set(Matrix::Ones(3, 3));
  CHECK(ops.svd_calls == 1);
  set.project_to_tangent_cone(diag3(1.0, 0.0, 0.0), Matrix::Ones(3, 3));
  CHECK(ops.svd_calls == 3);
}
