#include "strataopt/set_sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace strataopt {

namespace {

void check_support_bound(int n, int s) {
  if (n < 1) {
    throw DimensionTooSmall("vector dimension must be positive");
  }
  if (s < 1 || s > n) {
    throw ParamOutOfRange("support bound outside [1, n]");
  }
}

// Indices ordered by (|value|, index) ascending; zeroing a prefix of this
// order removes the smallest magnitudes with lowest-index ties first.
std::vector<int> magnitude_order(const Vector& w, const std::vector<int>& candidates) {
  std::vector<int> order = candidates;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double fa = std::abs(w(a));
    const double fb = std::abs(w(b));
    if (fa != fb) return fa < fb;
    return a < b;
  });
  return order;
}

// Zero the smallest-magnitude entries until at most j remain.
Vector keep_largest(const Vector& v, int j) {
  Vector w = v;
  const std::vector<int> supp = support(w);
  const int k = static_cast<int>(supp.size());
  if (k <= j) return w;
  const std::vector<int> order = magnitude_order(w, supp);
  for (int i = 0; i < k - j; ++i) w(order[i]) = 0.0;
  return w;
}

SparseProjection truncate_support(Vector w, int s, double clamped_sq, double clamped_abs) {
  std::vector<int> supp = support(w);
  double dist_sq = clamped_sq;
  double dropped = clamped_abs;
  if (static_cast<int>(supp.size()) > s) {
    const std::vector<int> order = magnitude_order(w, supp);
    const int to_zero = static_cast<int>(supp.size()) - s;
    for (int i = 0; i < to_zero; ++i) {
      const int idx = order[i];
      dist_sq += w(idx) * w(idx);
      dropped += std::abs(w(idx));
      w(idx) = 0.0;
    }
  }
  SparseProjection out;
  out.point = std::move(w);
  out.distance = std::sqrt(dist_sq);
  out.dropped_abs_sum = dropped;
  return out;
}

}  // namespace

std::vector<int> support(const Vector& x) {
  std::vector<int> supp;
  for (int i = 0; i < x.size(); ++i) {
    if (x(i) != 0.0) supp.push_back(i);
  }
  return supp;
}

SparseProjection project_sparse_detailed(const Vector& y, int s) {
  check_support_bound(static_cast<int>(y.size()), s);
  return truncate_support(y, s, 0.0, 0.0);
}

Vector project_sparse(const Vector& y, int s) { return project_sparse_detailed(y, s).point; }

SparseProjection project_nonneg_sparse_detailed(const Vector& y, int s) {
  check_support_bound(static_cast<int>(y.size()), s);
  Vector w = y;
  double clamped_sq = 0.0;
  double clamped_abs = 0.0;
  for (int i = 0; i < w.size(); ++i) {
    if (w(i) < 0.0) {
      clamped_sq += w(i) * w(i);
      clamped_abs += -w(i);
      w(i) = 0.0;
    }
  }
  return truncate_support(std::move(w), s, clamped_sq, clamped_abs);
}

Vector project_nonneg_sparse(const Vector& y, int s) {
  return project_nonneg_sparse_detailed(y, s).point;
}

Vector project_tangent_cone_sparse(const Vector& x, const Vector& v, int s) {
  check_support_bound(static_cast<int>(x.size()), s);
  if (x.size() != v.size()) {
    throw Error("tangent projection requires matching sizes");
  }
  Vector w = v;
  const std::vector<int> supp_x = support(x);
  std::vector<int> outside;
  for (int i = 0; i < w.size(); ++i) {
    const bool in_x = std::find(supp_x.begin(), supp_x.end(), i) != supp_x.end();
    if (!in_x && w(i) != 0.0) outside.push_back(i);
  }
  const int budget = s - static_cast<int>(supp_x.size());
  if (static_cast<int>(outside.size()) > budget) {
    const std::vector<int> order = magnitude_order(w, outside);
    const int to_zero = static_cast<int>(outside.size()) - std::max(budget, 0);
    for (int i = 0; i < to_zero; ++i) w(order[i]) = 0.0;
  }
  return w;
}

Vector project_tangent_cone_nonneg_sparse(const Vector& x, const Vector& v, int s) {
  check_support_bound(static_cast<int>(x.size()), s);
  if (x.size() != v.size()) {
    throw Error("tangent projection requires matching sizes");
  }
  Vector w = v;
  const std::vector<int> supp_x = support(x);
  for (int i = 0; i < w.size(); ++i) {
    const bool in_x = std::find(supp_x.begin(), supp_x.end(), i) != supp_x.end();
    if (!in_x && w(i) < 0.0) w(i) = 0.0;
  }
  return project_tangent_cone_sparse(x, w, s);
}

Vector restricted_tangent_cone_project_sparse(const Vector& x, const Vector& v, int s) {
  return project_tangent_cone_sparse(x, v, s);
}

double sparse_restricted_mu(int n) {
  if (n < 1) {
    throw DimensionTooSmall("vector dimension must be positive");
  }
  return 1.0 / std::sqrt(static_cast<double>(n));
}

SparseSet::SparseSet(int n, int s) : n_(n), s_(s) { check_support_bound(n, s); }

Vector SparseSet::as_vector(const Matrix& x) const {
  if (x.rows() != n_ || x.cols() != 1) {
    throw Error("sparse set expects an n x 1 column");
  }
  return x.col(0);
}

int SparseSet::stratum_index(const Matrix& x) const {
  return static_cast<int>(support(as_vector(x)).size());
}

Matrix SparseSet::project_to_set(const Matrix& z) const {
  return project_sparse(as_vector(z), s_);
}

Matrix SparseSet::project_to_stratum(const Matrix& x, int j) const {
  if (j < 0 || j > s_) {
    throw ParamOutOfRange("stratum index outside [0, s]");
  }
  return keep_largest(as_vector(x), j);
}

double SparseSet::distance_to_stratum(const Matrix& x, int j) const {
  return (as_vector(x) - project_to_stratum(x, j).col(0)).norm();
}

Matrix SparseSet::project_to_tangent_cone(const Matrix& x, const Matrix& z) const {
  return project_tangent_cone_sparse(as_vector(x), as_vector(z), s_);
}

Matrix SparseSet::project_to_restricted_cone(const Matrix& x, const Matrix& z) const {
  return restricted_tangent_cone_project_sparse(as_vector(x), as_vector(z), s_);
}

double SparseSet::restricted_cone_mu() const { return sparse_restricted_mu(n_); }

NonnegSparseSet::NonnegSparseSet(int n, int s) : n_(n), s_(s) { check_support_bound(n, s); }

Vector NonnegSparseSet::as_vector(const Matrix& x) const {
  if (x.rows() != n_ || x.cols() != 1) {
    throw Error("sparse set expects an n x 1 column");
  }
  return x.col(0);
}

int NonnegSparseSet::stratum_index(const Matrix& x) const {
  return static_cast<int>(support(as_vector(x)).size());
}

Matrix NonnegSparseSet::project_to_set(const Matrix& z) const {
  return project_nonneg_sparse(as_vector(z), s_);
}

Matrix NonnegSparseSet::project_to_stratum(const Matrix& x, int j) const {
  if (j < 0 || j > s_) {
    throw ParamOutOfRange("stratum index outside [0, s]");
  }
  return keep_largest(as_vector(x), j);
}

double NonnegSparseSet::distance_to_stratum(const Matrix& x, int j) const {
  return (as_vector(x) - project_to_stratum(x, j).col(0)).norm();
}

Matrix NonnegSparseSet::project_to_tangent_cone(const Matrix& x, const Matrix& z) const {
  return project_tangent_cone_nonneg_sparse(as_vector(x), as_vector(z), s_);
}

}  // namespace strataopt
