#pragma once

#include <cstdint>

#include "strataopt/core.hpp"
#include "strataopt/set_determinantal.hpp"
#include "strataopt/set_sparse.hpp"

namespace strataopt {

// Exhaustive projection onto the (nonnegative) sparse set by scoring every
// support of size at most s. Throws TooLarge beyond n = 12.
SparseProjection brute_force_sparse_projection(const Vector& y, int s, bool nonneg);

// Central differences, entry by entry.
Matrix finite_difference_gradient(const CostFunction& cost, const Matrix& x, double h = 1e-5);

// Hessian of g(L, R) = f(L R^T) by central differences of the analytic
// lifted gradient, symmetrized, in the row-major (L, then R) basis.
Matrix finite_difference_lifted_hessian(const CostFunction& cost, const Matrix& l,
                                        const Matrix& r, double h = 1e-5);

// Closed-form iterate sequences for the instances that admit one.
enum class ReplayKind {
  Lkb22P2gd,     // diag(1 + (-3/5)^i, (3/5)^i, 0) from diag(2, 1, 0), alpha 8/5
  TwoByTwoP2gd,  // diag((1 - alpha)^i x0, 0)
  TwoByTwoP2gdr, // same until the reduction step, then diag(0, 1 - (1-alpha)^q)
  SparseApoc,    // x_kj(i, 0) of the stall family
};

struct ReplayOptions {
  int iters = 20;
  double x0 = 1.0;      // initial (0,0) entry of the 2x2 sequences
  double alpha = 0.3;   // accepted step of the 2x2 sequences, in (0, 1)
  double delta = 0.05;  // reduction threshold; valid only when delta < alpha
  int n = 4;            // sparse stall dimension
  int s = 2;            // sparse stall support bound
};

struct ReferenceSequence {
  std::vector<Matrix> points;    // iterates 0 .. iters
  std::vector<double> measures;  // stationarity measure at each iterate
  int reduction_iter = -1;       // row whose step reduces the stratum; -1 if none
};

ReferenceSequence replay_closed_form(ReplayKind kind, const ReplayOptions& opts);

// Samples d(x + z, C) / |z|^2 over random tangent cone directions z with
// norms {0.01, 0.1, 1, 10} * d(x, S_{i-1}) and evaluates the structured
// witness numerically. The sampled maximum stays below bound_upper and the
// witness ratio reaches bound_lower.
struct CurvatureProbe {
  int samples = 0;
  double ratio_max = 0.0;      // largest sampled ratio
  double witness_ratio = 0.0;  // distance-based ratio of the supplied witness
  double bound_lower = 0.0;    // (sqrt(5) - 1) / ((r + 1) * 2 * sigma_min)
  double bound_upper = 0.0;    // 1 / (2 * sigma_min)
  double u_tilde = 0.0;        // 1 / d(x, S_{i-1})
};

CurvatureProbe probe_curvature(const SetAdapter& set, const Matrix& x, const Matrix& witness_z,
                               int samples_per_scale, std::uint64_t seed);

}  // namespace strataopt
