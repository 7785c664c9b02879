#include "strataopt/verification.hpp"

#include <bit>
#include <cmath>
#include <random>

#include "strataopt/problems.hpp"

namespace strataopt {

SparseProjection brute_force_sparse_projection(const Vector& y, int s, bool nonneg) {
  const int n = static_cast<int>(y.size());
  if (n > 12) {
    throw TooLarge("support enumeration is limited to 12 entries");
  }
  if (s < 0 || s > n) {
    throw ParamOutOfRange("support bound outside [0, n]");
  }
  SparseProjection best;
  bool have = false;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) > s) continue;
    Vector point = Vector::Zero(n);
    double dist_sq = 0.0;
    double dropped = 0.0;
    for (int i = 0; i < n; ++i) {
      const double yi = y(i);
      if ((mask & (1u << i)) != 0 && (!nonneg || yi > 0.0)) {
        point(i) = yi;
      } else {
        dist_sq += yi * yi;
        dropped += std::abs(yi);
      }
    }
    if (!have || dist_sq < best.distance * best.distance) {
      best.point = std::move(point);
      best.distance = std::sqrt(dist_sq);
      best.dropped_abs_sum = dropped;
      have = true;
    }
  }
  return best;
}

Matrix finite_difference_gradient(const CostFunction& cost, const Matrix& x, double h) {
  Matrix g = Matrix::Zero(x.rows(), x.cols());
  Matrix xp = x;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      xp(i, j) = x(i, j) + h;
      const double fp = cost.value(xp);
      xp(i, j) = x(i, j) - h;
      const double fm = cost.value(xp);
      xp(i, j) = x(i, j);
      g(i, j) = (fp - fm) / (2.0 * h);
    }
  }
  return g;
}

namespace {

Vector pack_lifted(const Matrix& bl, const Matrix& br) {
  const Eigen::Index m = bl.rows(), n = br.rows(), k = bl.cols();
  Vector out(m * k + n * k);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index a = 0; a < k; ++a) out(i * k + a) = bl(i, a);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index a = 0; a < k; ++a) out(m * k + j * k + a) = br(j, a);
  return out;
}

}  // namespace

Matrix finite_difference_lifted_hessian(const CostFunction& cost, const Matrix& l,
                                        const Matrix& r, double h) {
  const Eigen::Index m = l.rows(), n = r.rows(), k = l.cols();
  const Eigen::Index dim = m * k + n * k;
  Matrix hess(dim, dim);
  Matrix lp = l, rp = r;
  for (Eigen::Index t = 0; t < dim; ++t) {
    double* slot = t < m * k ? &lp(t / k, t % k) : &rp((t - m * k) / k, (t - m * k) % k);
    const double base = *slot;
    *slot = base + h;
    const auto [blp, brp] = lifted_gradient(cost, lp, rp);
    *slot = base - h;
    const auto [blm, brm] = lifted_gradient(cost, lp, rp);
    *slot = base;
    hess.col(t) = (pack_lifted(blp, brp) - pack_lifted(blm, brm)) / (2.0 * h);
  }
  return 0.5 * (hess + hess.transpose());
}

namespace {

Matrix diag3(double a, double b, double c) {
  Matrix x = Matrix::Zero(3, 3);
  x(0, 0) = a;
  x(1, 1) = b;
  x(2, 2) = c;
  return x;
}

Matrix diag2(double a, double b) {
  Matrix x = Matrix::Zero(2, 2);
  x(0, 0) = a;
  x(1, 1) = b;
  return x;
}

}  // namespace

ReferenceSequence replay_closed_form(ReplayKind kind, const ReplayOptions& opts) {
  if (opts.iters < 0) {
    throw ParamOutOfRange("replay length must be nonnegative");
  }
  ReferenceSequence seq;
  switch (kind) {
    case ReplayKind::Lkb22P2gd: {
      for (int i = 0; i <= opts.iters; ++i) {
        const double t = std::pow(0.6, i);
        const double sgn = i % 2 == 0 ? 1.0 : -1.0;
        seq.points.push_back(diag3(1.0 + sgn * t, t, 0.0));
        seq.measures.push_back(t * std::sqrt(17.0) / 4.0);
      }
      break;
    }
    case ReplayKind::TwoByTwoP2gd: {
      if (!(opts.alpha > 0.0 && opts.alpha < 1.0) || !(opts.x0 > 0.0)) {
        throw ParamOutOfRange("2x2 replay needs alpha in (0,1) and x0 > 0");
      }
      for (int i = 0; i <= opts.iters; ++i) {
        const double t = std::pow(1.0 - opts.alpha, i) * opts.x0;
        seq.points.push_back(diag2(t, 0.0));
        seq.measures.push_back(t);
      }
      break;
    }
    case ReplayKind::TwoByTwoP2gdr: {
      if (!(opts.alpha > 0.0 && opts.alpha < 1.0) || !(opts.x0 > 0.0) ||
          !(opts.delta > 0.0 && opts.delta < opts.alpha)) {
        throw ParamOutOfRange("2x2 replay needs alpha in (0,1), x0 > 0, delta in (0,alpha)");
      }
      const int reduce_at = std::max(
          static_cast<int>(std::ceil(std::log(opts.delta / opts.x0) / std::log(1.0 - opts.alpha))),
          0);
      seq.reduction_iter = reduce_at;
      for (int i = 0; i <= opts.iters; ++i) {
        if (i <= reduce_at) {
          const double t = std::pow(1.0 - opts.alpha, i) * opts.x0;
          seq.points.push_back(diag2(t, 0.0));
          seq.measures.push_back(t);
        } else {
          const double t = std::pow(1.0 - opts.alpha, i - reduce_at);
          seq.points.push_back(diag2(0.0, 1.0 - t));
          seq.measures.push_back(t);
        }
      }
      break;
    }
    case ReplayKind::SparseApoc: {
      const SparseApocInstance inst = sparse_apocalypse_instance(opts.n, opts.s);
      for (int k = 0; k <= opts.iters; ++k) {
        seq.points.push_back(inst.x_kj(k, 0));
        seq.measures.push_back(inst.measure(k));
      }
      break;
    }
  }
  return seq;
}

CurvatureProbe probe_curvature(const SetAdapter& set, const Matrix& x, const Matrix& witness_z,
                               int samples_per_scale, std::uint64_t seed) {
  const int i = set.stratum_index(x);
  if (i < 1) {
    throw RankOutOfRange("curvature probe needs a point on a positive stratum");
  }
  const double sigma = set.distance_to_stratum(x, i - 1);
  if (!(sigma > 0.0)) {
    throw RankOutOfRange("distance to the previous stratum vanished");
  }
  const int r = set.num_strata();
  CurvatureProbe probe;
  probe.u_tilde = 1.0 / sigma;
  probe.bound_upper = 1.0 / (2.0 * sigma);
  probe.bound_lower = (std::sqrt(5.0) - 1.0) / ((r + 1) * 2.0 * sigma);
  probe.witness_ratio = set.distance_to_set(x + witness_z) / witness_z.squaredNorm();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double scales[] = {0.01, 0.1, 1.0, 10.0};
  for (const double scale : scales) {
    const double target = scale * sigma;
    for (int k = 0; k < samples_per_scale; ++k) {
      Matrix z;
      double znorm = 0.0;
      for (int tries = 0; tries < 100 && !(znorm > 1e-200); ++tries) {
        Matrix raw(x.rows(), x.cols());
        for (Eigen::Index col = 0; col < raw.cols(); ++col)
          for (Eigen::Index row = 0; row < raw.rows(); ++row) raw(row, col) = gauss(rng);
        z = set.project_to_tangent_cone(x, raw);
        znorm = z.norm();
      }
      if (!(znorm > 1e-200)) {
        throw Error("tangent cone projection kept vanishing during sampling");
      }
      z *= target / znorm;
      const double ratio = set.distance_to_set(x + z) / (target * target);
      probe.ratio_max = std::max(probe.ratio_max, ratio);
      ++probe.samples;
    }
  }
  return probe;
}

}  // namespace strataopt
