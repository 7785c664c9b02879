#include "strataopt/core.hpp"

#include <cmath>

namespace strataopt {

void SolverParams::validate() const {
  if (!(alpha_lo > 0.0) || !std::isfinite(alpha_lo)) {
    throw ParamOutOfRange("alpha_lo must be positive and finite");
  }
  if (!(alpha_hi >= alpha_lo) || !std::isfinite(alpha_hi)) {
    throw ParamOutOfRange("alpha_hi must satisfy alpha_lo <= alpha_hi < inf");
  }
  if (!(beta > 0.0 && beta < 1.0)) {
    throw ParamOutOfRange("beta must lie in (0,1)");
  }
  if (!(c > 0.0 && c < 1.0)) {
    throw ParamOutOfRange("c must lie in (0,1)");
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw ParamOutOfRange("delta must be positive and finite");
  }
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw ParamOutOfRange("eps must be nonnegative and finite");
  }
  if (max_iters < 0) {
    throw ParamOutOfRange("max_iters must be nonnegative");
  }
}

bool all_finite(const Matrix& x) { return x.allFinite(); }

double CostFunction::value(const Matrix& x) const {
  if (ops_) ops_->cost_evals += 1;
  return value_impl(x);
}

Matrix CostFunction::gradient(const Matrix& x) const {
  if (ops_) ops_->grad_evals += 1;
  return gradient_impl(x);
}

Matrix CostFunction::hessian_action(const Matrix& x, const Matrix& u) const {
  return hessian_action_impl(x, u);
}

Matrix CostFunction::hessian_action_impl(const Matrix&, const Matrix&) const {
  throw NoHessian("cost function provides no Hessian action");
}

Matrix SetAdapter::project_to_restricted_cone(const Matrix&, const Matrix&) const {
  throw NoRestrictedCone("set registers no restricted tangent cone");
}

double SetAdapter::restricted_cone_mu() const {
  throw NoRestrictedCone("set registers no restricted tangent cone");
}

int SetAdapter::delta_rank(const Matrix&, double) const {
  throw Error("set registers no delta-rank");
}

double SetAdapter::distance_to_set(const Matrix& z) const {
  return (z - project_to_set(z)).norm();
}

bool SetAdapter::is_feasible(const Matrix& x) const {
  return distance_to_set(x) <= feasibility_tolerance(x);
}

StationarityReport stationarity_measure(const SetAdapter& set, const CostFunction& cost,
                                        const Matrix& x) {
  if (!set.is_feasible(x)) {
    throw InfeasiblePoint("stationarity measure requested at an infeasible point");
  }
  StationarityReport report;
  report.gradient = cost.gradient(x);
  if (!all_finite(report.gradient)) {
    throw NonFiniteGradient("gradient has a non-finite entry");
  }
  const Matrix neg_grad = -report.gradient;
  report.tangent_projection = set.project_to_tangent_cone(x, neg_grad);
  report.measure = report.tangent_projection.norm();
  report.residual_distance = (neg_grad - report.tangent_projection).norm();
  return report;
}

std::optional<int> stopping_index(const std::vector<IterationTrace>& traces, double eps) {
  for (const auto& t : traces) {
    if (t.stat_measure <= eps) return t.iter;
  }
  return std::nullopt;
}

}  // namespace strataopt
