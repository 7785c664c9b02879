#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace strataopt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Base for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfeasiblePoint : Error {
  using Error::Error;
};
struct NonFiniteGradient : Error {
  using Error::Error;
};
struct RankOutOfRange : Error {
  using Error::Error;
};
struct DimensionTooSmall : Error {
  using Error::Error;
};
struct ZeroMeasure : Error {
  using Error::Error;
};
struct BacktrackOverflow : Error {
  using Error::Error;
};
struct NoRestrictedCone : Error {
  using Error::Error;
};
struct NoHessian : Error {
  using Error::Error;
};
struct NonSymmetric : Error {
  using Error::Error;
};
struct TooLarge : Error {
  using Error::Error;
};
struct ParamOutOfRange : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

// Evaluation counters shared by a solver run. Adapters and costs bump them
// through an attached pointer; drivers snapshot them per iteration.
struct OpCounters {
  long long cost_evals = 0;
  long long grad_evals = 0;
  long long svd_calls = 0;
};

struct SolverParams {
  double alpha_lo = 1.0;    // smallest admissible initial step
  double alpha_hi = 1.0;    // initial step of every backtracking line search
  double beta = 0.5;        // step shrink factor, in (0,1)
  double c = 0.2;           // sufficient-decrease constant, in (0,1)
  double delta = 0.1;       // stratum-proximity threshold for reduction maps
  double eps = 1e-8;        // stationarity tolerance; 0 runs to max_iters
  int max_iters = 1000;

  void validate() const;  // throws ParamOutOfRange
};

// Result of projecting the negative gradient onto the tangent cone at x.
// measure == |tangent_projection| and measure^2 + residual_distance^2 ==
// |gradient|^2 hold up to roundoff because tangent cones are closed cones.
struct StationarityReport {
  Matrix gradient;
  Matrix tangent_projection;
  double measure = 0.0;
  double residual_distance = 0.0;
};

struct IterationTrace {
  int iter = 0;
  double f_value = 0.0;
  double stat_measure = 0.0;
  double step_size = 0.0;
  int stratum_index = 0;
  int branch_stratum = -1;  // stratum a reduction branch moved through; -1 if none
  int backtracks = 0;
  long long cost_evals = 0;
  long long grad_evals = 0;
  long long svd_calls = 0;
};

class CostFunction {
 public:
  virtual ~CostFunction() = default;

  double value(const Matrix& x) const;
  Matrix gradient(const Matrix& x) const;
  virtual bool has_hessian() const { return false; }
  // Action of the ambient Hessian at x on direction u.
  Matrix hessian_action(const Matrix& x, const Matrix& u) const;

  void attach_counters(OpCounters* ops) const { ops_ = ops; }

 protected:
  virtual double value_impl(const Matrix& x) const = 0;
  virtual Matrix gradient_impl(const Matrix& x) const = 0;
  virtual Matrix hessian_action_impl(const Matrix& x, const Matrix& u) const;

  mutable OpCounters* ops_ = nullptr;
};

// A stratified closed set C = closure(S_p) with strata S_0, ..., S_p.
// All operations are deterministic; ties resolve to the lowest index.
class SetAdapter {
 public:
  virtual ~SetAdapter() = default;

  virtual int num_strata() const = 0;  // p
  virtual int stratum_index(const Matrix& x) const = 0;
  virtual Matrix project_to_set(const Matrix& z) const = 0;
  virtual Matrix project_to_stratum(const Matrix& x, int j) const = 0;
  virtual double distance_to_stratum(const Matrix& x, int j) const = 0;
  virtual Matrix project_to_tangent_cone(const Matrix& x, const Matrix& z) const = 0;

  virtual bool has_restricted_cone() const { return false; }
  virtual Matrix project_to_restricted_cone(const Matrix& x, const Matrix& z) const;
  virtual double restricted_cone_mu() const;

  // Delta-rank support for the spectral reduction variant.
  virtual bool has_delta_rank() const { return false; }
  virtual int delta_rank(const Matrix& x, double delta) const;

  double distance_to_set(const Matrix& z) const;
  bool is_feasible(const Matrix& x) const;

  void attach_counters(OpCounters* ops) const { ops_ = ops; }

 protected:
  void count_svd(long long n = 1) const {
    if (ops_) ops_->svd_calls += n;
  }
  mutable OpCounters* ops_ = nullptr;
};

// s(x; f, C) = |P_{T_C(x)}(-grad f(x))| together with the pieces it is made of.
// Throws InfeasiblePoint if x is not in C up to 1e-12 * max(1, |x|) and
// NonFiniteGradient if the gradient has a non-finite entry.
StationarityReport stationarity_measure(const SetAdapter& set, const CostFunction& cost,
                                        const Matrix& x);

// First trace index whose measure is <= eps, if any.
std::optional<int> stopping_index(const std::vector<IterationTrace>& traces, double eps);

inline double feasibility_tolerance(const Matrix& x) {
  return 1e-12 * std::max(1.0, x.norm());
}

bool all_finite(const Matrix& x);

}  // namespace strataopt
