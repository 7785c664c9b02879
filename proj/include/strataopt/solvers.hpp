#pragma once

#include "strataopt/core.hpp"

namespace strataopt {

inline constexpr int kMaxBacktracks = 200;

enum class StepMapKind { P2gd, P2gdrGeneric, P2gdrVariant };

struct LineSearchOutcome {
  Matrix accepted_point;
  double accepted_f = 0.0;
  double accepted_alpha = 0.0;  // equals initial_alpha * beta^backtracks
  int backtracks = 0;
  double direction_norm = 0.0;
};

struct MapOutcome {
  Matrix point;
  double f_value = 0.0;
  double accepted_alpha = 0.0;
  int backtracks = 0;
  int branch_stratum = -1;  // stratum the winning candidate was reduced to; -1 if none
};

// Projected gradient step with backtracking: g is the tangent cone projection
// of -grad f(x); candidates are projections of x + alpha * g onto the set and
// alpha shrinks by beta until f(y) <= f(x) - c * alpha * s(x)^2.
// Throws ZeroMeasure when s(x) = 0 and BacktrackOverflow after 200 shrinks.
LineSearchOutcome p2gd_map(const SetAdapter& set, const CostFunction& cost, const Matrix& x,
                           const SolverParams& params, double initial_alpha,
                           const StationarityReport* report = nullptr,
                           std::optional<double> f_at_x = std::nullopt);

// Reduction step: also applies p2gd_map to the projections of x onto every
// stratum within distance delta and returns the candidate of least cost.
// Equal costs resolve to the lowest stratum.
MapOutcome p2gdr_map_generic(const SetAdapter& set, const CostFunction& cost, const Matrix& x,
                             const SolverParams& params,
                             const StationarityReport* report = nullptr,
                             std::optional<double> f_at_x = std::nullopt);

// Spectral variant: candidates are the truncations of x to every rank between
// delta_rank(x, delta) and rank(x). Equal costs resolve to no reduction.
MapOutcome p2gdr_map_rank_variant(const SetAdapter& set, const CostFunction& cost,
                                  const Matrix& x, const SolverParams& params,
                                  const StationarityReport* report = nullptr,
                                  std::optional<double> f_at_x = std::nullopt);

// Free descent step along the restricted tangent cone: no projection of the
// trial point is needed because x + alpha * g stays feasible. Backtracks until
// f(x + alpha g) <= f(x) - c * alpha * |g|^2.
LineSearchOutcome rfd_map(const SetAdapter& set, const CostFunction& cost, const Matrix& x,
                          const SolverParams& params,
                          const StationarityReport* report = nullptr,
                          std::optional<double> f_at_x = std::nullopt);

// rfd_map plus, when x sits in the top stratum within delta of the stratum
// below, a second rfd_map from the projection onto that stratum.
MapOutcome rfdr_map(const SetAdapter& set, const CostFunction& cost, const Matrix& x,
                    const SolverParams& params,
                    const StationarityReport* report = nullptr,
                    std::optional<double> f_at_x = std::nullopt);

struct RunResult {
  std::vector<IterationTrace> traces;
  std::vector<Matrix> iterates;
  double final_f = 0.0;
  double final_measure = 0.0;
  std::optional<int> stop_index;  // first iterate with measure <= eps
};

// Iterate the selected step map until the measure drops to eps or max_iters
// steps were taken. One trace row per visited iterate; the last row carries
// no step data.
RunResult p2gdr_drive(const SetAdapter& set, const CostFunction& cost, const Matrix& x0,
                      const SolverParams& params, StepMapKind kind);

RunResult rfdr_drive(const SetAdapter& set, const CostFunction& cost, const Matrix& x0,
                     const SolverParams& params, bool with_reduction);

// Classic projected gradient descent with a monotone sufficient-decrease rule:
// y in P_C(x - gamma * grad f(x)), gamma halved by 1/beta from alpha_hi until
// f(y) <= f(x) - (c / (2 gamma)) * |y - x|^2, reset every iteration.
RunResult pgd_drive(const SetAdapter& set, const CostFunction& cost, const Matrix& x0,
                    const SolverParams& params);

}  // namespace strataopt
