#include "strataopt/solvers.hpp"

#include <cmath>

namespace strataopt {

namespace {

double value_at(const CostFunction& cost, const Matrix& x, std::optional<double> cached) {
  return cached.has_value() ? *cached : cost.value(x);
}

// Candidate produced by one reduction branch of a composite map.
struct Candidate {
  Matrix point;
  double f_value = 0.0;
  double alpha = 0.0;
  int backtracks = 0;
};

// Descend from xhat if it is non-stationary, otherwise keep it as is.
Candidate descend_or_keep(const SetAdapter& set, const CostFunction& cost, const Matrix& xhat,
                          const SolverParams& params, const StationarityReport* report,
                          std::optional<double> f_at_xhat) {
  StationarityReport local;
  if (report == nullptr) {
    local = stationarity_measure(set, cost, xhat);
    report = &local;
  }
  Candidate cand;
  if (report->measure > 0.0) {
    const LineSearchOutcome ls =
        p2gd_map(set, cost, xhat, params, params.alpha_hi, report, f_at_xhat);
    cand.point = ls.accepted_point;
    cand.f_value = ls.accepted_f;
    cand.alpha = ls.accepted_alpha;
    cand.backtracks = ls.backtracks;
  } else {
    cand.point = xhat;
    cand.f_value = value_at(cost, xhat, f_at_xhat);
  }
  return cand;
}

}  // namespace

LineSearchOutcome p2gd_map(const SetAdapter& set, const CostFunction& cost, const Matrix& x,
                           const SolverParams& params, double initial_alpha,
                           const StationarityReport* report, std::optional<double> f_at_x) {
  params.validate();
  StationarityReport local;
  if (report == nullptr) {
    local = stationarity_measure(set, cost, x);
    report = &local;
  }
  if (!(report->measure > 0.0)) {
    throw ZeroMeasure("projected gradient step needs a nonzero measure");
  }
  const Matrix& g = report->tangent_projection;
  const double fx = value_at(cost, x, f_at_x);
  const double decrease = params.c * report->measure * report->measure;

  LineSearchOutcome out;
  out.direction_norm = report->measure;
  double alpha = initial_alpha;
  Matrix y = set.project_to_set(x + alpha * g);
  double fy = cost.value(y);
  int backtracks = 0;
  while (fy > fx - alpha * decrease) {
    if (backtracks >= kMaxBacktracks) {
      throw BacktrackOverflow("projected line search exceeded 200 backtracks");
    }
    ++backtracks;
    alpha *= params.beta;
    y = set.project_to_set(x + alpha * g);
    fy = cost.value(y);
  }
  out.accepted_point = std::move(y);
  out.accepted_f = fy;
  out.accepted_alpha = alpha;
  out.backtracks = backtracks;
  return out;
}

MapOutcome p2gdr_map_generic(const SetAdapter& set, const CostFunction& cost, const Matrix& x,
                             const SolverParams& params, const StationarityReport* report,
                             std::optional<double> f_at_x) {
  params.validate();
  const int i = set.stratum_index(x);
  int i_star = i;
  for (int j = 0; j <= i; ++j) {
    if (set.distance_to_stratum(x, j) <= params.delta) {
      i_star = j;
      break;
    }
  }
  MapOutcome best;
  bool have = false;
  // Ascending stratum order with strict improvement makes ties resolve to the
  // lowest stratum.
  for (int j = i_star; j <= i; ++j) {
    Candidate cand;
    if (j == i) {
      cand = descend_or_keep(set, cost, x, params, report, f_at_x);
    } else {
      const Matrix xhat = set.project_to_stratum(x, j);
      cand = descend_or_keep(set, cost, xhat, params, nullptr, std::nullopt);
    }
    if (!have || cand.f_value < best.f_value) {
      best.point = std::move(cand.point);
      best.f_value = cand.f_value;
      best.accepted_alpha = cand.alpha;
      best.backtracks = cand.backtracks;
      best.branch_stratum = j == i ? -1 : j;
      have = true;
    }
  }
  return best;
}

MapOutcome p2gdr_map_rank_variant(const SetAdapter& set, const CostFunction& cost,
                                  const Matrix& x, const SolverParams& params,
                                  const StationarityReport* report,
                                  std::optional<double> f_at_x) {
  params.validate();
  if (!set.has_delta_rank()) {
    throw Error("rank variant needs a set with delta-rank support");
  }
  const int k = set.stratum_index(x);
  const int t = set.delta_rank(x, params.delta);
  MapOutcome best;
  bool have = false;
  // j = 0 first with strict improvement makes ties resolve to no reduction.
  for (int j = 0; j <= k - t; ++j) {
    const int target = k - j;
    Candidate cand;
    if (j == 0) {
      cand = descend_or_keep(set, cost, x, params, report, f_at_x);
    } else {
      const Matrix xhat = set.project_to_stratum(x, target);
      cand = descend_or_keep(set, cost, xhat, params, nullptr, std::nullopt);
    }
    if (!have || cand.f_value < best.f_value) {
      best.point = std::move(cand.point);
      best.f_value = cand.f_value;
      best.accepted_alpha = cand.alpha;
      best.backtracks = cand.backtracks;
      best.branch_stratum = j == 0 ? -1 : target;
      have = true;
    }
  }
  return best;
}

LineSearchOutcome rfd_map(const SetAdapter& set, const CostFunction& cost, const Matrix& x,
                          const SolverParams& params, const StationarityReport* report,
                          std::optional<double> f_at_x) {
  params.validate();
  if (!set.has_restricted_cone()) {
    throw NoRestrictedCone("free descent needs a restricted tangent cone");
  }
  Matrix grad;
  if (report != nullptr) {
    grad = report->gradient;
  } else {
    grad = cost.gradient(x);
    if (!all_finite(grad)) {
      throw NonFiniteGradient("gradient has a non-finite entry");
    }
  }
  const Matrix g = set.project_to_restricted_cone(x, -grad);
  const double gnorm = g.norm();
  if (!(gnorm > 0.0)) {
    throw ZeroMeasure("restricted descent direction vanished");
  }
  const double fx = value_at(cost, x, f_at_x);
  const double decrease = params.c * gnorm * gnorm;

  LineSearchOutcome out;
  out.direction_norm = gnorm;
  double alpha = params.alpha_hi;
  Matrix y = x + alpha * g;
  double fy = cost.value(y);
  int backtracks = 0;
  while (fy > fx - alpha * decrease) {
    if (backtracks >= kMaxBacktracks) {
      throw BacktrackOverflow("free line search exceeded 200 backtracks");
    }
    ++backtracks;
    alpha *= params.beta;
    y = x + alpha * g;
    fy = cost.value(y);
  }
  out.accepted_point = std::move(y);
  out.accepted_f = fy;
  out.accepted_alpha = alpha;
  out.backtracks = backtracks;
  return out;
}

MapOutcome rfdr_map(const SetAdapter& set, const CostFunction& cost, const Matrix& x,
                    const SolverParams& params, const StationarityReport* report,
                    std::optional<double> f_at_x) {
  params.validate();
  const int p = set.num_strata();
  const LineSearchOutcome plain = rfd_map(set, cost, x, params, report, f_at_x);
  MapOutcome out;
  out.point = plain.accepted_point;
  out.f_value = plain.accepted_f;
  out.accepted_alpha = plain.accepted_alpha;
  out.backtracks = plain.backtracks;
  out.branch_stratum = -1;
  if (set.stratum_index(x) == p) {
    const double d = set.distance_to_stratum(x, p - 1);
    if (d > 0.0 && d <= params.delta) {
      const Matrix xhat = set.project_to_stratum(x, p - 1);
      const StationarityReport rep = stationarity_measure(set, cost, xhat);
      Matrix cand_point;
      double cand_f;
      double cand_alpha = 0.0;
      int cand_bt = 0;
      if (rep.measure > 0.0) {
        const LineSearchOutcome lower = rfd_map(set, cost, xhat, params, &rep, std::nullopt);
        cand_point = lower.accepted_point;
        cand_f = lower.accepted_f;
        cand_alpha = lower.accepted_alpha;
        cand_bt = lower.backtracks;
      } else {
        cand_point = xhat;
        cand_f = cost.value(xhat);
      }
      // The lower-stratum candidate wins ties.
      if (cand_f <= out.f_value) {
        out.point = std::move(cand_point);
        out.f_value = cand_f;
        out.accepted_alpha = cand_alpha;
        out.backtracks = cand_bt;
        out.branch_stratum = p - 1;
      }
    }
  }
  return out;
}

namespace {

struct CounterScope {
  CounterScope(const SetAdapter& set, const CostFunction& cost, OpCounters* ops)
      : set_(set), cost_(cost) {
    set_.attach_counters(ops);
    cost_.attach_counters(ops);
  }
  ~CounterScope() {
    set_.attach_counters(nullptr);
    cost_.attach_counters(nullptr);
  }
  const SetAdapter& set_;
  const CostFunction& cost_;
};

void assign_deltas(IterationTrace& row, const OpCounters& now, const OpCounters& before) {
  row.cost_evals = now.cost_evals - before.cost_evals;
  row.grad_evals = now.grad_evals - before.grad_evals;
  row.svd_calls = now.svd_calls - before.svd_calls;
}

void finalize(RunResult& out, double eps) {
  if (!out.traces.empty()) {
    out.final_f = out.traces.back().f_value;
    out.final_measure = out.traces.back().stat_measure;
  }
  out.stop_index = stopping_index(out.traces, eps);
}

}  // namespace

RunResult p2gdr_drive(const SetAdapter& set, const CostFunction& cost, const Matrix& x0,
                      const SolverParams& params, StepMapKind kind) {
  params.validate();
  if (!set.is_feasible(x0)) {
    throw InfeasiblePoint("initial point lies outside the set");
  }
  RunResult out;
  OpCounters ops;
  CounterScope scope(set, cost, &ops);
  Matrix x = x0;
  for (int i = 0;; ++i) {
    const OpCounters before = ops;
    const StationarityReport rep = stationarity_measure(set, cost, x);
    const double fx = cost.value(x);
    IterationTrace row;
    row.iter = i;
    row.f_value = fx;
    row.stat_measure = rep.measure;
    row.stratum_index = set.stratum_index(x);
    out.iterates.push_back(x);
    if (rep.measure <= params.eps || i >= params.max_iters) {
      assign_deltas(row, ops, before);
      out.traces.push_back(row);
      break;
    }
    MapOutcome mo;
    switch (kind) {
      case StepMapKind::P2gd: {
        const LineSearchOutcome ls = p2gd_map(set, cost, x, params, params.alpha_hi, &rep, fx);
        mo.point = ls.accepted_point;
        mo.f_value = ls.accepted_f;
        mo.accepted_alpha = ls.accepted_alpha;
        mo.backtracks = ls.backtracks;
        mo.branch_stratum = -1;
        break;
      }
      case StepMapKind::P2gdrGeneric:
        mo = p2gdr_map_generic(set, cost, x, params, &rep, fx);
        break;
      case StepMapKind::P2gdrVariant:
        mo = p2gdr_map_rank_variant(set, cost, x, params, &rep, fx);
        break;
    }
    if (!(mo.f_value < fx)) {
      // Decrease fell below roundoff; keep the terminal row step-free.
      assign_deltas(row, ops, before);
      out.traces.push_back(row);
      break;
    }
    row.step_size = mo.accepted_alpha;
    row.branch_stratum = mo.branch_stratum;
    row.backtracks = mo.backtracks;
    assign_deltas(row, ops, before);
    out.traces.push_back(row);
    x = std::move(mo.point);
  }
  finalize(out, params.eps);
  return out;
}

RunResult rfdr_drive(const SetAdapter& set, const CostFunction& cost, const Matrix& x0,
                     const SolverParams& params, bool with_reduction) {
  params.validate();
  if (!set.is_feasible(x0)) {
    throw InfeasiblePoint("initial point lies outside the set");
  }
  if (!set.has_restricted_cone()) {
    throw NoRestrictedCone("free descent needs a restricted tangent cone");
  }
  RunResult out;
  OpCounters ops;
  CounterScope scope(set, cost, &ops);
  Matrix x = x0;
  for (int i = 0;; ++i) {
    const OpCounters before = ops;
    const StationarityReport rep = stationarity_measure(set, cost, x);
    const double fx = cost.value(x);
    IterationTrace row;
    row.iter = i;
    row.f_value = fx;
    row.stat_measure = rep.measure;
    row.stratum_index = set.stratum_index(x);
    out.iterates.push_back(x);
    if (rep.measure <= params.eps || i >= params.max_iters) {
      assign_deltas(row, ops, before);
      out.traces.push_back(row);
      break;
    }
    MapOutcome mo;
    if (with_reduction) {
      mo = rfdr_map(set, cost, x, params, &rep, fx);
    } else {
      const LineSearchOutcome ls = rfd_map(set, cost, x, params, &rep, fx);
      mo.point = ls.accepted_point;
      mo.f_value = ls.accepted_f;
      mo.accepted_alpha = ls.accepted_alpha;
      mo.backtracks = ls.backtracks;
      mo.branch_stratum = -1;
    }
    if (!(mo.f_value < fx)) {
      assign_deltas(row, ops, before);
      out.traces.push_back(row);
      break;
    }
    row.step_size = mo.accepted_alpha;
    row.branch_stratum = mo.branch_stratum;
    row.backtracks = mo.backtracks;
    assign_deltas(row, ops, before);
    out.traces.push_back(row);
    x = std::move(mo.point);
  }
  finalize(out, params.eps);
  return out;
}

RunResult pgd_drive(const SetAdapter& set, const CostFunction& cost, const Matrix& x0,
                    const SolverParams& params) {
  params.validate();
  if (!set.is_feasible(x0)) {
    throw InfeasiblePoint("initial point lies outside the set");
  }
  RunResult out;
  OpCounters ops;
  CounterScope scope(set, cost, &ops);
  const double tau = 1.0 / params.beta;
  Matrix x = x0;
  for (int i = 0;; ++i) {
    const OpCounters before = ops;
    const StationarityReport rep = stationarity_measure(set, cost, x);
    const double fx = cost.value(x);
    IterationTrace row;
    row.iter = i;
    row.f_value = fx;
    row.stat_measure = rep.measure;
    row.stratum_index = set.stratum_index(x);
    out.iterates.push_back(x);
    if (rep.measure <= params.eps || i >= params.max_iters) {
      assign_deltas(row, ops, before);
      out.traces.push_back(row);
      break;
    }
    double gamma = params.alpha_hi;
    Matrix y = set.project_to_set(x - gamma * rep.gradient);
    double fy = cost.value(y);
    int backtracks = 0;
    while (fy > fx - (params.c / (2.0 * gamma)) * (y - x).squaredNorm()) {
      if (backtracks >= kMaxBacktracks) {
        throw BacktrackOverflow("projected gradient search exceeded 200 backtracks");
      }
      ++backtracks;
      gamma /= tau;
      y = set.project_to_set(x - gamma * rep.gradient);
      fy = cost.value(y);
    }
    if (!(fy < fx)) {
      assign_deltas(row, ops, before);
      out.traces.push_back(row);
      break;
    }
    row.step_size = gamma;
    row.backtracks = backtracks;
    assign_deltas(row, ops, before);
    out.traces.push_back(row);
    x = std::move(y);
  }
  finalize(out, params.eps);
  return out;
}

}  // namespace strataopt
