#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "strataopt/bench.hpp"
#include "strataopt/set_determinantal.hpp"
#include "strataopt/set_psd.hpp"
#include "strataopt/set_sparse.hpp"

namespace py = pybind11;
using namespace strataopt;

namespace {

py::dict stationarity(const std::string& problem, const Matrix& x, std::uint64_t seed) {
  const BenchProblem bp = make_bench_problem(problem, seed);
  const StationarityReport rep = stationarity_measure(*bp.set, *bp.cost, x);
  py::dict out;
  out["measure"] = rep.measure;
  out["residual"] = rep.residual_distance;
  out["gradient"] = rep.gradient;
  out["tangent_projection"] = rep.tangent_projection;
  return out;
}

py::dict run_named_solver(const std::string& problem, const std::string& solver,
                          std::optional<double> alpha_lo, std::optional<double> alpha_hi,
                          std::optional<double> beta, std::optional<double> c,
                          std::optional<double> delta, std::optional<double> eps,
                          std::optional<int> max_iters, std::optional<std::uint64_t> seed) {
  const SolverKind kind = parse_solver(solver);
  check_solver_supported(problem, kind);
  SolverParams p = default_params(problem, kind);
  if (alpha_lo) p.alpha_lo = *alpha_lo;
  if (alpha_hi) p.alpha_hi = *alpha_hi;
  if (beta) p.beta = *beta;
  if (c) p.c = *c;
  if (delta) p.delta = *delta;
  if (eps) p.eps = *eps;
  if (max_iters) p.max_iters = *max_iters;
  p.validate();
  const BenchProblem bp = make_bench_problem(problem, seed.value_or(0));
  const RunResult run = run_solver_on(bp, kind, p);

  std::vector<int> iters, strata, branches, backtracks;
  std::vector<double> f, measure, step;
  for (const IterationTrace& t : run.traces) {
    iters.push_back(t.iter);
    f.push_back(t.f_value);
    measure.push_back(t.stat_measure);
    step.push_back(t.step_size);
    strata.push_back(t.stratum_index);
    branches.push_back(t.branch_stratum);
    backtracks.push_back(t.backtracks);
  }
  py::dict out;
  out["iter"] = iters;
  out["f"] = f;
  out["stat_measure"] = measure;
  out["step_size"] = step;
  out["stratum"] = strata;
  out["branch"] = branches;
  out["backtracks"] = backtracks;
  out["final_f"] = run.final_f;
  out["final_measure"] = run.final_measure;
  out["final_x"] = run.iterates.empty() ? Matrix() : run.iterates.back();
  if (run.stop_index.has_value()) {
    out["stop_index"] = *run.stop_index;
  } else {
    out["stop_index"] = py::none();
  }
  return out;
}

std::vector<std::string> solver_names_list() {
  return {"p2gd", "p2gdr", "p2gdr_variant", "rfd", "rfdr", "pgd"};
}

}  // namespace

PYBIND11_MODULE(_strataopt, m) {
  m.doc() = "First-order descent on stratified sets of matrices";

  py::register_exception<ConfigError>(m, "ConfigError");

  m.def("project_to_bounded_rank", &truncate_rank, py::arg("z"), py::arg("r"),
        "Best approximation of z with rank at most r");
  m.def("project_to_psd_bounded_rank", &project_to_psd_bounded_rank, py::arg("z"), py::arg("r"),
        "Nearest positive semidefinite matrix of rank at most r");
  m.def("project_sparse", &project_sparse, py::arg("y"), py::arg("s"),
        "Nearest vector with at most s nonzero entries");
  m.def("project_nonneg_sparse", &project_nonneg_sparse, py::arg("y"), py::arg("s"),
        "Nearest nonnegative vector with at most s nonzero entries");

  m.def("tangent_project_bounded_rank", &project_to_tangent_cone_variety, py::arg("x"),
        py::arg("z"), py::arg("r"), "Tangent cone projection on the rank-<=r variety at x");
  m.def("tangent_project_psd", &project_to_tangent_cone_psd, py::arg("x"), py::arg("z"),
        py::arg("r"), "Tangent cone projection on the PSD rank-<=r set at x");
  m.def(
      "tangent_project_sparse",
      [](const Vector& x, const Vector& v, int s) { return project_tangent_cone_sparse(x, v, s); },
      py::arg("x"), py::arg("v"), py::arg("s"),
      "Tangent cone projection on the s-sparse set at x");
  m.def(
      "tangent_project_nonneg_sparse",
      [](const Vector& x, const Vector& v, int s) {
        return project_tangent_cone_nonneg_sparse(x, v, s);
      },
      py::arg("x"), py::arg("v"), py::arg("s"),
      "Tangent cone projection on the nonnegative s-sparse set at x");

  m.def("delta_rank", &delta_rank_variety, py::arg("x"), py::arg("delta"),
        "Number of singular values strictly above delta");
  m.def("psd_delta_rank", &psd_delta_rank, py::arg("x"), py::arg("delta"),
        "Number of eigenvalues strictly above delta");

  m.def("problems", [] { return problem_names(); }, "Names accepted by run_solver");
  m.def("solvers", &solver_names_list, "Names accepted by run_solver");
  m.def("stationarity", &stationarity, py::arg("problem"), py::arg("x"), py::arg("seed") = 0,
        "Stationarity measure of x on the named problem");
  m.def("run_solver", &run_named_solver, py::arg("problem"), py::arg("solver"),
        py::arg("alpha_lo") = py::none(), py::arg("alpha_hi") = py::none(),
        py::arg("beta") = py::none(), py::arg("c") = py::none(), py::arg("delta") = py::none(),
        py::arg("eps") = py::none(), py::arg("max_iters") = py::none(),
        py::arg("seed") = py::none(),
        "Run a named solver on a named problem and return its trace");
}
