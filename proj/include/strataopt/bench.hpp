#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "strataopt/core.hpp"
#include "strataopt/solvers.hpp"

namespace strataopt {

enum class SolverKind { P2gd, P2gdrGeneric, P2gdrVariant, Rfd, Rfdr, Pgd };

// CLI names: p2gd, p2gdr, p2gdr_variant, rfd, rfdr, pgd.
std::string solver_name(SolverKind kind);
SolverKind parse_solver(const std::string& name);  // throws ConfigError

const std::vector<std::string>& problem_names();

// Throws ConfigError when the solver cannot run on the problem's set:
// rfd and rfdr need a restricted tangent cone, p2gdr_variant needs
// spectral delta-ranks.
void check_solver_supported(const std::string& problem, SolverKind solver);

// Tuned per problem; the step sizes follow the worked instances.
SolverParams default_params(const std::string& problem, SolverKind solver);

struct BenchProblem {
  std::string name;
  std::shared_ptr<SetAdapter> set;
  std::shared_ptr<CostFunction> cost;
  Matrix x0;
  // Optimal value when known, NaN otherwise.
  double f_star = std::numeric_limits<double>::quiet_NaN();
  // Distance to the optimizer set when known, empty otherwise.
  std::function<double(const Matrix&)> dist_to_opt;
};

BenchProblem make_bench_problem(const std::string& problem, std::uint64_t seed);

// Runs the matching driver on an already constructed problem.
RunResult run_solver_on(const BenchProblem& bp, SolverKind solver, const SolverParams& params);

struct ExperimentConfig {
  std::string problem = "lkb22";
  SolverKind solver = SolverKind::P2gd;
  SolverParams params;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
};

struct ExperimentResult {
  RunResult run;
  std::filesystem::path trace_csv;
  std::filesystem::path summary_csv;
  std::filesystem::path chart_svg;
};

// Runs the solver and writes trace.csv, summary.csv and chart.svg into
// config.out_dir. Output bytes depend only on the config.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct CompareResult {
  std::vector<ExperimentResult> runs;
  std::filesystem::path compare_csv;
};

// Runs each config into out_dir/<solver name> and writes a combined
// compare.csv. All configs must share one problem.
CompareResult compare_experiments(const std::vector<ExperimentConfig>& configs,
                                  const std::filesystem::path& out_dir);

// Flat key=value file; '#' starts a comment, blank lines are skipped.
std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path);

// Shortest decimal form that parses back to the same double; NaN prints as
// "nan". Used for every number written to CSV and SVG output.
std::string format_double(double v);

}  // namespace strataopt
