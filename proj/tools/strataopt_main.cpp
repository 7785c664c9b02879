#include <algorithm>
#include <charconv>
#include <cstdint>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "strataopt/bench.hpp"

namespace {

using strataopt::ConfigError;
using strataopt::ExperimentConfig;
using strataopt::SolverKind;

// One subcommand's flags plus the option handles needed to tell explicit
// flags from defaults.
struct Opts {
  std::string problem;
  std::vector<std::string> solvers;
  double alpha_lo = 0, alpha_hi = 0, beta = 0, c = 0, delta = 0, eps = 0;
  int max_iters = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string config_path;

  CLI::Option* o_problem = nullptr;
  CLI::Option* o_alpha_lo = nullptr;
  CLI::Option* o_alpha_hi = nullptr;
  CLI::Option* o_beta = nullptr;
  CLI::Option* o_c = nullptr;
  CLI::Option* o_delta = nullptr;
  CLI::Option* o_eps = nullptr;
  CLI::Option* o_max_iters = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_out = nullptr;
};

void add_options(CLI::App* cmd, Opts& o, bool multi_solver) {
  o.o_problem = cmd->add_option("--problem", o.problem,
                                "Problem name: lkb22, two_by_two, sparse_apoc or "
                                "random_lowrank_lsq");
  if (multi_solver) {
    cmd->add_option("--solver", o.solvers,
                    "Solver names (repeatable); defaults to every compatible solver");
  } else {
    cmd->add_option("--solver", o.solvers, "Solver name");
  }
  o.o_alpha_lo = cmd->add_option("--alpha-lo", o.alpha_lo, "Smallest initial step size");
  o.o_alpha_hi = cmd->add_option("--alpha-hi", o.alpha_hi, "Initial step of each line search");
  o.o_beta = cmd->add_option("--beta", o.beta, "Backtracking shrink factor in (0,1)");
  o.o_c = cmd->add_option("--c", o.c, "Sufficient-decrease constant in (0,1)");
  o.o_delta = cmd->add_option("--delta", o.delta, "Stratum-proximity threshold");
  o.o_eps = cmd->add_option("--eps", o.eps, "Stationarity tolerance; 0 runs to --max-iters");
  o.o_max_iters = cmd->add_option("--max-iters", o.max_iters, "Iteration cap");
  o.o_seed = cmd->add_option("--seed", o.seed, "Seed for randomized problems");
  o.o_out = cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--config", o.config_path, "key=value file applied before explicit flags");
}

double parse_double_value(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("config value for " + key + " is not a number: " + text);
  }
  return v;
}

long long parse_int_value(const std::string& key, const std::string& text) {
  long long v = 0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("config value for " + key + " is not an integer: " + text);
  }
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::string current;
  for (const char ch : text + ",") {
    if (ch == ',') {
      if (!current.empty()) parts.push_back(current);
      current.clear();
    } else if (ch != ' ' && ch != '\t') {
      current += ch;
    }
  }
  return parts;
}

const std::vector<std::string> kParamKeys = {"alpha_lo", "alpha_hi", "beta",      "c",
                                             "delta",    "eps",      "max_iters", "seed"};

void check_config_keys(const std::map<std::string, std::string>& file_cfg) {
  for (const auto& [key, value] : file_cfg) {
    (void)value;
    if (key == "problem" || key == "solver" || key == "out") continue;
    if (std::find(kParamKeys.begin(), kParamKeys.end(), key) != kParamKeys.end()) continue;
    throw ConfigError("unknown config key: " + key);
  }
}

void apply_file_params(strataopt::SolverParams& p, std::uint64_t& seed,
                       const std::map<std::string, std::string>& file_cfg) {
  if (auto it = file_cfg.find("alpha_lo"); it != file_cfg.end())
    p.alpha_lo = parse_double_value(it->first, it->second);
  if (auto it = file_cfg.find("alpha_hi"); it != file_cfg.end())
    p.alpha_hi = parse_double_value(it->first, it->second);
  if (auto it = file_cfg.find("beta"); it != file_cfg.end())
    p.beta = parse_double_value(it->first, it->second);
  if (auto it = file_cfg.find("c"); it != file_cfg.end())
    p.c = parse_double_value(it->first, it->second);
  if (auto it = file_cfg.find("delta"); it != file_cfg.end())
    p.delta = parse_double_value(it->first, it->second);
  if (auto it = file_cfg.find("eps"); it != file_cfg.end())
    p.eps = parse_double_value(it->first, it->second);
  if (auto it = file_cfg.find("max_iters"); it != file_cfg.end())
    p.max_iters = static_cast<int>(parse_int_value(it->first, it->second));
  if (auto it = file_cfg.find("seed"); it != file_cfg.end())
    seed = static_cast<std::uint64_t>(parse_int_value(it->first, it->second));
}

void apply_flag_params(strataopt::SolverParams& p, std::uint64_t& seed, const Opts& o) {
  if (o.o_alpha_lo->count() > 0) p.alpha_lo = o.alpha_lo;
  if (o.o_alpha_hi->count() > 0) p.alpha_hi = o.alpha_hi;
  if (o.o_beta->count() > 0) p.beta = o.beta;
  if (o.o_c->count() > 0) p.c = o.c;
  if (o.o_delta->count() > 0) p.delta = o.delta;
  if (o.o_eps->count() > 0) p.eps = o.eps;
  if (o.o_max_iters->count() > 0) p.max_iters = o.max_iters;
  if (o.o_seed->count() > 0) seed = o.seed;
}

// Precedence for every setting: problem defaults, then config file, then
// explicit flags.
int execute(const Opts& o, bool is_compare) {
  std::map<std::string, std::string> file_cfg;
  if (!o.config_path.empty()) {
    file_cfg = strataopt::parse_config_file(o.config_path);
    check_config_keys(file_cfg);
  }

  std::string problem = "lkb22";
  if (auto it = file_cfg.find("problem"); it != file_cfg.end()) problem = it->second;
  if (o.o_problem->count() > 0) problem = o.problem;

  std::vector<std::string> solver_names = o.solvers;
  if (solver_names.empty()) {
    if (auto it = file_cfg.find("solver"); it != file_cfg.end()) {
      solver_names = split_list(it->second);
    }
  }
  if (solver_names.empty()) {
    if (is_compare) {
      for (const SolverKind kind :
           {SolverKind::P2gd, SolverKind::P2gdrGeneric, SolverKind::P2gdrVariant,
            SolverKind::Rfd, SolverKind::Rfdr, SolverKind::Pgd}) {
        try {
          strataopt::check_solver_supported(problem, kind);
          solver_names.push_back(strataopt::solver_name(kind));
        } catch (const ConfigError&) {
        }
      }
    } else {
      solver_names = {"p2gd"};
    }
  }
  if (!is_compare && solver_names.size() != 1) {
    throw ConfigError("run takes exactly one --solver");
  }

  std::filesystem::path out_dir = "out";
  if (auto it = file_cfg.find("out"); it != file_cfg.end()) out_dir = it->second;
  if (o.o_out->count() > 0) out_dir = o.out;

  std::vector<ExperimentConfig> configs;
  for (const std::string& name : solver_names) {
    ExperimentConfig cfg;
    cfg.problem = problem;
    cfg.solver = strataopt::parse_solver(name);
    strataopt::check_solver_supported(problem, cfg.solver);
    cfg.params = strataopt::default_params(problem, cfg.solver);
    apply_file_params(cfg.params, cfg.seed, file_cfg);
    apply_flag_params(cfg.params, cfg.seed, o);
    cfg.params.validate();
    cfg.out_dir = out_dir;
    configs.push_back(std::move(cfg));
  }

  if (is_compare) {
    const strataopt::CompareResult result = strataopt::compare_experiments(configs, out_dir);
    for (std::size_t i = 0; i < result.runs.size(); ++i) {
      const strataopt::RunResult& run = result.runs[i].run;
      std::cout << configs[i].problem << ' ' << strataopt::solver_name(configs[i].solver)
                << ": iters=" << (run.traces.empty() ? 0 : run.traces.back().iter)
                << " final_f=" << strataopt::format_double(run.final_f)
                << " measure=" << strataopt::format_double(run.final_measure) << '\n';
    }
    std::cout << "wrote " << result.compare_csv.string() << '\n';
  } else {
    const strataopt::ExperimentResult result = strataopt::run_experiment(configs.front());
    const strataopt::RunResult& run = result.run;
    std::cout << configs.front().problem << ' '
              << strataopt::solver_name(configs.front().solver)
              << ": iters=" << (run.traces.empty() ? 0 : run.traces.back().iter)
              << " final_f=" << strataopt::format_double(run.final_f)
              << " measure=" << strataopt::format_double(run.final_measure) << '\n';
    std::cout << "wrote " << result.trace_csv.string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"First-order descent benchmarks on stratified sets of matrices"};
  app.require_subcommand(1);
  Opts run_opts, cmp_opts;
  CLI::App* run_cmd = app.add_subcommand("run", "Run one solver and write trace files");
  CLI::App* cmp_cmd = app.add_subcommand("compare", "Run several solvers on one problem");
  add_options(run_cmd, run_opts, false);
  add_options(cmp_cmd, cmp_opts, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }

  try {
    if (run_cmd->parsed()) {
      return execute(run_opts, false);
    }
    return execute(cmp_opts, true);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const strataopt::ParamOutOfRange& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
