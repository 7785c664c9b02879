#include "strataopt/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "strataopt/problems.hpp"
#include "strataopt/set_determinantal.hpp"
#include "strataopt/set_sparse.hpp"

namespace strataopt {

namespace fs = std::filesystem;

std::string solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::P2gd: return "p2gd";
    case SolverKind::P2gdrGeneric: return "p2gdr";
    case SolverKind::P2gdrVariant: return "p2gdr_variant";
    case SolverKind::Rfd: return "rfd";
    case SolverKind::Rfdr: return "rfdr";
    case SolverKind::Pgd: return "pgd";
  }
  throw Error("unreachable solver kind");
}

SolverKind parse_solver(const std::string& name) {
  if (name == "p2gd") return SolverKind::P2gd;
  if (name == "p2gdr") return SolverKind::P2gdrGeneric;
  if (name == "p2gdr_variant") return SolverKind::P2gdrVariant;
  if (name == "rfd") return SolverKind::Rfd;
  if (name == "rfdr") return SolverKind::Rfdr;
  if (name == "pgd") return SolverKind::Pgd;
  throw ConfigError("unknown solver: " + name +
                    " (expected p2gd, p2gdr, p2gdr_variant, rfd, rfdr or pgd)");
}

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names = {"lkb22", "two_by_two", "sparse_apoc",
                                                 "random_lowrank_lsq"};
  return names;
}

void check_solver_supported(const std::string& problem, SolverKind solver) {
  const auto& names = problem_names();
  if (std::find(names.begin(), names.end(), problem) == names.end()) {
    throw ConfigError("unknown problem: " + problem);
  }
  const bool sparse = problem == "sparse_apoc";
  if ((solver == SolverKind::Rfd || solver == SolverKind::Rfdr) && !sparse) {
    throw ConfigError(solver_name(solver) + " needs a restricted tangent cone; only "
                      "sparse_apoc provides one");
  }
  if (solver == SolverKind::P2gdrVariant && sparse) {
    throw ConfigError("p2gdr_variant needs spectral delta-ranks; sparse_apoc has none");
  }
}

SolverParams default_params(const std::string& problem, SolverKind solver) {
  SolverParams p;
  if (problem == "lkb22") {
    const double step = solver == SolverKind::Pgd ? 0.625 : 1.6;
    p.alpha_lo = step;
    p.alpha_hi = step;
    p.beta = 0.5;
    p.c = 0.2;
    p.delta = 0.1;
    p.eps = 3e-9;
    p.max_iters = 10000;
  } else if (problem == "two_by_two") {
    p.alpha_lo = 0.6;
    p.alpha_hi = 0.6;
    p.beta = 0.5;
    p.c = 0.2;
    p.delta = 0.2;
    p.eps = 1e-8;
    p.max_iters = 1000;
  } else if (problem == "sparse_apoc") {
    p.alpha_lo = 1.0;
    p.alpha_hi = 1.0;
    p.beta = 0.5;
    p.c = 0.2;
    p.delta = 1.0;
    p.eps = 1e-8;
    p.max_iters = 1000;
  } else if (problem == "random_lowrank_lsq") {
    p.alpha_lo = 1.0;
    p.alpha_hi = 1.0;
    p.beta = 0.5;
    p.c = 0.1;
    p.delta = 0.05;
    p.eps = 1e-8;
    p.max_iters = 2000;
  } else {
    throw ConfigError("unknown problem: " + problem);
  }
  return p;
}

BenchProblem make_bench_problem(const std::string& problem, std::uint64_t seed) {
  BenchProblem bp;
  bp.name = problem;
  if (problem == "lkb22") {
    const Lkb22Instance inst = lkb22_instance();
    bp.set = std::make_shared<DeterminantalSet>(3, 3, 2);
    bp.cost = inst.cost;
    bp.x0 = inst.x0;
    bp.f_star = inst.f_star;
    const double root = inst.root;
    // Minimizers fix the top-left block and the (2,2) entry; staying on the
    // variety additionally needs X(1,2) * X(2,1) = 0.
    bp.dist_to_opt = [root](const Matrix& x) {
      const double d2 = (x(0, 0) - 1.0) * (x(0, 0) - 1.0) + x(0, 1) * x(0, 1) +
                        x(1, 0) * x(1, 0) + x(1, 1) * x(1, 1) +
                        (x(2, 2) - root) * (x(2, 2) - root) +
                        std::min(x(1, 2) * x(1, 2), x(2, 1) * x(2, 1));
      return std::sqrt(d2);
    };
  } else if (problem == "two_by_two") {
    const TwoByTwoInstance inst = two_by_two_instance();
    bp.set = std::make_shared<DeterminantalSet>(2, 2, 1);
    bp.cost = inst.cost;
    bp.x0 = Matrix::Zero(2, 2);
    bp.x0(0, 0) = 1.0;
    bp.f_star = 0.0;
    const Matrix minimizer = inst.minimizer;
    bp.dist_to_opt = [minimizer](const Matrix& x) { return (x - minimizer).norm(); };
  } else if (problem == "sparse_apoc") {
    const SparseApocInstance inst = sparse_apocalypse_instance(4, 2);
    bp.set = std::make_shared<SparseSet>(inst.n, inst.s);
    bp.cost = inst.cost;
    bp.x0 = inst.x0;
    bp.f_star = 0.0;
    const Vector target = inst.x_star;
    bp.dist_to_opt = [target](const Matrix& x) { return (x.col(0) - target).norm(); };
  } else if (problem == "random_lowrank_lsq") {
    const int n = 8, r = 2;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix l(n, r), rt(n, r);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < r; ++j) l(i, j) = gauss(rng);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < r; ++j) rt(i, j) = gauss(rng);
    std::bernoulli_distribution half(0.5);
    Matrix mask(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) mask(i, j) = half(rng) ? 1.0 : 0.0;
    const Matrix truth = l * rt.transpose();
    bp.set = std::make_shared<DeterminantalSet>(n, n, r);
    bp.cost = std::make_shared<MaskedLsqCost>(mask, mask.cwiseProduct(truth));
    bp.x0 = Matrix::Zero(n, n);
    bp.f_star = 0.0;
  } else {
    throw ConfigError("unknown problem: " + problem);
  }
  return bp;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

RunResult run_solver_on(const BenchProblem& bp, SolverKind solver, const SolverParams& params) {
  switch (solver) {
    case SolverKind::P2gd:
      return p2gdr_drive(*bp.set, *bp.cost, bp.x0, params, StepMapKind::P2gd);
    case SolverKind::P2gdrGeneric:
      return p2gdr_drive(*bp.set, *bp.cost, bp.x0, params, StepMapKind::P2gdrGeneric);
    case SolverKind::P2gdrVariant:
      return p2gdr_drive(*bp.set, *bp.cost, bp.x0, params, StepMapKind::P2gdrVariant);
    case SolverKind::Rfd:
      return rfdr_drive(*bp.set, *bp.cost, bp.x0, params, false);
    case SolverKind::Rfdr:
      return rfdr_drive(*bp.set, *bp.cost, bp.x0, params, true);
    case SolverKind::Pgd:
      return pgd_drive(*bp.set, *bp.cost, bp.x0, params);
  }
  throw Error("unreachable solver kind");
}

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  return out;
}

double dist_at(const BenchProblem& bp, const RunResult& run, std::size_t i) {
  if (!bp.dist_to_opt || i >= run.iterates.size()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return bp.dist_to_opt(run.iterates[i]);
}

void write_trace_csv(const fs::path& path, const RunResult& run, const BenchProblem& bp) {
  std::ofstream out = open_output(path);
  out << "iter,f,stat_measure,dist_to_opt,step_size,rank,branch,backtracks,"
         "cost_evals,grad_evals,svd_calls\n";
  for (std::size_t i = 0; i < run.traces.size(); ++i) {
    const IterationTrace& t = run.traces[i];
    out << t.iter << ',' << format_double(t.f_value) << ',' << format_double(t.stat_measure)
        << ',' << format_double(dist_at(bp, run, i)) << ',' << format_double(t.step_size) << ','
        << t.stratum_index << ',' << t.branch_stratum << ',' << t.backtracks << ','
        << t.cost_evals << ',' << t.grad_evals << ',' << t.svd_calls << '\n';
  }
}

void write_summary_csv(const fs::path& path, const RunResult& run, const BenchProblem& bp,
                       SolverKind solver) {
  std::ofstream out = open_output(path);
  out << "problem,solver,iterations,final_f,final_measure,stopping_index\n";
  out << bp.name << ',' << solver_name(solver) << ','
      << (run.traces.empty() ? 0 : run.traces.back().iter) << ',' << format_double(run.final_f)
      << ',' << format_double(run.final_measure) << ',';
  if (run.stop_index.has_value()) {
    out << *run.stop_index;
  }
  out << '\n';
}

struct ChartSeries {
  std::string label;
  std::string color;
  std::vector<double> values;
};

std::string px(double v) { return format_double(std::round(v * 100.0) / 100.0); }

void write_chart_svg(const fs::path& path, const RunResult& run, const BenchProblem& bp) {
  constexpr double kFloor = 1e-16;
  std::vector<ChartSeries> series;
  series.push_back({"stat_measure", "#1f77b4", {}});
  for (const IterationTrace& t : run.traces) series[0].values.push_back(t.stat_measure);
  if (std::isfinite(bp.f_star)) {
    ChartSeries s{"f_gap", "#d62728", {}};
    for (const IterationTrace& t : run.traces) s.values.push_back(std::abs(t.f_value - bp.f_star));
    series.push_back(std::move(s));
  }
  if (bp.dist_to_opt) {
    ChartSeries s{"dist_to_opt", "#2ca02c", {}};
    for (std::size_t i = 0; i < run.traces.size(); ++i) s.values.push_back(dist_at(bp, run, i));
    series.push_back(std::move(s));
  }
  for (ChartSeries& s : series) {
    for (double& v : s.values) {
      v = std::log10(std::isfinite(v) ? std::max(v, kFloor) : kFloor);
    }
  }

  double lo = 0.0, hi = 1.0;
  bool first = true;
  for (const ChartSeries& s : series) {
    for (double v : s.values) {
      lo = first ? v : std::min(lo, v);
      hi = first ? v : std::max(hi, v);
      first = false;
    }
  }
  lo = std::floor(lo);
  hi = std::ceil(hi);
  if (hi <= lo) hi = lo + 1.0;
  const double xmax = run.traces.empty() ? 1.0 : std::max(1, run.traces.back().iter);

  constexpr double kW = 640, kH = 420, kLeft = 70, kRight = 20, kTop = 20, kBottom = 45;
  const double plot_w = kW - kLeft - kRight, plot_h = kH - kTop - kBottom;
  const auto map_x = [&](double it) { return kLeft + it / xmax * plot_w; };
  const auto map_y = [&](double lv) { return kTop + (1.0 - (lv - lo) / (hi - lo)) * plot_h; };

  std::ofstream out = open_output(path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" "
         "viewBox=\"0 0 640 420\">\n"
      << "<rect x=\"" << px(kLeft) << "\" y=\"" << px(kTop) << "\" width=\"" << px(plot_w)
      << "\" height=\"" << px(plot_h) << "\" fill=\"white\" stroke=\"#444444\"/>\n";

  const int decade_step = std::max(1, static_cast<int>(std::ceil((hi - lo) / 8.0)));
  for (int d = static_cast<int>(lo); d <= static_cast<int>(hi); d += decade_step) {
    const double y = map_y(d);
    out << "<line x1=\"" << px(kLeft - 4) << "\" y1=\"" << px(y) << "\" x2=\"" << px(kLeft)
        << "\" y2=\"" << px(y) << "\" stroke=\"#444444\"/>\n"
        << "<text x=\"" << px(kLeft - 8) << "\" y=\"" << px(y + 4)
        << "\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">1e" << d
        << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double it = std::round(xmax * k / 4.0);
    const double x = map_x(it);
    out << "<line x1=\"" << px(x) << "\" y1=\"" << px(kTop + plot_h) << "\" x2=\"" << px(x)
        << "\" y2=\"" << px(kTop + plot_h + 4) << "\" stroke=\"#444444\"/>\n"
        << "<text x=\"" << px(x) << "\" y=\"" << px(kTop + plot_h + 18)
        << "\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">"
        << static_cast<long long>(it) << "</text>\n";
  }
  out << "<text x=\"" << px(kLeft + plot_w / 2) << "\" y=\"" << px(kH - 10)
      << "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">iteration"
         "</text>\n";

  for (const ChartSeries& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      if (i > 0) out << ' ';
      out << px(map_x(run.traces[i].iter)) << ',' << px(map_y(s.values[i]));
    }
    out << "\"/>\n";
  }

  double legend_y = kTop + 16;
  for (const ChartSeries& s : series) {
    const double lx = kLeft + plot_w - 130;
    out << "<line x1=\"" << px(lx) << "\" y1=\"" << px(legend_y - 4) << "\" x2=\"" << px(lx + 22)
        << "\" y2=\"" << px(legend_y - 4) << "\" stroke=\"" << s.color
        << "\" stroke-width=\"1.5\"/>\n"
        << "<text x=\"" << px(lx + 28) << "\" y=\"" << px(legend_y)
        << "\" font-size=\"11\" font-family=\"sans-serif\">" << s.label << "</text>\n";
    legend_y += 16;
  }
  out << "</svg>\n";
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.params.validate();
  check_solver_supported(config.problem, config.solver);
  const BenchProblem bp = make_bench_problem(config.problem, config.seed);
  ExperimentResult res;
  res.run = run_solver_on(bp, config.solver, config.params);
  fs::create_directories(config.out_dir);
  res.trace_csv = config.out_dir / "trace.csv";
  res.summary_csv = config.out_dir / "summary.csv";
  res.chart_svg = config.out_dir / "chart.svg";
  write_trace_csv(res.trace_csv, res.run, bp);
  write_summary_csv(res.summary_csv, res.run, bp, config.solver);
  write_chart_svg(res.chart_svg, res.run, bp);
  return res;
}

CompareResult compare_experiments(const std::vector<ExperimentConfig>& configs,
                                  const std::filesystem::path& out_dir) {
  if (configs.empty()) {
    throw ConfigError("compare needs at least one solver");
  }
  std::set<std::string> seen;
  for (const ExperimentConfig& cfg : configs) {
    if (cfg.problem != configs.front().problem) {
      throw ConfigError("compare runs share one problem");
    }
    if (!seen.insert(solver_name(cfg.solver)).second) {
      throw ConfigError("duplicate solver in compare: " + solver_name(cfg.solver));
    }
  }
  CompareResult result;
  for (ExperimentConfig cfg : configs) {
    cfg.out_dir = out_dir / solver_name(cfg.solver);
    result.runs.push_back(run_experiment(cfg));
  }
  result.compare_csv = out_dir / "compare.csv";
  std::ofstream out = open_output(result.compare_csv);
  out << "problem,solver,iterations,final_f,final_measure,stopping_index,"
         "cost_evals,grad_evals,svd_calls\n";
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const RunResult& run = result.runs[i].run;
    long long cost = 0, grad = 0, svd = 0;
    for (const IterationTrace& t : run.traces) {
      cost += t.cost_evals;
      grad += t.grad_evals;
      svd += t.svd_calls;
    }
    out << configs[i].problem << ',' << solver_name(configs[i].solver) << ','
        << (run.traces.empty() ? 0 : run.traces.back().iter) << ','
        << format_double(run.final_f) << ',' << format_double(run.final_measure) << ',';
    if (run.stop_index.has_value()) {
      out << *run.stop_index;
    }
    out << ',' << cost << ',' << grad << ',' << svd << '\n';
  }
  return result;
}

std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read config file: " + path.string());
  }
  const auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": empty key");
    }
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

}  // namespace strataopt
