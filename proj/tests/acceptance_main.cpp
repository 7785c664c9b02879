// Acceptance suite: one line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "strataopt/bench.hpp"
#include "strataopt/problems.hpp"
#include "strataopt/set_psd.hpp"
#include "strataopt/set_sparse.hpp"
#include "strataopt/solvers.hpp"
#include "strataopt/verification.hpp"

using namespace strataopt;
namespace fs = std::filesystem;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what) {
  if (!cond) throw Failure(what);
}

Matrix diag3(double a, double b, double c) {
  Matrix x = Matrix::Zero(3, 3);
  x(0, 0) = a;
  x(1, 1) = b;
  x(2, 2) = c;
  return x;
}

SolverParams base_params(double alpha, double c, double delta, double eps, int iters) {
  SolverParams p;
  p.alpha_lo = alpha;
  p.alpha_hi = alpha;
  p.beta = 0.5;
  p.c = c;
  p.delta = delta;
  p.eps = eps;
  p.max_iters = iters;
  return p;
}

Matrix random_gaussian(int m, int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Matrix z(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = gauss(rng);
  return z;
}

Matrix random_orthonormal(int m, int k, std::mt19937_64& rng) {
  const Matrix g = random_gaussian(m, m, rng);
  return Matrix(Eigen::HouseholderQR<Matrix>(g).householderQ()).leftCols(k);
}

// Rank-k point with singular values drawn from [lo, hi].
Matrix random_spectrum_point(int m, int n, int k, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(lo, hi);
  Vector sig(k);
  for (int i = 0; i < k; ++i) sig(i) = unif(rng);
  std::sort(sig.data(), sig.data() + k, std::greater<double>());
  return random_orthonormal(m, k, rng) * sig.asDiagonal() *
         random_orthonormal(n, k, rng).transpose();
}

Matrix random_psd_spectrum_point(int n, int k, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(lo, hi);
  Vector lam(k);
  for (int i = 0; i < k; ++i) lam(i) = unif(rng);
  const Matrix u = random_orthonormal(n, k, rng);
  return u * lam.asDiagonal() * u.transpose();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  require(in.good(), "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_closed_form_stall() {
  DeterminantalSet set(3, 3, 2);
  const Lkb22Instance inst = lkb22_instance();
  ReplayOptions opts;
  opts.iters = 30;
  const ReferenceSequence ref = replay_closed_form(ReplayKind::Lkb22P2gd, opts);
  const RunResult run = p2gdr_drive(set, *inst.cost, inst.x0,
                                    base_params(1.6, 0.2, 0.1, 0.0, 30), StepMapKind::P2gd);
  require(run.iterates.size() == 31, "expected 31 recorded iterates");
  for (int i = 0; i <= 30; ++i) {
    require((run.iterates[i] - ref.points[i]).norm() < 1e-10, "iterate drifted off closed form");
    require(std::abs(run.traces[i].stat_measure - ref.measures[i]) < 1e-10,
            "measure drifted off closed form");
  }
  // The limit point keeps a unit stationarity measure: no apocalypse-free
  // certificate exists for the plain method here.
  const StationarityReport rep = stationarity_measure(set, *inst.cost, diag3(1.0, 0.0, 0.0));
  require(std::abs(rep.measure - 1.0) < 1e-10, "limit point measure is not 1");
}

void criterion_variant_escapes() {
  const BenchProblem bp = make_bench_problem("lkb22", 0);
  SolverParams params = default_params("lkb22", SolverKind::P2gdrVariant);
  params.max_iters = 500;
  const RunResult run = run_solver_on(bp, SolverKind::P2gdrVariant, params);
  require(std::abs(run.final_f - bp.f_star) <= 1e-9, "final value missed the optimum");
  int branches = 0;
  for (const IterationTrace& t : run.traces) {
    if (t.branch_stratum >= 0) {
      ++branches;
      require(t.iter == 5, "reduction happened at an unexpected iteration");
      require(t.branch_stratum == 1, "reduction targeted an unexpected stratum");
    }
  }
  require(branches == 1, "expected exactly one reduction");
}

void criterion_two_by_two_grid() {
  DeterminantalSet set(2, 2, 1);
  const TwoByTwoInstance two = two_by_two_instance();
  const int expected_reduction[2][2][2] = {{{9, 5}, {4, 2}}, {{11, 7}, {5, 3}}};
  const double x0s[2] = {1.0, 2.0};
  const double alphas[2] = {0.3, 0.6};
  const double deltas[2] = {0.05, 0.2};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        ReplayOptions opts;
        opts.x0 = x0s[a];
        opts.alpha = alphas[b];
        opts.delta = deltas[c];
        Matrix start = Matrix::Zero(2, 2);
        start(0, 0) = opts.x0;

        opts.iters = 15;
        const ReferenceSequence plain = replay_closed_form(ReplayKind::TwoByTwoP2gd, opts);
        const RunResult run_plain =
            p2gdr_drive(set, *two.cost, start,
                        base_params(opts.alpha, 0.2, opts.delta, 0.0, 15), StepMapKind::P2gd);
        for (int i = 0; i <= 15; ++i) {
          require((run_plain.iterates[i] - plain.points[i]).norm() < 1e-12,
                  "plain 2x2 iterate off closed form");
        }

        opts.iters = 20;
        const ReferenceSequence red = replay_closed_form(ReplayKind::TwoByTwoP2gdr, opts);
        require(red.reduction_iter == expected_reduction[a][b][c],
                "replay reduction index disagrees with the pinned value");
        for (const StepMapKind kind :
             {StepMapKind::P2gdrGeneric, StepMapKind::P2gdrVariant}) {
          const RunResult run_red = p2gdr_drive(
              set, *two.cost, start, base_params(opts.alpha, 0.2, opts.delta, 0.0, 20), kind);
          for (int i = 0; i <= 20; ++i) {
            require((run_red.iterates[i] - red.points[i]).norm() < 1e-12,
                    "reduced 2x2 iterate off closed form");
            require(std::abs(run_red.traces[i].stat_measure - red.measures[i]) < 1e-12,
                    "reduced 2x2 measure off closed form");
          }
          for (const IterationTrace& t : run_red.traces) {
            if (t.branch_stratum >= 0) {
              require(t.iter == red.reduction_iter, "reduction at an unexpected iteration");
              require(t.branch_stratum == 0, "reduction targeted an unexpected stratum");
            }
          }
        }
      }
    }
  }
}

void criterion_sparse_family() {
  const SparseApocInstance inst = sparse_apocalypse_instance(4, 2);
  SparseSet set(4, 2);
  const RunResult stalled = p2gdr_drive(set, *inst.cost, inst.x0,
                                        base_params(1.0, 0.2, 1.0, 0.0, 20), StepMapKind::P2gd);
  require(stalled.traces.size() == 21, "expected 21 recorded iterates");
  for (int k = 0; k <= 20; ++k) {
    require(std::abs(stalled.traces[k].stat_measure - inst.measure(k)) < 1e-12,
            "stall family measure mismatch");
    require((stalled.iterates[k] - Matrix(inst.x_kj(k, 0))).norm() < 1e-12,
            "stall family iterate mismatch");
  }
  const RunResult escaped =
      rfdr_drive(set, *inst.cost, inst.x0, base_params(1.0, 0.2, 1.0, 1e-8, 1000), true);
  bool branched_early = false;
  for (const IterationTrace& t : escaped.traces) {
    if (t.branch_stratum >= 0 && t.iter <= 5) branched_early = true;
  }
  require(branched_early, "reduction never fired on the stall family");
  require(escaped.final_f <= 1e-12, "reduced run missed the optimum");
}

void criterion_projection_oracles() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int trial = 0; trial < 100000; ++trial) {
    Vector y(8);
    for (int i = 0; i < 8; ++i) y(i) = unif(rng);
    const int s = 3;
    const bool nonneg = (trial % 2) == 1;
    const SparseProjection fast =
        nonneg ? project_nonneg_sparse_detailed(y, s) : project_sparse_detailed(y, s);
    const SparseProjection slow = brute_force_sparse_projection(y, s, nonneg);
    require((fast.point - slow.point).norm() < 1e-12, "sparse projection point mismatch");
    require(std::abs(fast.distance - slow.distance) < 1e-12, "sparse distance mismatch");
    require(std::abs(fast.dropped_abs_sum - slow.dropped_abs_sum) < 1e-12,
            "sparse drop report mismatch");
  }
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = 3 + trial % 3;
    const int n = 3 + (trial / 3) % 3;
    const Matrix z = random_gaussian(m, n, rng);
    const Matrix gram =
        m <= n ? Matrix(z * z.transpose()) : Matrix(z.transpose() * z);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    const int q = static_cast<int>(gram.rows());
    const int r = 1 + trial % q;
    double tail = 0.0;
    for (int i = 0; i + r < q; ++i) tail += std::max(eig.eigenvalues()(i), 0.0);
    const double want = std::sqrt(tail);
    require(std::abs((z - truncate_rank(z, r)).norm() - want) < 1e-10,
            "rank truncation misses the spectral tail");
    const int rp = 1 + trial % m;
    const Matrix zs = random_gaussian(m, m, rng);
    const Matrix p = project_to_psd_bounded_rank(zs, rp);
    const double d2 = (zs - p).squaredNorm();
    require(std::abs(d2 - (zs.squaredNorm() - p.squaredNorm())) <
                1e-10 * std::max(1.0, zs.squaredNorm()),
            "PSD distance identity violated");
  }
}

void criterion_tangent_share() {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 1000; ++trial) {
    const Matrix x = random_spectrum_point(3, 3, 1, 0.5, 2.0, rng);
    const Matrix z = random_gaussian(3, 3, rng);
    const Matrix p = project_to_tangent_cone_variety(x, z, 2);
    require(p.norm() >= z.norm() / std::sqrt(2.0) - 1e-10,
            "tangent projection lost too much norm");
    const Matrix again = project_to_tangent_cone_variety(x, p, 2);
    require((again - p).norm() < 1e-10 * std::max(1.0, p.norm()),
            "tangent projection is not idempotent");
  }
}

void criterion_curvature_brackets() {
  std::mt19937_64 rng(107);
  std::uniform_int_distribution<int> msize(3, 6);
  int probes = 0;
  while (probes < 50) {
    const int m = msize(rng);
    const int n = msize(rng);
    const int rmax = std::min(m, n) - 1;
    if (rmax < 1) continue;
    std::uniform_int_distribution<int> rpick(1, rmax);
    const int r = rpick(rng);
    std::uniform_int_distribution<int> kpick(1, r);
    const int k = kpick(rng);
    const Matrix x = random_spectrum_point(m, n, k, 0.5, 2.0, rng);
    DeterminantalSet set(m, n, r);
    const CurvatureWitness w = curvature_witness(x, r);
    const CurvatureProbe probe = probe_curvature(set, x, w.z, 10, 1000 + probes);
    require(probe.ratio_max <= probe.bound_upper + 1e-9, "sampled ratio above the bracket");
    require(probe.witness_ratio >= probe.bound_lower - 1e-9, "witness below the bracket");
    ++probes;
  }
  probes = 0;
  while (probes < 50) {
    const int n = msize(rng);
    const int rmax = n - 1;
    std::uniform_int_distribution<int> rpick(1, rmax);
    const int r = rpick(rng);
    std::uniform_int_distribution<int> kpick(1, r);
    const int k = kpick(rng);
    const Matrix x = random_psd_spectrum_point(n, k, 0.5, 2.0, rng);
    PsdSet set(n, r);
    const CurvatureWitness w = psd_curvature_witness(x, r);
    const CurvatureProbe probe = probe_curvature(set, x, w.z, 10, 2000 + probes);
    require(probe.ratio_max <= probe.bound_upper + 1e-9,
            "sampled PSD ratio above the bracket");
    require(probe.witness_ratio >= probe.bound_lower - 1e-9, "PSD witness below the bracket");
    ++probes;
  }
}

void criterion_descent_certificates() {
  DeterminantalSet set(3, 3, 2);
  const Lkb22Instance inst = lkb22_instance();
  const SolverParams lkb = base_params(1.6, 0.2, 0.1, 3e-9, 10000);
  const RunResult plain = p2gdr_drive(set, *inst.cost, inst.x0, lkb, StepMapKind::P2gd);
  const SparseApocInstance sparse = sparse_apocalypse_instance(4, 2);
  SparseSet sset(4, 2);
  const RunResult free_run =
      rfdr_drive(sset, *sparse.cost, sparse.x0, base_params(1.0, 0.2, 1.0, 1e-8, 1000), false);
  for (const RunResult* run : {&plain, &free_run}) {
    for (std::size_t i = 0; i + 1 < run->traces.size(); ++i) {
      const IterationTrace& t = run->traces[i];
      const double next_f = run->traces[i + 1].f_value;
      require(next_f < t.f_value, "accepted step failed to decrease the cost");
      if (t.branch_stratum < 0) {
        require(next_f <=
                    t.f_value - 0.2 * t.step_size * t.stat_measure * t.stat_measure + 1e-12,
                "accepted step missed its sufficient-decrease certificate");
      }
    }
  }
  // The spectral reduction candidates nest inside the generic ones, so the
  // variant can never end an iteration above the generic map.
  std::mt19937_64 rng(109);
  const SolverParams map_params = base_params(1.6, 0.2, 0.3, 0.0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 1 + trial % 2;
    Matrix x = random_spectrum_point(3, 3, k, 0.05, 1.5, rng);
    const MapOutcome variant = p2gdr_map_rank_variant(set, *inst.cost, x, map_params);
    const MapOutcome generic = p2gdr_map_generic(set, *inst.cost, x, map_params);
    require(variant.f_value <= generic.f_value + 1e-12,
            "spectral variant ended above the generic reduction");
  }
}

void criterion_derivative_checks() {
  std::mt19937_64 rng(113);
  const Lkb22Instance lkb = lkb22_instance();
  const TwoByTwoInstance two = two_by_two_instance();
  const SparseApocInstance sp = sparse_apocalypse_instance(4, 2);
  const BenchProblem rand_bp = make_bench_problem("random_lowrank_lsq", 11);
  const std::vector<std::pair<const CostFunction*, Matrix>> cases = {
      {lkb.cost.get(), random_gaussian(3, 3, rng)},
      {two.cost.get(), random_gaussian(2, 2, rng)},
      {sp.cost.get(), random_gaussian(4, 1, rng)},
      {rand_bp.cost.get(), random_gaussian(8, 8, rng)},
  };
  for (const auto& [cost, x] : cases) {
    const Matrix fd = finite_difference_gradient(*cost, x);
    const Matrix an = cost->gradient(x);
    require((fd - an).norm() < 1e-6 * std::max(1.0, an.norm()),
            "gradient does not match finite differences");
  }
  const Matrix l = random_gaussian(3, 2, rng);
  const Matrix r = random_gaussian(3, 2, rng);
  const Matrix h = lifted_hessian_matrix(*lkb.cost, l, r);
  const Matrix fd = finite_difference_lifted_hessian(*lkb.cost, l, r);
  require((h - fd).norm() < 1e-4 * std::max(1.0, h.norm()),
          "factored Hessian does not match finite differences");
}

void criterion_byte_stable_artifacts() {
  ExperimentConfig config;
  config.problem = "lkb22";
  config.solver = SolverKind::P2gdrVariant;
  config.params = default_params(config.problem, config.solver);
  const fs::path base = fs::temp_directory_path();
  config.out_dir = base / "strataopt_accept_a";
  fs::remove_all(config.out_dir);
  const ExperimentResult first = run_experiment(config);
  config.out_dir = base / "strataopt_accept_b";
  fs::remove_all(config.out_dir);
  const ExperimentResult second = run_experiment(config);
  require(slurp(first.trace_csv) == slurp(second.trace_csv), "trace.csv differs across reruns");
  require(slurp(first.summary_csv) == slurp(second.summary_csv),
          "summary.csv differs across reruns");
  require(slurp(first.chart_svg) == slurp(second.chart_svg), "chart.svg differs across reruns");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void()>>> criteria = {
      {"plain descent follows the closed form into a non-stationary limit",
       criterion_closed_form_stall},
      {"rank-reducing variant escapes and reaches the optimal value",
       criterion_variant_escapes},
      {"two-by-two grid reduces exactly at the predicted iterations",
       criterion_two_by_two_grid},
      {"sparse family stalls under plain steps and escapes with reduction",
       criterion_sparse_family},
      {"fast projections match exhaustive and spectral oracles", criterion_projection_oracles},
      {"tangent projections keep the guaranteed norm share", criterion_tangent_share},
      {"sampled curvature ratios stay inside the proved brackets",
       criterion_curvature_brackets},
      {"accepted steps certify their decrease and the variant never loses",
       criterion_descent_certificates},
      {"analytic derivatives match finite differences", criterion_derivative_checks},
      {"experiment artifacts are byte-identical across reruns",
       criterion_byte_stable_artifacts},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::string verdict = "PASS";
    std::string detail;
    try {
      criteria[i].second();
    } catch (const std::exception& e) {
      verdict = "FAIL";
      detail = e.what();
      ++failures;
    }
    std::printf("criterion %zu %s: %s%s%s\n", i + 1, criteria[i].first.c_str(), verdict.c_str(),
                detail.empty() ? "" : " | ", detail.c_str());
  }
  return failures == 0 ? 0 : 1;
}
