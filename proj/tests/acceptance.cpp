// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hyca/assignment.hpp"
#include "hyca/cachesim.hpp"
#include "hyca/clustering.hpp"
#include "hyca/io.hpp"
#include "hyca/pipeline.hpp"
#include "hyca/serialization.hpp"
#include "hyca/solvers.hpp"
#include "oracles.hpp"

using namespace hyca;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  std::function<Outcome()> check;
};

std::string fmt(double v) { return format_double(v); }

struct Benchmark {
  BenchmarkConfig config = standard_benchmark();
  SyntheticSystem system = generate_system(config.system.mixture, config.system.seed);
  std::vector<TrajectoryTensor> trajectories;

  Benchmark() {
    for (int i = 0; i < config.num_x0_seeds; ++i) {
      trajectories.push_back(benchmark_trajectory(config, system, i));
    }
  }
};

const Benchmark& benchmark() {
  static const Benchmark b;
  return b;
}

Outcome speedup_anchor() {
  const Schedule s = schedule_steps(50, 5, 1, Align::Zero);
  const double speedup = speedup_accounting(s, 1.0, 0.0);
  Outcome o;
  o.pass = s.computed_steps() == 10 && std::abs(speedup - 5.0) <= 1e-12;
  o.detail = "computed=" + std::to_string(s.computed_steps()) + " speedup=" + fmt(speedup);
  return o;
}

Outcome solver_exactness() {
  Outcome o;
  double worst_coefficient = 0.0;
  for (int m = 1; m <= 4; ++m) {
    const SolverSpec tf = make_solver(SolverFamily::TF, m);
    if (!exactness_check(tf, m)) {
      o.pass = false;
      o.detail += "TF" + std::to_string(m) + " inexact; ";
    }
    if (exactness_check(tf, m + 1)) {
      o.pass = false;
      o.detail += "TF" + std::to_string(m) + " exact beyond its order; ";
    }
    std::vector<double> nodes;
    for (int j = m; j >= 0; --j) nodes.push_back(-static_cast<double>(j));
    for (const double kappa : {0.5, 1.0, 2.0}) {
      const Eigen::VectorXd w = predictor_weights(tf, kappa);
      const std::vector<double> ref = oracle::vandermonde_weights(nodes, kappa);
      for (std::size_t j = 0; j < ref.size(); ++j) {
        worst_coefficient = std::max(worst_coefficient, std::abs(w[static_cast<Index>(j)] - ref[j]));
      }
    }
  }
  if (worst_coefficient > 1e-9) o.pass = false;
  o.detail += "max |w - w_vandermonde| = " + fmt(worst_coefficient);
  return o;
}

Outcome convergence_order() {
  auto error = [](const SolverSpec& s, double h) {
    std::vector<double> history;
    for (int j = s.history_required(); j >= 1; --j) history.push_back(std::exp(-(1.0 - j * h)));
    return std::abs(predict(s, history, 1.0) - std::exp(-1.0));
  };
  Outcome o;
  for (const auto& [name, target] : std::vector<std::pair<std::string, double>>{{"AB2", 4.0}, {"AB3", 8.0}}) {
    const SolverSpec s = parse_solver(name);
    const double r1 = error(s, 0.2) / error(s, 0.1);
    const double r2 = error(s, 0.1) / error(s, 0.05);
    for (const double r : {r1, r2}) {
      if (!(r >= target / 2.0 && r <= target * 2.0)) o.pass = false;
    }
    o.detail += name + " ratios " + fmt(r1) + ", " + fmt(r2) + "; ";
  }
  return o;
}

Outcome ari_oracle() {
  std::mt19937_64 rng(2024);
  Outcome o;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> a(40);
    for (auto& v : a) v = static_cast<int>(rng() % 5);
    if (adjusted_rand_index(a, a) != 1.0) o.pass = false;

    std::vector<int> perm(5);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> b(40);
    for (auto& v : b) v = static_cast<int>(rng() % 4);
    std::vector<int> relabelled(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) relabelled[i] = perm[static_cast<std::size_t>(a[i])];
    worst = std::max(worst, std::abs(adjusted_rand_index(a, b) - adjusted_rand_index(relabelled, b)));
    worst = std::max(worst, std::abs(adjusted_rand_index(a, b) - oracle::pair_counting_ari(a, b)));
  }
  const double reference = adjusted_rand_index(std::vector<int>{0, 0, 1, 1}, std::vector<int>{0, 1, 0, 1});
  if (std::abs(reference + 0.5) > 1e-12 || worst > 1e-12) o.pass = false;
  o.detail = "ARI([0,0,1,1],[0,1,0,1]) = " + fmt(reference) + ", max relabel/oracle gap " + fmt(worst);
  return o;
}

Outcome stability() {
  const Benchmark& b = benchmark();
  std::vector<std::vector<int>> partitions;
  for (const auto& t : b.trajectories) {
    const auto d = build_descriptor_matrix(t, b.config.pipeline.window);
    partitions.push_back(kmeans(d.rows, b.config.pipeline.clusters, b.config.pipeline.seed).labels);
  }
  int above = 0;
  int total = 0;
  double lowest = 1.0;
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    for (std::size_t j = i + 1; j < partitions.size(); ++j) {
      const double ari = adjusted_rand_index(partitions[i], partitions[j]);
      lowest = std::min(lowest, ari);
      above += ari >= 0.8 ? 1 : 0;
      ++total;
    }
  }
  Outcome o;
  o.pass = above >= 0.8 * total;
  o.detail = std::to_string(above) + "/" + std::to_string(total) + " pairs with ARI >= 0.8, min " + fmt(lowest);
  return o;
}

Outcome dominance() {
  const Benchmark& b = benchmark();
  Outcome o;
  int dominated = 0;
  double tightest = std::numeric_limits<double>::infinity();
  for (const auto& t : b.trajectories) {
    const PipelineResult r = run_pipeline(t, b.config.pipeline);
    bool ok = r.baselines.size() == default_solver_pool().size();
    for (const auto& base : r.baselines) {
      ok = ok && r.report.aggregate_mse <= base.report.aggregate_mse + kDominanceSlack;
      tightest = std::min(tightest, base.report.aggregate_mse - r.report.aggregate_mse);
    }
    // exact argmin dominance at the probe level
    const double hybrid_probe = aggregate_probe_error(r.probe, r.plan.cluster_solvers);
    for (const auto& s : r.probe.pool) {
      const std::vector<SolverSpec> single(static_cast<std::size_t>(r.probe.num_clusters()), s);
      const double single_probe = aggregate_probe_error(r.probe, single);
      const double tolerance = AssignOptions{}.tie_rtol * r.probe.reference_power.sum();
      ok = ok && hybrid_probe <= single_probe + tolerance;
    }
    dominated += ok ? 1 : 0;
  }
  o.pass = dominated == static_cast<int>(b.trajectories.size());
  o.detail = std::to_string(dominated) + "/" + std::to_string(b.trajectories.size()) +
             " trajectories, smallest margin " + fmt(tightest);
  return o;
}

Outcome reuse_semantics() {
  const Benchmark& b = benchmark();
  const TrajectoryTensor& t = b.trajectories.front();
  const std::vector<int> labels(static_cast<std::size_t>(t.num_dims()), 0);
  const CachePlan reuse = single_solver_plan(labels, 1, parse_solver("REUSE"), 5, 1);
  const CacheSimReport open = simulate_open_loop(t, reuse);
  const Schedule s = schedule_steps(t.num_steps(), 5, 1);
  bool held = true;
  Index last = 0;
  for (Index i = 0; i < t.num_steps(); ++i) {
    if (s.kinds[static_cast<std::size_t>(i)] == StepKind::Computed) last = i;
    held = held && open.estimate.row(i) == t.values().row(last);
  }
  const CachePlan dense = single_solver_plan(labels, 1, parse_solver("TF2"), 1, 3);
  const Eigen::VectorXd x0 = initial_state(b.system, b.config.x0_seed_base);
  const CacheSimReport closed = simulate_closed_loop(b.system, x0, dense, b.config.steps,
                                                     b.config.step_size, b.config.substeps);
  const bool bitwise = closed.estimate == t.values();
  Outcome o;
  o.pass = held && bitwise;
  o.detail = std::string("reuse holds last computed: ") + (held ? "yes" : "no") +
             ", N=1 closed loop bitwise: " + (bitwise ? "yes" : "no");
  return o;
}

Outcome argmin_invariance() {
  const Benchmark& b = benchmark();
  PipelineOptions options = b.config.pipeline;
  options.baselines = false;
  int unchanged = 0;
  for (const auto& t : b.trajectories) {
    const auto base = run_pipeline(t, options).plan;
    bool same = true;
    for (const double alpha : {0.01, 1.0, 100.0}) {
      const auto scaled = run_pipeline(t.scaled(alpha), options).plan;
      same = same && scaled.cluster_solvers == base.cluster_solvers &&
             scaled.cluster_labels == base.cluster_labels;
    }
    unchanged += same ? 1 : 0;
  }
  Outcome o;
  o.pass = unchanged == static_cast<int>(b.trajectories.size());
  o.detail = std::to_string(unchanged) + "/" + std::to_string(b.trajectories.size()) +
             " trajectories keep their plan at alpha in {0.01, 1, 100}";
  return o;
}

int shell(const std::string& command) { return std::system(command.c_str()); }

Outcome roundtrip_determinism() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "hyca_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const TrajectoryTensor& t = benchmark().trajectories.front();
  write_trajectory(t, dir / "rt.hyca");
  const bool roundtrip = read_trajectory(dir / "rt.hyca") == t &&
                         encode_trajectory(read_trajectory(dir / "rt.hyca")) == read_file(dir / "rt.hyca");

  const std::string cli = HYCA_CLI_PATH;
  const std::string d = dir.string();
  bool identical = true;
  int failures = 0;
  // identical invocations in two directories, compared file by file
  for (const char* run : {"a", "b"}) {
    const std::string p = d + "/" + run;
    fs::create_directories(p);
    const std::string in = "cd " + p + " && " + cli;
    failures += shell(in + " bench --emit-spec std.json > /dev/null") != 0;
    failures += shell(in + " gen --spec std.json --x0-seed 1000 -o t.hyca > /dev/null") != 0;
    failures += shell(in + " pipeline --traj t.hyca -C 4 --seed 0 -N 5 --jobs 2 --plan-out plan.json"
                      " --report-out report.json > stdout.txt") != 0;
  }
  for (const char* name : {"std.json", "t.hyca", "t.labels.json", "plan.json", "report.json", "stdout.txt"}) {
    identical = identical && read_file(d + "/a/" + name) == read_file(d + "/b/" + name);
  }
  fs::remove_all(dir);
  o.pass = roundtrip && identical && failures == 0;
  o.detail = std::string("HYCA bitwise: ") + (roundtrip ? "yes" : "no") + ", CLI byte-identical: " +
             (identical ? "yes" : "no") + ", failed invocations: " + std::to_string(failures);
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "speedup accounting anchor (T=50, N=5, align zero)", 1.0, speedup_anchor},
      {2, "TF(m) exactness and Vandermonde cross-check", 5.0, solver_exactness},
      {3, "AB(2)/AB(3) convergence order on exp(-t)", 5.0, convergence_order},
      {4, "ARI oracle", 5.0, ari_oracle},
      {5, "cluster stability across 8 initial states", 30.0, stability},
      {6, "hybrid dominance over the 9-solver pool", 60.0, dominance},
      {7, "reuse semantics and N=1 closed-loop identity", 5.0, reuse_semantics},
      {8, "argmin invariance under scaling", 30.0, argmin_invariance},
      {9, "HYCA round trip and CLI determinism", 10.0, roundtrip_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = seconds < c.budget_seconds;
    const bool pass = outcome.pass && in_budget;
    failed += pass ? 0 : 1;
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.3f s / %.0f s", seconds, c.budget_seconds);
    std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.title << " -- "
              << outcome.detail << " [" << timing << (in_budget ? "" : ", over budget") << "]\n";
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << '\n';
  return failed == 0 ? 0 : 1;
}
