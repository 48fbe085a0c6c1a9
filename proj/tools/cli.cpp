#include "cli.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hyca/assignment.hpp"
#include "hyca/cachesim.hpp"
#include "hyca/clustering.hpp"
#include "hyca/dynamics.hpp"
#include "hyca/error.hpp"
#include "hyca/io.hpp"
#include "hyca/pipeline.hpp"
#include "hyca/serialization.hpp"
#include "hyca/solvers.hpp"
#include "hyca/trajectory.hpp"

namespace hyca::cli {

namespace {

namespace fs = std::filesystem;

struct Style {
  bool color = false;
  std::string paint(const std::string& text, const char* code) const {
    return color ? std::string("\x1b[") + code + "m" + text + "\x1b[0m" : text;
  }
  std::string good(const std::string& text) const { return paint(text, "32"); }
  std::string bad(const std::string& text) const { return paint(text, "31"); }
  std::string bold(const std::string& text) const { return paint(text, "1"); }
};

TrajectoryTensor load_trajectory(const std::string& path) {
  if (fs::path(path).extension() == ".csv") return read_trajectory_csv(path);
  return read_trajectory(path);
}

void save_trajectory(const TrajectoryTensor& traj, const std::string& path, Dtype dtype) {
  if (fs::path(path).extension() == ".csv") {
    write_trajectory_csv(traj, path);
  } else {
    write_trajectory(traj, path, dtype);
  }
}

/// JSON to the file when given, otherwise to stdout.
void emit(const Json& doc, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << dump_json(doc);
  } else {
    write_json(path, doc);
  }
}

std::vector<SolverSpec> pool_from(const std::vector<std::string>& names) {
  if (names.empty()) return default_solver_pool();
  return solver_pool(names);
}

std::string solver_list(const std::vector<SolverSpec>& solvers) {
  std::string out;
  for (const auto& s : solvers) out += (out.empty() ? "" : ",") + s.name();
  return out;
}

// Option groups shared by several subcommands.

struct ClusterFlags {
  Index window = kDefaultProbeWindow;
  Index start = 0;
  int clusters = kDefaultClusters;
  std::uint64_t seed = 0;
  int max_iter = KMeansOptions{}.max_iter;
  double tol = KMeansOptions{}.tol;

  void add(CLI::App* app) {
    app->add_option("--window", window, "Descriptor window W (>= 4)")->capture_default_str();
    app->add_option("--window-offset", start, "First step of the descriptor window")
        ->capture_default_str();
    app->add_option("-C,--clusters", clusters, "Number of clusters")->capture_default_str();
    app->add_option("--seed", seed, "k-means seed")->capture_default_str();
    app->add_option("--max-iter", max_iter, "k-means iteration cap")->capture_default_str();
    app->add_option("--tol", tol, "k-means centroid-shift tolerance")->capture_default_str();
  }
  KMeansOptions kmeans() const { return {max_iter, tol}; }
};

struct ProbeFlags {
  std::vector<std::string> pool;
  std::optional<Index> probe_start;
  std::optional<Index> probe_end;
  std::optional<Index> stride;

  void add(CLI::App* app) {
    app->add_option("--pool", pool, "Comma-separated solver pool (default: all nine)")
        ->delimiter(',');
    app->add_option("--probe-start", probe_start, "First probed step");
    app->add_option("--probe-end", probe_end, "One past the last probed step");
    app->add_option("--stride", stride, "History spacing used by the probe");
  }

  std::optional<ProbeRange> range(const std::vector<SolverSpec>& solvers, Index stride_used,
                                  Index steps) const {
    if (!probe_start && !probe_end) return std::nullopt;
    ProbeRange r = default_probe_range(solvers, stride_used, steps);
    if (probe_start) r.start = *probe_start;
    r.end = probe_end ? *probe_end : std::min(steps, r.start + kDefaultProbeSpan);
    return r;
  }
};

struct ScheduleFlags {
  Index interval = 5;
  Index warmup = 1;
  std::string align = "zero";

  void add(CLI::App* app) {
    app->add_option("-N,--interval", interval, "Cache interval N")->capture_default_str();
    app->add_option("-w,--warmup", warmup, "Fully computed warmup steps")->capture_default_str();
    app->add_option("--align", align, "Schedule anchor")
        ->check(CLI::IsMember({"zero", "warmup"}))
        ->capture_default_str();
  }
};

struct CostFlags {
  CostModel cost;
  void add(CLI::App* app) {
    app->add_option("--cost-full", cost.full, "Cost of a computed step")->capture_default_str();
    app->add_option("--cost-predict", cost.predict, "Cost of a predicted step")
        ->capture_default_str();
  }
};

struct SystemFlags {
  std::string spec;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> x0_seed;
  Index steps = 50;
  double h = 0.1;
  int substeps = kDefaultSubsteps;

  void add(CLI::App* app, bool required) {
    auto* opt = app->add_option("--spec", spec, "System spec JSON")->check(CLI::ExistingFile);
    if (required) opt->required();
    app->add_option("--seed", seed, "System seed (overrides the spec's seed)");
    app->add_option("--x0-seed", x0_seed, "Initial-state seed (default: the system seed)");
    app->add_option("--steps", steps, "Trajectory length T")->capture_default_str();
    app->add_option("--step-size", h, "Step size h")->capture_default_str();
    app->add_option("--substeps", substeps, "Reference RK4 substeps per step")
        ->capture_default_str();
  }

  SystemConfig config() const {
    SystemConfig c = system_config_from_json(read_json(spec));
    if (seed) c.seed = *seed;
    return c;
  }
  std::uint64_t initial_seed(const SystemConfig& c) const { return x0_seed.value_or(c.seed); }
};

// Subcommand handlers.

struct GenCmd {
  SystemFlags system;
  std::string output;
  std::string labels;
  std::string dtype = "f64";

  void add(CLI::App* app) {
    system.add(app, true);
    app->add_option("-o,--output", output, "Trajectory output (.hyca or .csv)")->required();
    app->add_option("--labels", labels, "Ground-truth labels JSON (default: <output>.labels.json)");
    app->add_option("--dtype", dtype, "Binary payload type")
        ->check(CLI::IsMember({"f32", "f64"}))
        ->capture_default_str();
  }

  int run(std::ostream& out, const Style& style) const {
    const SystemConfig config = system.config();
    const SyntheticSystem sys = generate_system(config.mixture, config.seed);
    const Eigen::VectorXd x0 = initial_state(sys, system.initial_seed(config));
    const TrajectoryTensor traj = sample_trajectory(sys, x0, system.steps, system.h, system.substeps);
    save_trajectory(traj, output, dtype == "f32" ? Dtype::F32 : Dtype::F64);
    std::string labels_path = labels;
    if (labels_path.empty()) labels_path = fs::path(output).replace_extension(".labels.json").string();
    write_json(labels_path, labels_to_json(sys.labels().labels, sys.labels().num_families));
    out << style.good("wrote") << ' ' << output << " (" << traj.num_steps() << " x "
        << traj.num_dims() << ") and " << labels_path << '\n';
    return kExitOk;
  }
};

struct DescriptorsCmd {
  std::string traj;
  Index window = kDefaultProbeWindow;
  Index start = 0;
  bool raw = false;
  std::string output;

  void add(CLI::App* app) {
    app->add_option("--traj", traj, "Trajectory file")->required()->check(CLI::ExistingFile);
    app->add_option("--window", window, "Descriptor window W (>= 4)")->capture_default_str();
    app->add_option("--window-offset", start, "First step of the window")->capture_default_str();
    app->add_flag("--raw", raw, "Skip per-column standardization");
    app->add_option("-o,--output", output, "CSV output (default: stdout)");
  }

  int run(std::ostream& out) const {
    const auto matrix = build_descriptor_matrix(load_trajectory(traj), window, !raw, start);
    const std::string csv = descriptor_matrix_to_csv(matrix);
    if (output.empty()) {
      out << csv;
    } else {
      write_file(output, csv);
    }
    return kExitOk;
  }
};

struct ClusterCmd {
  std::string traj;
  ClusterFlags flags;
  std::string output;

  void add(CLI::App* app) {
    app->add_option("--traj", traj, "Trajectory file")->required()->check(CLI::ExistingFile);
    flags.add(app);
    app->add_option("-o,--output", output, "Cluster JSON output (default: stdout)");
  }

  int run(std::ostream& out) const {
    const auto matrix = build_descriptor_matrix(load_trajectory(traj), flags.window, true, flags.start);
    const auto clusters = kmeans(matrix.rows, flags.clusters, flags.seed, flags.kmeans());
    emit(to_json(clusters), output, out);
    return kExitOk;
  }
};

struct ProbeCmd {
  std::string traj;
  std::string clusters;
  ProbeFlags flags;
  std::string output;

  void add(CLI::App* app) {
    app->add_option("--traj", traj, "Trajectory file")->required()->check(CLI::ExistingFile);
    app->add_option("--clusters", clusters, "Cluster or labels JSON")
        ->required()
        ->check(CLI::ExistingFile);
    flags.add(app);
    app->add_option("-o,--output", output, "Probe matrix JSON output (default: stdout)");
  }

  int run(std::ostream& out) const {
    const TrajectoryTensor t = load_trajectory(traj);
    const ClusterAssignment assignment = labels_from_json(read_json(clusters));
    const auto pool = pool_from(flags.pool);
    const Index stride = flags.stride.value_or(1);
    const ProbeRange range =
        flags.range(pool, stride, t.num_steps()).value_or(default_probe_range(pool, stride, t.num_steps()));
    emit(to_json(probe_errors(t, assignment, pool, range, stride)), output, out);
    return kExitOk;
  }
};

struct AssignCmd {
  std::string probe;
  ScheduleFlags schedule;
  double tie_rtol = AssignOptions{}.tie_rtol;
  std::string output;

  void add(CLI::App* app) {
    app->add_option("--probe", probe, "Probe matrix JSON")->required()->check(CLI::ExistingFile);
    schedule.add(app);
    app->add_option("--tie-rtol", tie_rtol, "Relative tie tolerance")->capture_default_str();
    app->add_option("-o,--output", output, "Plan JSON output (default: stdout)");
  }

  int run(std::ostream& out) const {
    const auto matrix = probe_matrix_from_json(read_json(probe));
    const CachePlan plan = assign_solvers(matrix, schedule.interval, schedule.warmup,
                                          parse_align(schedule.align), {tie_rtol});
    emit(to_json(plan), output, out);
    return kExitOk;
  }
};

struct SimulateCmd {
  std::string plan;
  std::string traj;
  std::string mode = "open";
  SystemFlags system;
  CostFlags cost;
  std::string output;
  std::string csv;

  void add(CLI::App* app) {
    app->add_option("--plan", plan, "Plan JSON")->required()->check(CLI::ExistingFile);
    app->add_option("--traj", traj, "Reference trajectory (open loop)")->check(CLI::ExistingFile);
    app->add_option("--mode", mode, "open or closed loop")
        ->check(CLI::IsMember({"open", "closed"}))
        ->capture_default_str();
    system.add(app, false);
    cost.add(app);
    app->add_option("-o,--output", output, "Report JSON output (default: stdout)");
    app->add_option("--per-step-csv", csv, "Per-step MSE CSV output");
  }

  int run(std::ostream& out) const {
    const CachePlan p = plan_from_json(read_json(plan));
    CacheSimReport report;
    if (mode == "open") {
      if (traj.empty()) throw ValidationError("open-loop simulation needs --traj");
      report = simulate_open_loop(load_trajectory(traj), p, cost.cost);
    } else {
      if (system.spec.empty()) throw ValidationError("closed-loop simulation needs --spec");
      const SystemConfig config = system.config();
      const SyntheticSystem sys = generate_system(config.mixture, config.seed);
      const Eigen::VectorXd x0 = initial_state(sys, system.initial_seed(config));
      report = simulate_closed_loop(sys, x0, p, system.steps, system.h, system.substeps, cost.cost);
    }
    if (!csv.empty()) {
      const Schedule schedule =
          schedule_steps(static_cast<Index>(report.per_step_mse.size()), p.interval, p.warmup, p.align);
      write_file(csv, per_step_csv(report, schedule));
    }
    emit(to_json(report), output, out);
    return kExitOk;
  }
};

Json baselines_json(const PipelineResult& result) {
  std::vector<const BaselineResult*> sorted;
  for (const auto& b : result.baselines) sorted.push_back(&b);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto* a, const auto* b) { return a->solver < b->solver; });
  Json out = Json::object();
  for (const auto* b : sorted) {
    out[b->solver] = {{"aggregate_mse", b->report.aggregate_mse},
                      {"final_state_rel_error", b->report.final_state_rel_error}};
  }
  return out;
}

struct PipelineCmd {
  std::string traj;
  ClusterFlags cluster;
  ProbeFlags probe;
  ScheduleFlags schedule;
  CostFlags cost;
  std::string single_solver;
  bool no_baselines = false;
  double tie_rtol = AssignOptions{}.tie_rtol;
  int jobs = 1;
  std::string plan_out;
  std::string report_out;

  void add(CLI::App* app) {
    app->add_option("--traj", traj, "Trajectory file")->required()->check(CLI::ExistingFile);
    cluster.add(app);
    probe.add(app);
    schedule.add(app);
    cost.add(app);
    app->add_option("--single-solver", single_solver, "Force one solver on every cluster");
    app->add_flag("--no-baselines", no_baselines, "Skip the single-solver comparison runs");
    app->add_option("--tie-rtol", tie_rtol, "Relative tie tolerance")->capture_default_str();
    app->add_option("-j,--jobs", jobs, "Parallel simulations")->capture_default_str();
    app->add_option("--plan-out", plan_out, "Plan JSON output");
    app->add_option("--report-out", report_out, "Report JSON output");
  }

  int run(std::ostream& out, const Style& style) const {
    const TrajectoryTensor t = load_trajectory(traj);
    PipelineOptions options;
    options.window = cluster.window;
    options.descriptor_start = cluster.start;
    options.clusters = cluster.clusters;
    options.seed = cluster.seed;
    options.kmeans = cluster.kmeans();
    options.pool = pool_from(probe.pool);
    options.interval = schedule.interval;
    options.warmup = schedule.warmup;
    options.align = parse_align(schedule.align);
    options.probe_stride = probe.stride;
    options.probe_range =
        probe.range(options.pool, probe.stride.value_or(schedule.interval), t.num_steps());
    if (!single_solver.empty()) options.single_solver = parse_solver(single_solver);
    options.baselines = !no_baselines;
    options.cost = cost.cost;
    options.assign.tie_rtol = tie_rtol;
    options.jobs = jobs;
    options.trajectory_id = fs::path(traj).filename().string();

    const PipelineResult result = run_pipeline(t, options);
    if (!plan_out.empty()) write_json(plan_out, to_json(result.plan));

    Json doc;
    doc["trajectory"] = options.trajectory_id;
    doc["plan"] = to_json(result.plan);
    doc["report"] = to_json(result.report);
    doc["probe"] = to_json(result.probe);
    doc["baselines"] = baselines_json(result);
    doc["hybrid_dominates"] = result.hybrid_dominates;
    if (!report_out.empty()) write_json(report_out, doc);

    out << style.bold("plan") << ": " << solver_list(result.plan.cluster_solvers)
        << " (N=" << result.plan.interval << ", warmup=" << result.plan.warmup << ")\n";
    out << "aggregate_mse " << format_double(result.report.aggregate_mse) << ", flops_speedup "
        << format_double(result.report.flops_speedup) << '\n';
    if (!result.baselines.empty()) {
      out << "hybrid dominates baselines: "
          << (result.hybrid_dominates ? style.good("yes") : style.bad("no")) << '\n';
    }
    if (plan_out.empty() && report_out.empty()) out << dump_json(doc);
    return kExitOk;
  }
};

struct AriCmd {
  std::vector<std::string> trajs;
  std::vector<std::string> labels;
  std::vector<std::uint64_t> seeds;
  ClusterFlags cluster;
  std::string output;

  void add(CLI::App* app) {
    app->add_option("--traj", trajs, "Trajectory to cluster (repeatable)")
        ->check(CLI::ExistingFile);
    app->add_option("--labels", labels, "Precomputed labels JSON (repeatable)")
        ->check(CLI::ExistingFile);
    cluster.add(app);
    app->add_option("--seeds", seeds, "k-means seeds applied to every trajectory")
        ->delimiter(',');
    app->add_option("-o,--output", output, "ARI JSON output");
  }

  int run(std::ostream& out) const {
    std::vector<std::string> names;
    std::vector<std::vector<int>> partitions;
    const std::vector<std::uint64_t> use_seeds = seeds.empty() ? std::vector{cluster.seed} : seeds;
    for (const auto& path : trajs) {
      const auto matrix =
          build_descriptor_matrix(load_trajectory(path), cluster.window, true, cluster.start);
      for (const auto seed : use_seeds) {
        names.push_back(use_seeds.size() > 1 ? path + "@" + std::to_string(seed) : path);
        partitions.push_back(kmeans(matrix.rows, cluster.clusters, seed, cluster.kmeans()).labels);
      }
    }
    for (const auto& path : labels) {
      names.push_back(path);
      partitions.push_back(labels_from_json(read_json(path)).labels);
    }
    if (partitions.size() < 2) throw ValidationError("ARI needs at least two partitions");

    Json pairs = Json::array();
    std::size_t above = 0;
    std::size_t total = 0;
    for (std::size_t i = 0; i < partitions.size(); ++i) {
      for (std::size_t j = i + 1; j < partitions.size(); ++j) {
        const double ari = adjusted_rand_index(partitions[i], partitions[j]);
        pairs.push_back({{"a", names[i]}, {"b", names[j]}, {"ari", ari}});
        out << names[i] << "  " << names[j] << "  " << format_double(ari) << '\n';
        above += ari >= 0.8 ? 1 : 0;
        ++total;
      }
    }
    const double fraction = static_cast<double>(above) / static_cast<double>(total);
    out << "pairs with ARI >= 0.8: " << above << '/' << total << '\n';
    Json doc;
    doc["inputs"] = names;
    doc["pairs"] = std::move(pairs);
    doc["fraction_at_least_0_8"] = fraction;
    if (!output.empty()) write_json(output, doc);
    return kExitOk;
  }
};

struct BenchCmd {
  std::string spec;
  int runs = 0;
  int jobs = 1;
  std::string output;
  std::string emit_spec;

  void add(CLI::App* app) {
    app->add_option("--spec", spec, "System spec JSON (default: the standard mixture)")
        ->check(CLI::ExistingFile);
    app->add_option("--runs", runs, "Initial-condition seeds (default 8)");
    app->add_option("-j,--jobs", jobs, "Parallel simulations")->capture_default_str();
    app->add_option("-o,--output", output, "Benchmark JSON output");
    app->add_option("--emit-spec", emit_spec, "Write the standard mixture spec and exit");
  }

  int run(std::ostream& out, const Style& style) const {
    BenchmarkConfig config = standard_benchmark();
    if (!emit_spec.empty()) {
      write_json(emit_spec, to_json(config.system));
      out << "wrote " << emit_spec << '\n';
      return kExitOk;
    }
    if (!spec.empty()) config.system = system_config_from_json(read_json(spec));
    if (runs > 0) config.num_x0_seeds = runs;
    config.pipeline.jobs = jobs;
    if (config.num_x0_seeds < 2) throw ValidationError("bench needs at least two runs");

    const SyntheticSystem sys = generate_system(config.system.mixture, config.system.seed);
    std::vector<std::vector<int>> partitions;
    Json per_run = Json::array();
    int dominated = 0;
    for (int r = 0; r < config.num_x0_seeds; ++r) {
      const PipelineResult result = run_pipeline(benchmark_trajectory(config, sys, r), config.pipeline);
      partitions.push_back(result.clusters.labels);
      dominated += result.hybrid_dominates ? 1 : 0;
      per_run.push_back({{"x0_seed", config.x0_seed_base + static_cast<std::uint64_t>(r)},
                         {"solvers", result.report.cluster_solvers},
                         {"aggregate_mse", result.report.aggregate_mse},
                         {"flops_speedup", result.report.flops_speedup},
                         {"ari_vs_families", adjusted_rand_index(result.clusters.labels,
                                                                 sys.labels().labels)},
                         {"hybrid_dominates", result.hybrid_dominates}});
    }
    std::size_t above = 0;
    std::size_t total = 0;
    for (std::size_t i = 0; i < partitions.size(); ++i) {
      for (std::size_t j = i + 1; j < partitions.size(); ++j) {
        above += adjusted_rand_index(partitions[i], partitions[j]) >= 0.8 ? 1 : 0;
        ++total;
      }
    }
    const double fraction = static_cast<double>(above) / static_cast<double>(total);
    out << "pairwise ARI >= 0.8: " << above << '/' << total << ' '
        << (fraction >= 0.8 ? style.good("ok") : style.bad("low")) << '\n';
    out << "hybrid dominance: " << dominated << '/' << config.num_x0_seeds << ' '
        << (dominated == config.num_x0_seeds ? style.good("ok") : style.bad("violated")) << '\n';
    Json doc;
    doc["system"] = to_json(config.system);
    doc["runs"] = std::move(per_run);
    doc["pairwise_ari_fraction"] = fraction;
    doc["dominance_runs"] = dominated;
    if (!output.empty()) write_json(output, doc);
    return kExitOk;
  }
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation:
      return kExitUsage;
    case ErrorKind::Io:
    case ErrorKind::Format:
      return kExitIo;
    case ErrorKind::Numerical:
      return kExitNumerical;
  }
  return kExitNumerical;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Style style;
  style.color = std::getenv("HYCA_NO_COLOR") == nullptr && ::isatty(STDOUT_FILENO) != 0 &&
                &out == &std::cout;

  CLI::App app{"Hybrid solver feature caching on synthetic trajectories", "hyca"};
  app.require_subcommand(1);

  GenCmd gen;
  DescriptorsCmd descriptors;
  ClusterCmd cluster;
  ProbeCmd probe;
  AssignCmd assign;
  SimulateCmd simulate;
  PipelineCmd pipeline;
  AriCmd ari;
  BenchCmd bench;
  gen.add(app.add_subcommand("gen", "Generate a synthetic system trajectory"));
  descriptors.add(app.add_subcommand("descriptors", "Per-dimension dynamics descriptors"));
  cluster.add(app.add_subcommand("cluster", "k-means over descriptors"));
  probe.add(app.add_subcommand("probe", "Score every solver on every cluster"));
  assign.add(app.add_subcommand("assign", "Pick one solver per cluster"));
  simulate.add(app.add_subcommand("simulate", "Replay a cache schedule under a plan"));
  pipeline.add(app.add_subcommand("pipeline", "descriptors, cluster, probe, assign, simulate"));
  ari.add(app.add_subcommand("ari", "Pairwise ARI between partitions"));
  bench.add(app.add_subcommand("bench", "Run the standard mixture benchmark"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "hyca: " << style.bad("error") << ": " << e.what() << '\n';
    return kExitUsage;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string stage = sub->get_name();
  try {
    if (stage == "gen") return gen.run(out, style);
    if (stage == "descriptors") return descriptors.run(out);
    if (stage == "cluster") return cluster.run(out);
    if (stage == "probe") return probe.run(out);
    if (stage == "assign") return assign.run(out);
    if (stage == "simulate") return simulate.run(out);
    if (stage == "pipeline") return pipeline.run(out, style);
    if (stage == "ari") return ari.run(out);
    return bench.run(out, style);
  } catch (const Error& e) {
    err << "hyca " << stage << ": " << style.bad("error") << ": " << e.what() << '\n';
    return exit_code(e.kind());
  }
}

}  // namespace hyca::cli
