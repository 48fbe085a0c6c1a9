#include "hyca/pipeline.hpp"

#include <algorithm>
#include <thread>

#include "hyca/error.hpp"

namespace hyca {

std::vector<CacheSimReport> simulate_plans(const TrajectoryTensor& traj,
                                           const std::vector<CachePlan>& plans,
                                           const CostModel& cost, int jobs) {
  if (jobs < 1) throw ValidationError("jobs must be >= 1");
  std::vector<CacheSimReport> out(plans.size());
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), plans.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < plans.size(); ++i) out[i] = simulate_open_loop(traj, plans[i], cost);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < plans.size(); i += workers) {
          out[i] = simulate_open_loop(traj, plans[i], cost);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

PipelineResult run_pipeline(const TrajectoryTensor& traj, const PipelineOptions& options) {
  if (options.pool.empty()) throw ValidationError("solver pool is empty");
  if (options.interval < 1) throw ValidationError("cache interval must be >= 1");

  PipelineResult out;
  out.descriptors = build_descriptor_matrix(traj, options.window, true, options.descriptor_start);
  out.clusters = kmeans(out.descriptors.rows, options.clusters, options.seed, options.kmeans);

  const Index stride = options.probe_stride.value_or(options.interval);
  const ProbeRange range =
      options.probe_range.value_or(default_probe_range(options.pool, stride, traj.num_steps()));
  out.probe = probe_errors(traj, out.clusters, options.pool, range, stride);

  Index warmup = std::max<Index>(options.warmup, 1);
  for (const auto& s : options.pool) warmup = std::max<Index>(warmup, s.history_required());

  if (options.single_solver) {
    out.plan = single_solver_plan(out.clusters.labels, out.clusters.num_clusters,
                                  *options.single_solver, options.interval, warmup, options.align);
    out.plan.provenance.range = range;
    out.plan.provenance.stride = stride;
  } else {
    out.plan = assign_solvers(out.probe, options.interval, warmup, options.align, options.assign);
  }
  out.plan.provenance.trajectory_id = options.trajectory_id;
  out.plan.provenance.window = options.window;
  out.plan.provenance.seed = options.seed;

  std::vector<CachePlan> plans{out.plan};
  const bool with_baselines = options.baselines && !options.single_solver;
  if (with_baselines) {
    for (const auto& s : options.pool) {
      plans.push_back(single_solver_plan(out.clusters.labels, out.clusters.num_clusters, s,
                                         options.interval, warmup, options.align));
    }
  }
  auto reports = simulate_plans(traj, plans, options.cost, options.jobs);
  out.report = std::move(reports.front());
  for (std::size_t i = 1; i < reports.size(); ++i) {
    const bool dominated = out.report.aggregate_mse <= reports[i].aggregate_mse + kDominanceSlack;
    out.hybrid_dominates = out.hybrid_dominates && dominated;
    out.baselines.push_back({options.pool[i - 1].name(), std::move(reports[i])});
  }
  return out;
}

MixtureSpec standard_mixture() {
  MixtureSpec spec;
  spec.families.emplace_back(ExpDecaySpec{16, {3.0, 5.0}});
  spec.families.emplace_back(DampedOscillatorSpec{16, {7.0, 9.0}, {0.0, 0.1}});
  spec.families.emplace_back(StiffDecaySpec{16, {50.0, 80.0}});
  spec.families.emplace_back(LinearDriftSpec{16, {-1.0, 1.0}});
  return spec;
}

BenchmarkConfig standard_benchmark() {
  BenchmarkConfig config;
  config.system.mixture = standard_mixture();
  config.system.seed = 42;
  config.pipeline.window = 8;
  config.pipeline.clusters = 4;
  config.pipeline.seed = 0;
  config.pipeline.interval = 5;
  config.pipeline.warmup = 4;
  config.pipeline.trajectory_id = "standard";
  return config;
}

TrajectoryTensor benchmark_trajectory(const BenchmarkConfig& config,
                                      const SyntheticSystem& system, int index) {
  const auto seed = config.x0_seed_base + static_cast<std::uint64_t>(index);
  return sample_trajectory(system, initial_state(system, seed), config.steps, config.step_size,
                           config.substeps);
}

}  // namespace hyca
