#ifndef HYCA_PIPELINE_HPP
#define HYCA_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hyca/assignment.hpp"
#include "hyca/cachesim.hpp"
#include "hyca/clustering.hpp"
#include "hyca/dynamics.hpp"
#include "hyca/solvers.hpp"
#include "hyca/trajectory.hpp"

namespace hyca {

/// Slack allowed when comparing the hybrid MSE against single-solver plans.
inline constexpr double kDominanceSlack = 1e-12;

struct PipelineOptions {
  Index window = kDefaultProbeWindow;
  Index descriptor_start = 0;
  int clusters = kDefaultClusters;
  std::uint64_t seed = 0;
  KMeansOptions kmeans;
  std::vector<SolverSpec> pool = default_solver_pool();
  Index interval = 5;
  /// Raised to the largest history requirement in the pool, and shared by
  /// the hybrid plan and every baseline so all plans compute the same steps.
  Index warmup = 1;
  Align align = Align::Zero;
  std::optional<ProbeRange> probe_range;
  /// Defaults to the interval: the probe scores kappa = 1 on the computed grid.
  std::optional<Index> probe_stride;
  std::optional<SolverSpec> single_solver;
  bool baselines = true;
  CostModel cost;
  AssignOptions assign;
  int jobs = 1;
  std::string trajectory_id;
};

struct BaselineResult {
  std::string solver;
  CacheSimReport report;
};

struct PipelineResult {
  DescriptorMatrix descriptors;
  ClusterAssignment clusters;
  ProbeErrorMatrix probe;
  CachePlan plan;
  CacheSimReport report;
  /// One single-solver plan per pool entry, in pool order.
  std::vector<BaselineResult> baselines;
  /// Hybrid open-loop MSE <= every baseline MSE + kDominanceSlack.
  bool hybrid_dominates = true;
};

/// descriptors -> k-means -> probe -> assign -> open-loop simulation, plus
/// the single-solver baselines unless disabled or a single solver is forced.
PipelineResult run_pipeline(const TrajectoryTensor& traj, const PipelineOptions& options);

/// Open-loop reports for several plans, spread over `jobs` threads. Output
/// order matches input order regardless of scheduling.
std::vector<CacheSimReport> simulate_plans(const TrajectoryTensor& traj,
                                           const std::vector<CachePlan>& plans,
                                           const CostModel& cost, int jobs);

/// The seeded four-family mixture used for stability and dominance checks.
struct BenchmarkConfig {
  SystemConfig system;
  Index steps = 50;
  double step_size = 0.1;
  int substeps = kDefaultSubsteps;
  std::uint64_t x0_seed_base = 1000;
  int num_x0_seeds = 8;
  PipelineOptions pipeline;
};

/// exp_decay, damped_oscillator, stiff_decay, linear_drift; 16 dims each.
MixtureSpec standard_mixture();
BenchmarkConfig standard_benchmark();

/// Trajectory of the benchmark system from initial-condition seed
/// x0_seed_base + index.
TrajectoryTensor benchmark_trajectory(const BenchmarkConfig& config,
                                      const SyntheticSystem& system, int index);

}  // namespace hyca

#endif  // HYCA_PIPELINE_HPP
