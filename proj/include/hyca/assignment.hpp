#ifndef HYCA_ASSIGNMENT_HPP
#define HYCA_ASSIGNMENT_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hyca/clustering.hpp"
#include "hyca/dynamics.hpp"
#include "hyca/solvers.hpp"
#include "hyca/trajectory.hpp"

namespace hyca {

/// Target steps [start, end) scored by the probe.
struct ProbeRange {
  Index start = 4;
  Index end = 16;
};

/// Number of target steps in the default probe range.
inline constexpr Index kDefaultProbeSpan = 12;

/// Mean squared next-step error per (cluster, solver).
struct ProbeErrorMatrix {
  Eigen::MatrixXd errors;            // C x |pool|
  Eigen::VectorXd reference_power;   // per cluster mean of squared targets
  Index probe_steps_used = 0;
  std::vector<SolverSpec> pool;
  std::vector<int> cluster_labels;
  ProbeRange range;
  Index stride = 1;

  int num_clusters() const { return static_cast<int>(errors.rows()); }
};

/// [stride * R, stride * R + kDefaultProbeSpan) clipped to the trajectory,
/// with R the largest history requirement in the pool.
ProbeRange default_probe_range(std::span<const SolverSpec> pool, Index stride, Index steps);

/// Every solver predicts each target step t at kappa = 1 from the true values
/// at t - stride, t - 2*stride, ... Squared errors are averaged over the
/// cluster's dimensions, then over the probe steps.
ProbeErrorMatrix probe_errors(const TrajectoryTensor& traj, const ClusterAssignment& clusters,
                              std::span<const SolverSpec> pool, ProbeRange range,
                              Index stride = 1);

/// Whether the modulus of the cache schedule is anchored at step 0 or at the
/// end of warmup.
enum class Align { Zero, Warmup };

const char* to_string(Align align) noexcept;
Align parse_align(std::string_view text);

struct ProbeProvenance {
  std::string trajectory_id;
  Index window = kDefaultProbeWindow;
  std::uint64_t seed = 0;
  ProbeRange range;
  Index stride = 1;
};

/// One solver per cluster plus the cache schedule parameters.
struct CachePlan {
  std::vector<SolverSpec> cluster_solvers;
  std::vector<int> cluster_labels;
  Index interval = 1;
  Index warmup = 1;
  Align align = Align::Zero;
  ProbeProvenance provenance;

  int num_clusters() const { return static_cast<int>(cluster_solvers.size()); }
  Index max_history_required() const;
};

struct AssignOptions {
  /// Errors within tie_rtol * reference_power of the row minimum count as
  /// ties, so rounding noise among exact solvers does not pick the winner.
  double tie_rtol = 1e-20;
};

/// Per-cluster argmin, ties to the lowest pool index. Warmup is raised to the
/// largest history requirement among the chosen solvers.
CachePlan assign_solvers(const ProbeErrorMatrix& matrix, Index interval, Index warmup,
                         Align align = Align::Zero, const AssignOptions& options = {});

/// The same solver for every cluster (ablation baselines, forced plans).
CachePlan single_solver_plan(std::span<const int> labels, int num_clusters,
                             const SolverSpec& solver, Index interval, Index warmup,
                             Align align = Align::Zero);

/// Sum over clusters of the probe error of the given per-cluster choice.
double aggregate_probe_error(const ProbeErrorMatrix& matrix,
                             std::span<const SolverSpec> cluster_solvers);

}  // namespace hyca

#endif  // HYCA_ASSIGNMENT_HPP
