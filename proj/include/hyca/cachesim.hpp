#ifndef HYCA_CACHESIM_HPP
#define HYCA_CACHESIM_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hyca/assignment.hpp"
#include "hyca/solvers.hpp"
#include "hyca/trajectory.hpp"

namespace hyca {

/// Per-step computed/predicted pattern.
struct Schedule {
  Index total_steps = 0;
  Index interval = 1;
  Index warmup = 1;
  Align align = Align::Zero;
  std::vector<StepKind> kinds;

  Index computed_steps() const;
  Index predicted_steps() const;
};

/// Step i is computed iff i < warmup or (i - anchor) mod interval == 0, where
/// anchor is 0 (Align::Zero) or warmup (Align::Warmup). Warmup 0 is treated as 1.
Schedule schedule_steps(Index total_steps, Index interval, Index warmup,
                        Align align = Align::Zero);

/// T * cost_full / (computed * cost_full + predicted * cost_predict).
double speedup_accounting(const Schedule& schedule, double cost_full, double cost_predict);

/// Relative cost of one full step and one cached prediction.
struct CostModel {
  double full = 1.0;
  double predict = 0.0;
};

enum class SimMode { OpenLoop, ClosedLoop };

const char* to_string(SimMode mode) noexcept;

struct CacheSimReport {
  SimMode mode = SimMode::OpenLoop;
  std::vector<double> per_step_mse;
  std::vector<double> per_cluster_mse;
  double aggregate_mse = 0.0;
  double final_state_rel_error = 0.0;
  Index computed_steps = 0;
  Index predicted_steps = 0;
  /// (step, cluster) predictions made while the grid history was still too
  /// short: the solver runs on consecutive computed steps if there are enough,
  /// otherwise REUSE stands in.
  Index startup_fallbacks = 0;
  double flops_speedup = 1.0;
  std::vector<std::string> cluster_solvers;
  Eigen::MatrixXd estimate;
};

/// Replays the schedule against a stored trajectory: computed steps take the
/// true values, predicted steps come from the cluster's solver.
CacheSimReport simulate_open_loop(const TrajectoryTensor& truth, const CachePlan& plan,
                                  const CostModel& cost = {});

/// Re-integrates the system, so computed steps start from the (possibly
/// predicted) previous state and errors propagate.
CacheSimReport simulate_closed_loop(const SyntheticSystem& system, const Eigen::VectorXd& x0,
                                    const CachePlan& plan, Index steps, double step_size,
                                    int substeps = kDefaultSubsteps, const CostModel& cost = {});

/// step,kind,mse rows for plotting.
std::string per_step_csv(const CacheSimReport& report, const Schedule& schedule);

}  // namespace hyca

#endif  // HYCA_CACHESIM_HPP
