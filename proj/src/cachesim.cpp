#include "hyca/cachesim.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "hyca/error.hpp"
#include "hyca/io.hpp"

namespace hyca {

Index Schedule::computed_steps() const {
  return static_cast<Index>(std::count(kinds.begin(), kinds.end(), StepKind::Computed));
}

Index Schedule::predicted_steps() const {
  return static_cast<Index>(kinds.size()) - computed_steps();
}

Schedule schedule_steps(Index total_steps, Index interval, Index warmup, Align align) {
  if (total_steps < 1) throw ValidationError("schedule needs at least one step");
  if (interval < 1) throw ValidationError("cache interval must be >= 1");
  if (warmup < 0) throw ValidationError("warmup must be >= 0");
  Schedule out;
  out.total_steps = total_steps;
  out.interval = interval;
  out.warmup = std::max<Index>(warmup, 1);
  out.align = align;
  const Index anchor = align == Align::Zero ? 0 : out.warmup;
  out.kinds.reserve(static_cast<std::size_t>(total_steps));
  for (Index i = 0; i < total_steps; ++i) {
    const bool computed = i < out.warmup || (i - anchor) % interval == 0;
    out.kinds.push_back(computed ? StepKind::Computed : StepKind::Predicted);
  }
  return out;
}

double speedup_accounting(const Schedule& schedule, double cost_full, double cost_predict) {
  if (!(cost_full > 0.0) || !(cost_predict >= 0.0)) {
    throw ValidationError("costs must satisfy cost_full > 0 and cost_predict >= 0");
  }
  const double denominator = static_cast<double>(schedule.computed_steps()) * cost_full +
                             static_cast<double>(schedule.predicted_steps()) * cost_predict;
  if (!(denominator > 0.0)) throw ValidationError("speedup has a zero cost denominator");
  return static_cast<double>(schedule.kinds.size()) * cost_full / denominator;
}

const char* to_string(SimMode mode) noexcept {
  return mode == SimMode::OpenLoop ? "open_loop" : "closed_loop";
}

namespace {

void validate_plan(const CachePlan& plan, Index dims, Index steps) {
  if (plan.cluster_solvers.empty()) throw ValidationError("plan has no clusters");
  if (static_cast<Index>(plan.cluster_labels.size()) != dims) {
    throw ValidationError("plan labels cover " + std::to_string(plan.cluster_labels.size()) +
                          " dimensions but the trajectory has " + std::to_string(dims));
  }
  for (const int label : plan.cluster_labels) {
    if (label < 0 || label >= plan.num_clusters()) {
      throw ValidationError("plan label " + std::to_string(label) + " has no assigned solver");
    }
  }
  if (plan.interval < 1) throw ValidationError("cache interval must be >= 1");
  if (plan.warmup < plan.max_history_required()) {
    throw ValidationError("insufficient warmup: " + std::to_string(plan.warmup) +
                          " steps but the plan needs " +
                          std::to_string(plan.max_history_required()));
  }
  if (steps < 1) throw ValidationError("simulation needs at least one step");
}

using ComputeRow = std::function<Eigen::RowVectorXd(Index step, const Eigen::MatrixXd& estimate)>;

CacheSimReport run(SimMode mode, const Eigen::MatrixXd& truth, const CachePlan& plan,
                   const CostModel& cost, const ComputeRow& compute) {
  const Index steps = truth.rows();
  const Index dims = truth.cols();
  const Schedule schedule = schedule_steps(steps, plan.interval, plan.warmup, plan.align);

  std::vector<std::vector<Index>> members(plan.cluster_solvers.size());
  for (std::size_t d = 0; d < plan.cluster_labels.size(); ++d) {
    members[static_cast<std::size_t>(plan.cluster_labels[d])].push_back(static_cast<Index>(d));
  }

  CacheSimReport out;
  out.mode = mode;
  out.estimate = Eigen::MatrixXd::Zero(steps, dims);
  HistoryBuffer history(dims);
  const SolverSpec reuse = make_solver(SolverFamily::Reuse, 0);
  Index last = 0;
  for (Index i = 0; i < steps; ++i) {
    if (schedule.kinds[static_cast<std::size_t>(i)] == StepKind::Computed) {
      const Eigen::RowVectorXd row = compute(i, out.estimate);
      if (!row.allFinite()) throw NumericalError("computed step " + std::to_string(i) + " diverged");
      out.estimate.row(i) = row;
      history.record(i, StepKind::Computed, row);
      last = i;
      continue;
    }
    const double kappa = static_cast<double>(i - last) / static_cast<double>(plan.interval);
    for (std::size_t c = 0; c < members.size(); ++c) {
      if (members[c].empty()) continue;
      const SolverSpec& solver = plan.cluster_solvers[c];
      const Index points = solver.history_required();
      auto window = history.gather(last, plan.interval, points, members[c]);
      const SolverSpec* used = &solver;
      double offset = kappa;
      if (!window) {
        // grid history too short: consecutive computed steps, else reuse
        ++out.startup_fallbacks;
        window = history.gather(last, 1, points, members[c]);
        offset = static_cast<double>(i - last);
        if (!window) {
          window = history.gather(last, 1, 1, members[c]);
          used = &reuse;
        }
      }
      const Eigen::RowVectorXd predicted = predict(*used, *window, offset);
      for (std::size_t k = 0; k < members[c].size(); ++k) {
        out.estimate(i, members[c][k]) = predicted[static_cast<Index>(k)];
      }
    }
    if (!out.estimate.row(i).allFinite()) {
      throw NumericalError("prediction at step " + std::to_string(i) + " is not finite");
    }
  }

  const Eigen::ArrayXXd squared = (out.estimate - truth).array().square();
  out.per_step_mse.resize(static_cast<std::size_t>(steps));
  for (Index i = 0; i < steps; ++i) {
    out.per_step_mse[static_cast<std::size_t>(i)] = squared.row(i).mean();
  }
  for (const auto& cols : members) {
    double sum = 0.0;
    for (const Index d : cols) sum += squared.col(d).sum();
    out.per_cluster_mse.push_back(
        cols.empty() ? 0.0 : sum / static_cast<double>(cols.size() * static_cast<std::size_t>(steps)));
  }
  out.aggregate_mse = squared.mean();
  const double diff = (out.estimate.row(steps - 1) - truth.row(steps - 1)).norm();
  const double scale = truth.row(steps - 1).norm();
  out.final_state_rel_error = scale > 0.0 ? diff / scale : diff;
  out.computed_steps = schedule.computed_steps();
  out.predicted_steps = schedule.predicted_steps();
  out.flops_speedup = speedup_accounting(schedule, cost.full, cost.predict);
  for (const auto& s : plan.cluster_solvers) out.cluster_solvers.push_back(s.name());
  return out;
}

}  // namespace

CacheSimReport simulate_open_loop(const TrajectoryTensor& truth, const CachePlan& plan,
                                  const CostModel& cost) {
  validate_plan(plan, truth.num_dims(), truth.num_steps());
  const Eigen::MatrixXd& values = truth.values();
  return run(SimMode::OpenLoop, values, plan, cost,
             [&values](Index step, const Eigen::MatrixXd&) -> Eigen::RowVectorXd {
               return values.row(step);
             });
}

CacheSimReport simulate_closed_loop(const SyntheticSystem& system, const Eigen::VectorXd& x0,
                                    const CachePlan& plan, Index steps, double step_size,
                                    int substeps, const CostModel& cost) {
  validate_plan(plan, static_cast<Index>(x0.size()), steps);
  const TrajectoryTensor truth = sample_trajectory(system, x0, steps, step_size, substeps);
  return run(SimMode::ClosedLoop, truth.values(), plan, cost,
             [&](Index step, const Eigen::MatrixXd& estimate) -> Eigen::RowVectorXd {
               if (step == 0) return x0.transpose();
               const Eigen::VectorXd previous = estimate.row(step - 1).transpose();
               const double t = static_cast<double>(step - 1) * step_size;
               return integrate_reference(system, previous, t, step_size, substeps).transpose();
             });
}

std::string per_step_csv(const CacheSimReport& report, const Schedule& schedule) {
  std::ostringstream out;
  out << "step,kind,mse\n";
  for (std::size_t i = 0; i < report.per_step_mse.size(); ++i) {
    out << i << ','
        << (schedule.kinds[i] == StepKind::Computed ? "computed" : "predicted") << ','
        << format_double(report.per_step_mse[i]) << '\n';
  }
  return out.str();
}

}  // namespace hyca
