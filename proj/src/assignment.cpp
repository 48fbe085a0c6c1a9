#include "hyca/assignment.hpp"

#include <algorithm>

#include "hyca/error.hpp"

namespace hyca {

namespace {

Index max_history(std::span<const SolverSpec> solvers) {
  Index out = 1;
  for (const auto& s : solvers) out = std::max<Index>(out, s.history_required());
  return out;
}

}  // namespace

ProbeRange default_probe_range(std::span<const SolverSpec> pool, Index stride, Index steps) {
  const Index start = stride * max_history(pool);
  if (start >= steps) {
    throw ValidationError("trajectory of " + std::to_string(steps) +
                          " steps is too short to probe with stride " + std::to_string(stride));
  }
  return {start, std::min(steps, start + kDefaultProbeSpan)};
}

ProbeErrorMatrix probe_errors(const TrajectoryTensor& traj, const ClusterAssignment& clusters,
                              std::span<const SolverSpec> pool, ProbeRange range,
                              Index stride) {
  if (pool.empty()) throw ValidationError("probe needs a non-empty solver pool");
  if (stride < 1) throw ValidationError("probe stride must be >= 1");
  if (static_cast<Index>(clusters.labels.size()) != traj.num_dims()) {
    throw ValidationError("cluster labels do not cover the trajectory dimensions");
  }
  if (range.start >= range.end || range.end > traj.num_steps()) {
    throw ValidationError("probe range [" + std::to_string(range.start) + ", " +
                          std::to_string(range.end) + ") is outside the trajectory");
  }
  const Index needed = stride * max_history(pool);
  if (range.start < needed) {
    throw ValidationError("insufficient history: probe starts at step " +
                          std::to_string(range.start) + " but the pool needs " +
                          std::to_string(needed));
  }
  const auto members = clusters.members();
  for (std::size_t c = 0; c < members.size(); ++c) {
    if (members[c].empty()) throw ValidationError("cluster " + std::to_string(c) + " is empty");
  }

  const Eigen::MatrixXd& y = traj.values();
  const int num_clusters = clusters.num_clusters;
  ProbeErrorMatrix out;
  out.errors = Eigen::MatrixXd::Zero(num_clusters, static_cast<Index>(pool.size()));
  out.reference_power = Eigen::VectorXd::Zero(num_clusters);
  out.pool.assign(pool.begin(), pool.end());
  out.cluster_labels = clusters.labels;
  out.range = range;
  out.stride = stride;
  out.probe_steps_used = range.end - range.start;

  for (std::size_t s = 0; s < pool.size(); ++s) {
    const SolverSpec& solver = pool[s];
    const Index points = solver.history_required();
    const Eigen::VectorXd w = predictor_weights(solver, 1.0);
    for (Index t = range.start; t < range.end; ++t) {
      Eigen::RowVectorXd predicted = Eigen::RowVectorXd::Zero(traj.num_dims());
      for (Index m = 0; m < points; ++m) predicted += w[m] * y.row(t - (points - m) * stride);
      const Eigen::RowVectorXd squared = (predicted - y.row(t)).array().square().matrix();
      for (int c = 0; c < num_clusters; ++c) {
        double sum = 0.0;
        for (const Index d : members[static_cast<std::size_t>(c)]) sum += squared[d];
        out.errors(c, static_cast<Index>(s)) +=
            sum / static_cast<double>(members[static_cast<std::size_t>(c)].size());
      }
    }
  }
  for (Index t = range.start; t < range.end; ++t) {
    for (int c = 0; c < num_clusters; ++c) {
      double sum = 0.0;
      for (const Index d : members[static_cast<std::size_t>(c)]) sum += y(t, d) * y(t, d);
      out.reference_power[c] += sum / static_cast<double>(members[static_cast<std::size_t>(c)].size());
    }
  }
  const auto steps = static_cast<double>(out.probe_steps_used);
  out.errors /= steps;
  out.reference_power /= steps;
  if (!out.errors.allFinite()) throw NumericalError("probe produced non-finite errors");
  return out;
}

const char* to_string(Align align) noexcept {
  return align == Align::Zero ? "zero" : "warmup";
}

Align parse_align(std::string_view text) {
  if (text == "zero") return Align::Zero;
  if (text == "warmup") return Align::Warmup;
  throw ValidationError("align must be 'zero' or 'warmup', got '" + std::string(text) + "'");
}

Index CachePlan::max_history_required() const { return max_history(cluster_solvers); }

CachePlan assign_solvers(const ProbeErrorMatrix& matrix, Index interval, Index warmup,
                         Align align, const AssignOptions& options) {
  if (matrix.errors.rows() == 0 || matrix.errors.cols() == 0) {
    throw ValidationError("probe error matrix is empty");
  }
  if (static_cast<Index>(matrix.pool.size()) != matrix.errors.cols()) {
    throw ValidationError("probe error matrix columns do not match its pool");
  }
  if (interval < 1) throw ValidationError("cache interval must be >= 1");
  if (warmup < 1) throw ValidationError("warmup must be >= 1");

  CachePlan plan;
  plan.cluster_labels = matrix.cluster_labels;
  plan.interval = interval;
  plan.align = align;
  plan.provenance.range = matrix.range;
  plan.provenance.stride = matrix.stride;
  for (Index c = 0; c < matrix.errors.rows(); ++c) {
    const double best = matrix.errors.row(c).minCoeff();
    const double power = c < matrix.reference_power.size() ? matrix.reference_power[c] : 0.0;
    const double threshold = best + options.tie_rtol * power;
    Index pick = 0;
    while (matrix.errors(c, pick) > threshold) ++pick;
    plan.cluster_solvers.push_back(matrix.pool[static_cast<std::size_t>(pick)]);
  }
  plan.warmup = std::max(warmup, plan.max_history_required());
  return plan;
}

CachePlan single_solver_plan(std::span<const int> labels, int num_clusters,
                             const SolverSpec& solver, Index interval, Index warmup,
                             Align align) {
  if (interval < 1) throw ValidationError("cache interval must be >= 1");
  if (warmup < 1) throw ValidationError("warmup must be >= 1");
  CachePlan plan;
  plan.cluster_solvers.assign(static_cast<std::size_t>(num_clusters), solver);
  plan.cluster_labels.assign(labels.begin(), labels.end());
  plan.interval = interval;
  plan.align = align;
  plan.warmup = std::max<Index>(warmup, solver.history_required());
  return plan;
}

double aggregate_probe_error(const ProbeErrorMatrix& matrix,
                             std::span<const SolverSpec> cluster_solvers) {
  if (static_cast<Index>(cluster_solvers.size()) != matrix.errors.rows()) {
    throw ValidationError("plan and probe matrix disagree on the cluster count");
  }
  double total = 0.0;
  for (std::size_t c = 0; c < cluster_solvers.size(); ++c) {
    const auto it = std::find(matrix.pool.begin(), matrix.pool.end(), cluster_solvers[c]);
    if (it == matrix.pool.end()) {
      throw ValidationError(cluster_solvers[c].name() + " is not in the probed pool");
    }
    total += matrix.errors(static_cast<Index>(c), it - matrix.pool.begin());
  }
  return total;
}

}  // namespace hyca
