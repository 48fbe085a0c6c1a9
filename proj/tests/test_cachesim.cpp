#include <cmath>

#include "doctest.h"

#include "hyca/cachesim.hpp"
#include "hyca/error.hpp"
#include "hyca/pipeline.hpp"

using namespace hyca;

namespace {

std::vector<Index> computed_indices(const Schedule& s) {
  std::vector<Index> out;
  for (std::size_t i = 0; i < s.kinds.size(); ++i) {
    if (s.kinds[i] == StepKind::Computed) out.push_back(static_cast<Index>(i));
  }
  return out;
}

CachePlan uniform(const std::string& solver, Index dims, Index interval, Index warmup) {
  const std::vector<int> labels(static_cast<std::size_t>(dims), 0);
  return single_solver_plan(labels, 1, parse_solver(solver), interval, warmup);
}

TrajectoryTensor wave(Index steps = 40) {
  Eigen::MatrixXd v(steps, 3);
  for (Index k = 0; k < steps; ++k) {
    v(k, 0) = std::sin(0.3 * static_cast<double>(k));
    v(k, 1) = std::exp(-0.1 * static_cast<double>(k));
    v(k, 2) = 0.5 * static_cast<double>(k);
  }
  return TrajectoryTensor(v, 0.1);
}

}  // namespace

TEST_CASE("schedule anchored at warmup") {
  const Schedule s = schedule_steps(10, 3, 1, Align::Warmup);
  CHECK(computed_indices(s) == std::vector<Index>{0, 1, 4, 7});
}

TEST_CASE("schedule anchored at zero") {
  const Schedule s = schedule_steps(50, 5, 1, Align::Zero);
  CHECK(s.computed_steps() == 10);
  CHECK(computed_indices(s).back() == 45);
  CHECK(schedule_steps(50, 5, 0).computed_steps() == 10);
  CHECK(schedule_steps(50, 5, 1, Align::Warmup).computed_steps() == 11);
  CHECK(schedule_steps(12, 1, 1).predicted_steps() == 0);
  CHECK(schedule_steps(12, 5, 4).computed_steps() == 6);
}

TEST_CASE("schedule validation") {
  CHECK_THROWS_AS(schedule_steps(0, 5, 1), ValidationError);
  CHECK_THROWS_AS(schedule_steps(10, 0, 1), ValidationError);
}

TEST_CASE("speedup accounting") {
  const Schedule s = schedule_steps(50, 5, 1);
  CHECK(speedup_accounting(s, 1.0, 0.0) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(speedup_accounting(s, 1.0, 0.01) == doctest::Approx(4.8076923076923075).epsilon(1e-12));
  CHECK(speedup_accounting(schedule_steps(50, 1, 1), 3.0, 1.0) == 1.0);
  CHECK_THROWS_AS(speedup_accounting(s, 0.0, 0.0), ValidationError);
  CHECK_THROWS_AS(speedup_accounting(s, 1.0, -1.0), ValidationError);
}

TEST_CASE("open loop with N = 1 has no error") {
  const CacheSimReport r = simulate_open_loop(wave(), uniform("TF2", 3, 1, 3));
  CHECK(r.aggregate_mse == 0.0);
  CHECK(r.predicted_steps == 0);
  CHECK(r.flops_speedup == 1.0);
}

TEST_CASE("open loop error is zero at computed steps and reports are consistent") {
  const CachePlan plan = uniform("TF1", 3, 4, 2);
  const CacheSimReport r = simulate_open_loop(wave(), plan, {1.0, 0.05});
  const Schedule s = schedule_steps(40, 4, plan.warmup);
  for (std::size_t i = 0; i < s.kinds.size(); ++i) {
    if (s.kinds[i] == StepKind::Computed) CHECK(r.per_step_mse[i] == 0.0);
  }
  CHECK(r.computed_steps + r.predicted_steps == 40);
  CHECK(r.computed_steps == s.computed_steps());
  CHECK(r.flops_speedup == doctest::Approx(speedup_accounting(s, 1.0, 0.05)).epsilon(1e-12));
  CHECK(r.aggregate_mse > 0.0);
}

TEST_CASE("reuse holds the last computed value") {
  const TrajectoryTensor t = wave();
  const CacheSimReport r = simulate_open_loop(t, uniform("REUSE", 3, 5, 1));
  for (Index i = 0; i < t.num_steps(); ++i) {
    const Index last = (i / 5) * 5;
    CHECK(r.estimate.row(i) == t.values().row(last));
  }
}

TEST_CASE("constant trajectory under reuse is exact") {
  const TrajectoryTensor t(Eigen::MatrixXd::Constant(20, 2, 1.5), 0.1);
  CHECK(simulate_open_loop(t, uniform("REUSE", 2, 6, 1)).aggregate_mse == 0.0);
}

TEST_CASE("linear drift under TF1 is exact at fractional offsets") {
  const SyntheticSystem sys = generate_system({{LinearDriftSpec{4}}}, 3);
  const Eigen::VectorXd x0 = initial_state(sys, 1);
  const TrajectoryTensor t = sample_trajectory(sys, x0, 40, 0.1, 10);
  for (const Index n : {2, 3, 5, 7}) {
    const CachePlan plan = uniform("TF1", 4, n, 2);
    const CacheSimReport open = simulate_open_loop(t, plan);
    CHECK(open.aggregate_mse < 1e-24);
    const CacheSimReport closed = simulate_closed_loop(sys, x0, plan, 40, 0.1, 10);
    CHECK(closed.aggregate_mse < 1e-24);
  }
}

TEST_CASE("closed loop with N = 1 reproduces the reference bitwise") {
  const BenchmarkConfig config = standard_benchmark();
  const SyntheticSystem sys = generate_system(config.system.mixture, config.system.seed);
  const Eigen::VectorXd x0 = initial_state(sys, 1000);
  const CacheSimReport r = simulate_closed_loop(sys, x0, uniform("TF2", 64, 1, 3), 20, 0.1, 20);
  const TrajectoryTensor reference = sample_trajectory(sys, x0, 20, 0.1, 20);
  CHECK(r.estimate == reference.values());
  CHECK(r.aggregate_mse == 0.0);
}

TEST_CASE("startup predictions before the grid history fills") {
  const TrajectoryTensor t = wave();
  const CacheSimReport r = simulate_open_loop(t, uniform("TF2", 3, 5, 3));
  // steps 3-4 extrapolate warmup steps 0-2; steps 6-9 lack {-5, 0, 5} and
  // {3, 4, 5}, so they hold step 5
  CHECK(r.startup_fallbacks == 6 * 1);
  const Eigen::RowVectorXd two_ahead = predict(parse_solver("TF2"), t.values().topRows(3), 2.0);
  CHECK(r.estimate.row(4) == two_ahead);
  CHECK(r.estimate.row(6) == t.values().row(5));
  CHECK(r.estimate.row(11) != t.values().row(10));
}

TEST_CASE("aggregate error grows from the N = 1 endpoint") {
  const TrajectoryTensor t = wave();
  const CachePlan base = uniform("TF1", 3, 1, 2);
  const double endpoint = simulate_open_loop(t, base).aggregate_mse;
  CHECK(endpoint == 0.0);
  for (const Index n : {2, 4, 8}) {
    CachePlan plan = base;
    plan.interval = n;
    CHECK(simulate_open_loop(t, plan).aggregate_mse >= endpoint);
  }
}

TEST_CASE("simulation validation") {
  const TrajectoryTensor t = wave();
  CachePlan plan = uniform("TF2", 3, 5, 3);
  plan.warmup = 1;
  CHECK_THROWS_AS(simulate_open_loop(t, plan), ValidationError);
  CHECK_THROWS_AS(simulate_open_loop(t, uniform("TF1", 2, 5, 2)), ValidationError);
  CachePlan bad_label = uniform("TF1", 3, 5, 2);
  bad_label.cluster_labels[1] = 4;
  CHECK_THROWS_AS(simulate_open_loop(t, bad_label), ValidationError);
}

TEST_CASE("closed loop surfaces integration overflow") {
  const SyntheticSystem sys = generate_system({{LogisticSpec{1, {-40.0, -40.0}, {1.0, 1.0}}}}, 0);
  Eigen::VectorXd x0(1);
  x0 << -5.0;
  CHECK_THROWS_AS(simulate_closed_loop(sys, x0, uniform("TF1", 1, 2, 2), 40, 0.5, 5), NumericalError);
}

TEST_CASE("open-loop selection does not carry over to closed loop") {
  const MixtureSpec spec{{StiffDecaySpec{8, {50.0, 80.0}}, DampedOscillatorSpec{8, {1.0, 2.0}, {0.0, 0.1}}}};
  const SyntheticSystem sys = generate_system(spec, 42);
  const Eigen::VectorXd x0 = initial_state(sys, 1000);
  const TrajectoryTensor traj = sample_trajectory(sys, x0, 50, 0.1);
  PipelineOptions options;
  options.clusters = 2;
  options.baselines = false;
  const PipelineResult result = run_pipeline(traj, options);
  const CachePlan reuse = single_solver_plan(result.plan.cluster_labels, 2, parse_solver("REUSE"),
                                             5, result.plan.warmup);
  CHECK(result.report.aggregate_mse < simulate_open_loop(traj, reuse).aggregate_mse);

  // extrapolated oscillator states feed each computed step and the error grows
  const CacheSimReport hybrid = simulate_closed_loop(sys, x0, result.plan, 50, 0.1);
  const CacheSimReport baseline = simulate_closed_loop(sys, x0, reuse, 50, 0.1);
  CHECK(hybrid.aggregate_mse > baseline.aggregate_mse);
  CHECK(hybrid.per_step_mse[45] > 0.0);
  CHECK(hybrid.aggregate_mse > result.report.aggregate_mse);
}

TEST_CASE("per-step CSV") {
  const CachePlan plan = uniform("REUSE", 3, 5, 1);
  const CacheSimReport r = simulate_open_loop(wave(12), plan);
  const std::string csv = per_step_csv(r, schedule_steps(12, 5, 1));
  CHECK(csv.rfind("step,kind,mse\n0,computed,0\n1,predicted,", 0) == 0);
}
