#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "rpid/rolling.hpp"

using namespace rpid;

namespace {

constexpr std::array<double, 4> kTheta{0.5, 0.3, 1.8, 0.9};

Scenario example_scenario(RunMode mode, int nm) {
  Scenario sc;
  sc.name = "test";
  sc.plant = make_example_plant(kTheta);
  sc.y_r = 2.0;
  sc.n_horizon = nm;
  sc.m_sample = nm;
  sc.k0 = {0.1, 0.1, 0.1};
  sc.mode = mode;
  return sc;
}

}  // namespace

TEST_CASE("check_termination") {
  const Scenario sc = example_scenario(RunMode::rolling_exact, 10);
  CHECK(check_termination({1, 2, 3}, {1, 2, 3}, 0.0, sc));
  CHECK_FALSE(check_termination({0, 0, 0}, {1, 0, 0}, 0.0, sc));
  CHECK(check_termination({0.0635, 0.2333, 0.0640}, {0.0635, 0.2333, 0.0640},
                          2.0 - 2.0, sc));
  CHECK_FALSE(check_termination({1, 2, 3}, {1, 2, 3}, 0.01, sc));  // error too large
  CHECK(check_termination({1, 2, 3}, {1 + 5e-7, 2, 3}, 5e-5, sc));
}

TEST_CASE("scenario validation names the offending field") {
  Scenario sc = example_scenario(RunMode::rolling_exact, 10);
  sc.n_horizon = 0;
  CHECK_THROWS_WITH_AS(validate_scenario(sc), doctest::Contains("n_horizon"),
                       std::invalid_argument);
  sc = example_scenario(RunMode::rolling_sysid, 10);
  sc.m_sample = 3;
  CHECK_THROWS_WITH_AS(validate_scenario(sc), doctest::Contains("m_sample"),
                       std::invalid_argument);
  sc = example_scenario(RunMode::rolling_exact, 10);
  sc.k0 = {11, 0, 0};
  CHECK_THROWS_WITH_AS(validate_scenario(sc), doctest::Contains("k0"),
                       std::invalid_argument);
}

TEST_CASE("canonical run reaches the reference and the analytic fixed point") {
  Scenario sc = example_scenario(RunMode::canonical, 10);
  sc.s_max = 20;  // 200 simulated steps
  const RunResult run = run_canonical(sc);
  REQUIRE(run.terminated_by == Termination::s_max);
  REQUIRE(run.records.size() == 1);
  CHECK(run.records[0].s == 1);
  CHECK(run.trajectory.size() == 200);
  CHECK(run.applied_gains.size() == 1);

  const TrajectorySample& last = run.trajectory.samples.back();
  CHECK(std::abs(last.y - 2.0) <= 1e-3);
  CHECK(std::abs(last.x[0]) <= 1e-3);
  CHECK(std::abs(last.x[1] - 10.0 / 9.0) <= 1e-3);

  // the record reports the state at k = M
  CHECK(run.records[0].x_at == run.trajectory.samples[10].x);
  CHECK(run.records[0].y_at == run.trajectory.samples[10].y);

  // j_value is the canonical objective at the returned gains
  const Objective obj = make_canonical_objective(sc);
  CHECK(run.records[0].j_value == obj(run.records[0].gains));
}

TEST_CASE("canonical run with the reference already met is free") {
  Scenario sc = example_scenario(RunMode::canonical, 10);
  sc.plant = make_example_plant(kTheta, {0.0, 0.0});
  sc.y_r = 0.0;  // output at the uncontrolled fixed point
  sc.k0 = {0, 0, 0};
  const RunResult run = run_canonical(sc);
  REQUIRE(run.records.size() == 1);
  CHECK(run.records[0].j_value == 0.0);
  for (const TrajectorySample& s : run.trajectory.samples) CHECK(s.y == 0.0);
}

TEST_CASE("rolling loop at a fixed point keeps the gains constant") {
  Scenario sc = example_scenario(RunMode::rolling_exact, 10);
  sc.plant = make_example_plant(kTheta, {0.0, 0.0});
  sc.y_r = 0.0;
  sc.k0 = {0, 0, 0};
  const RunResult run = run_rolling_exact(sc);
  CHECK(run.terminated_by == Termination::gain_fixed_point);
  REQUIRE(run.records.size() == 2);  // earliest period at which the test can fire
  for (const RollingRecord& rec : run.records) {
    CHECK(rec.gains == sc.k0);
    CHECK(rec.y_at == 0.0);
  }
  for (const TrajectorySample& s : run.trajectory.samples) CHECK(s.y == sc.y_r);
}

TEST_CASE("rolling exact: trajectory structure and replay consistency") {
  const Scenario sc = example_scenario(RunMode::rolling_exact, 10);
  const RunResult run = run_rolling_exact(sc);

  REQUIRE(run.terminated_by == Termination::gain_fixed_point);
  REQUIRE(!run.records.empty());
  CHECK(run.trajectory.size() == run.records.size() * 10);
  CHECK(run.applied_gains.size() == run.records.size());
  for (std::size_t i = 0; i < run.records.size(); ++i) {
    CHECK(run.records[i].s == static_cast<int>(i) + 1);
    CHECK(run.records[i].gains == run.applied_gains[i]);
    CHECK_FALSE(run.records[i].model.has_value());
  }

  // Replay each period from the recorded gains: the concatenated closed loop
  // must satisfy the plant recurrence across update boundaries (no resets),
  // and each re-optimization may not worsen the predictive cost of the
  // incumbent gains.
  PlantState state{sc.plant.x0, 0};
  PidMemory memory;
  std::size_t cursor = 0;
  for (std::size_t period = 0; period < run.records.size(); ++period) {
    const PidGains gains = run.records[period].gains;
    if (period > 0) {
      const Objective pred = make_predictive_objective(sc, sc.plant, state, memory);
      const double incumbent_cost = pred(run.records[period - 1].gains);
      CHECK(run.records[period].j_value <= incumbent_cost);
    }
    const RolloutResult replay = rollout(sc.plant, gains, memory, state, sc.y_r, 10);
    REQUIRE_FALSE(replay.diverged());
    for (const TrajectorySample& s : replay.trajectory.samples) {
      const TrajectorySample& orig = run.trajectory.samples[cursor++];
      CHECK(orig.k == s.k);
      CHECK(orig.x == s.x);
      CHECK(orig.u == s.u);
      CHECK(orig.y == s.y);
      CHECK(orig.e == s.e);
    }
    state = replay.final_state;
    memory = replay.final_memory;
    CHECK(run.records[period].x_at == state.x);
  }
  CHECK(cursor == run.trajectory.size());
}

TEST_CASE("rolling exact converges on both bundled horizon pairs") {
  for (const int nm : {10, 30}) {
    CAPTURE(nm);
    const RunResult run = run_rolling_exact(example_scenario(RunMode::rolling_exact, nm));
    REQUIRE(run.terminated_by == Termination::gain_fixed_point);
    const RollingRecord& last = run.records.back();
    CHECK(std::abs(last.y_at - 2.0) <= 1e-3);
    CHECK(std::abs(last.x_at[0]) <= 1e-3);
    CHECK(std::abs(last.x_at[1] - 10.0 / 9.0) <= 1e-3);
    // termination requires consecutive equal gains; visible in the records
    const std::size_t n = run.records.size();
    REQUIRE(n >= 2);
    CHECK(max_abs_diff(run.records[n - 1].gains, run.records[n - 2].gains) <= 1e-6);
  }
}

TEST_CASE("rolling sysid: records carry per-period fits and converge") {
  const Scenario sc = example_scenario(RunMode::rolling_sysid, 10);
  const RunResult run = run_rolling_sysid(sc);
  REQUIRE(run.terminated_by == Termination::gain_fixed_point);
  REQUIRE(!run.records.empty());

  // the initial vector is applied directly, with no first optimization
  CHECK(run.records[0].gains == sc.k0);
  CHECK(std::isnan(run.records[0].j_value));

  for (const RollingRecord& rec : run.records) {
    REQUIRE(rec.model.has_value());
  }
  CHECK(std::abs(run.records.back().y_at - 2.0) <= 1e-3);

  // the first-period fit is a deterministic function of the fixed-gain
  // trajectory; frozen from an independent least-squares solution
  const auto flat = run.records[0].model->flat();
  const std::array<double, 7> expected{0.464961880933141, -0.00658212725694411,
                                       0.132656163390839, 0.202193343124966,
                                       0.809377880968139, -0.816357253223623,
                                       1.81822078942639};
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(flat[i] == doctest::Approx(expected[i]).epsilon(1e-9));
  }
}

TEST_CASE("sysid updates coincide with exact updates when the plant is linear") {
  // plant that IS a linear model: the per-period fit recovers it exactly,
  // so optimizing on the surrogate equals optimizing on the true plant
  LinearModel truth;
  truth.a = {{{0.4, 0.0}, {0.1, 0.2}}};
  truth.b1 = 0.9;
  truth.c = {-0.8, 1.8};

  Scenario sc;
  sc.name = "linear";
  sc.plant = make_surrogate_plant(truth, {1.0, 1.0});
  sc.y_r = 1.0;
  sc.n_horizon = 10;
  sc.m_sample = 10;
  sc.k0 = {0.1, 0.1, 0.1};
  sc.mode = RunMode::rolling_sysid;
  sc.s_max = 6;

  const RunResult run = run_rolling_sysid(sc);
  REQUIRE(run.records.size() >= 2);

  // replay the run; at each boundary compare the surrogate-based update
  // with one computed against the true plant
  PlantState state{sc.plant.x0, 0};
  PidMemory memory;
  for (std::size_t period = 0; period + 1 < run.records.size(); ++period) {
    const RolloutResult replay =
        rollout(sc.plant, run.records[period].gains, memory, state, sc.y_r, 10);
    state = replay.final_state;
    memory = replay.final_memory;

    const PlantModel surrogate =
        make_surrogate_plant(*run.records[period].model, state.x);
    const Objective f_fit = make_predictive_objective(sc, surrogate, state, memory);
    const Objective f_true = make_predictive_objective(sc, sc.plant, state, memory);
    const OptResult from_fit =
        optimize_gains(f_fit, run.records[period].gains, sc.bounds, sc.opt);
    const OptResult from_true =
        optimize_gains(f_true, run.records[period].gains, sc.bounds, sc.opt);
    CHECK(max_abs_diff(from_fit.k_star, from_true.k_star) <= 1e-6);
    CHECK(from_fit.k_star == run.records[period + 1].gains);
  }
}

TEST_CASE("divergent closed loop reports divergence with the partial trajectory") {
  Scenario sc = example_scenario(RunMode::rolling_exact, 10);
  sc.bounds.lo = {10, 10, 10};  // degenerate box pins the gains at [10,10,10]
  sc.k0 = {10, 10, 10};
  const RunResult run = run_rolling_exact(sc);
  CHECK(run.terminated_by == Termination::divergence);
  CHECK(run.records.empty());
  CHECK(run.applied_gains.size() == 1);
  CHECK(run.trajectory.size() < 10);
}

TEST_CASE("run_scenario dispatches on mode") {
  Scenario sc = example_scenario(RunMode::rolling_exact, 10);
  CHECK(run_scenario(sc).terminated_by == Termination::gain_fixed_point);
  sc.mode = RunMode::rolling_sysid;
  CHECK_FALSE(run_scenario(sc).records.empty());
  CHECK_THROWS_AS(run_rolling_sysid(example_scenario(RunMode::rolling_exact, 10)),
                  std::invalid_argument);
}

TEST_CASE("mode and termination names") {
  CHECK(mode_name(RunMode::rolling_sysid) == "rolling_sysid");
  CHECK(mode_from_name("canonical") == RunMode::canonical);
  CHECK_FALSE(mode_from_name("bogus").has_value());
  CHECK(termination_name(Termination::divergence) == "divergence");
}
