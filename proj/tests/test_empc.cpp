#include <cmath>

#include "aris/empc.hpp"
#include "aris/errors.hpp"
#include "aris/flight.hpp"
#include "aris/scenario.hpp"
#include "doctest.h"

using namespace aris;

namespace {

// Fast six-user mission used where the full default scenario would be slow.
ScenarioConfig small_mission() {
  ScenarioConfig cfg;
  cfg.num_ris_elements = 8;
  cfg.num_bs_antennas = 2;
  cfg.clusters.centers = {{100.0, 60.0}, {-80.0, 180.0}};
  cfg.clusters.counts = {3, 3};
  cfg.clusters.spreads = {20.0, 20.0};
  cfg.num_users = 6;
  cfg.dt = 2.0;
  cfg.num_steps = 4;
  cfg.horizon = 2;
  cfg.start_pos = {0.0, 0.0};
  cfg.target_pos = {0.0, 240.0};
  cfg.initial_velocity = {0.0, 30.0};
  cfg.rng_seed = 7;
  return cfg;
}

}  // namespace

TEST_CASE("horizon objective reference values on the default mission") {
  const ScenarioConfig cfg;
  const UserSet users = materialize_users(cfg);
  const State x0{cfg.initial_velocity, cfg.start_pos};

  // Final-leg single step, no acceleration: one cruise interval.
  const HorizonProblem hp1 = make_horizon_problem(x0, 1, cfg, users);
  CHECK(hp1.horizon == 1);
  const double h1 = horizon_objective(hp1, ControlSequence(1, Eigen::Vector2d::Zero()));
  CHECK(h1 == doctest::Approx(0.90110197948313009).epsilon(1e-9));
  CHECK(h1 > 0.0);

  // Full five-step lookahead from the start.
  const HorizonProblem hp5 = make_horizon_problem(x0, cfg.num_steps, cfg, users);
  CHECK(hp5.horizon == 5);
  const double h5 = horizon_objective(hp5, ControlSequence(5, Eigen::Vector2d::Zero()));
  CHECK(h5 == doctest::Approx(1.7840848594931655).epsilon(1e-9));
}

TEST_CASE("horizon objective validates the control-sequence length") {
  const ScenarioConfig cfg;
  const UserSet users = materialize_users(cfg);
  const HorizonProblem hp =
      make_horizon_problem({cfg.initial_velocity, cfg.start_pos}, cfg.num_steps, cfg, users);
  CHECK_THROWS_AS(horizon_objective(hp, ControlSequence(3, Eigen::Vector2d::Zero())),
                  std::invalid_argument);
}

TEST_CASE("scaling transmit power raises the horizon objective") {
  ScenarioConfig cfg;
  const UserSet users = materialize_users(cfg);
  const State x0{cfg.initial_velocity, cfg.start_pos};
  const ControlSequence zeros(5, Eigen::Vector2d::Zero());
  const HorizonProblem hp = make_horizon_problem(x0, cfg.num_steps, cfg, users);
  const double base = horizon_objective(hp, zeros);

  ScenarioConfig boosted = cfg;
  boosted.tx_power_per_user *= 4.0;
  const HorizonProblem hp4 = make_horizon_problem(x0, cfg.num_steps, boosted, users);
  CHECK(horizon_objective(hp4, zeros) > base);
}

TEST_CASE("horizon objective does not depend on the carrier-phase seed") {
  ScenarioConfig cfg = small_mission();
  const UserSet users = materialize_users(cfg);  // fixed user draw
  const State x0{cfg.initial_velocity, cfg.start_pos};
  const ControlSequence zeros(2, Eigen::Vector2d::Zero());

  const HorizonProblem a = make_horizon_problem(x0, cfg.num_steps, cfg, users);
  ScenarioConfig reseeded = cfg;
  reseeded.rng_seed = 4242;  // only the carrier phases change for fixed users
  const HorizonProblem b = make_horizon_problem(x0, cfg.num_steps, reseeded, users);
  CHECK(horizon_objective(a, zeros) ==
        doctest::Approx(horizon_objective(b, zeros)).epsilon(1e-12));
}

TEST_CASE("an enormous gradient tolerance returns the warm start unchanged") {
  ScenarioConfig cfg = small_mission();
  cfg.solver.grad_tol = 1e12;
  const UserSet users = materialize_users(cfg);
  const HorizonProblem hp =
      make_horizon_problem({cfg.initial_velocity, cfg.start_pos}, cfg.num_steps, cfg, users);
  const SolveResult res = solve_horizon(hp, cfg.solver);
  REQUIRE(res.controls.size() == 2);
  for (const auto& a : res.controls) CHECK(a == Eigen::Vector2d::Zero());
  CHECK_FALSE(res.log.iters.empty());
}

TEST_CASE("max_iters = 0 passes the warm start through") {
  ScenarioConfig cfg = small_mission();
  cfg.solver.max_iters = 0;
  const UserSet users = materialize_users(cfg);
  const HorizonProblem hp =
      make_horizon_problem({cfg.initial_velocity, cfg.start_pos}, cfg.num_steps, cfg, users);
  const ControlSequence warm{Eigen::Vector2d(0.5, -0.25), Eigen::Vector2d(0.1, 0.2)};
  const SolveResult res = solve_horizon(hp, cfg.solver, &warm);
  REQUIRE(res.controls.size() == warm.size());
  for (size_t i = 0; i < warm.size(); ++i) CHECK(res.controls[i] == warm[i]);
}

TEST_CASE("solving the default first window improves on the zero warm start") {
  const ScenarioConfig cfg;
  const UserSet users = materialize_users(cfg);
  const State x0{cfg.initial_velocity, cfg.start_pos};
  const HorizonProblem hp = make_horizon_problem(x0, cfg.num_steps, cfg, users);
  const SolveResult res = solve_horizon(hp, cfg.solver);

  const double solved = horizon_objective(hp, res.controls);
  const double warm = horizon_objective(hp, ControlSequence(5, Eigen::Vector2d::Zero()));
  CHECK(solved >= warm);
  // Frozen regression value for the deterministic solver on this window.
  CHECK(solved == doctest::Approx(106.72676727433839).epsilon(1e-9));

  // Projection keeps every accepted iterate inside the acceleration ball.
  for (const auto& a : res.controls) CHECK(a.norm() <= cfg.a_max + 1e-12);

  // Within one penalty level the accepted penalized value never decreases.
  for (size_t i = 1; i < res.log.iters.size(); ++i) {
    const auto& prev = res.log.iters[i - 1];
    const auto& cur = res.log.iters[i];
    if (prev.penalty == cur.penalty) CHECK(cur.penalized >= prev.penalized - 1e-12);
  }
}

TEST_CASE("receding-horizon runs are bit-for-bit deterministic") {
  const ScenarioConfig cfg = small_mission();
  const UserSet users = materialize_users(cfg);
  const RunResult a = run_receding_horizon(cfg, users);
  const RunResult b = run_receding_horizon(cfg, users);

  REQUIRE(a.trajectory.steps.size() == b.trajectory.steps.size());
  for (size_t s = 0; s < a.trajectory.steps.size(); ++s) {
    CHECK(a.trajectory.steps[s].state.position == b.trajectory.steps[s].state.position);
    CHECK(a.trajectory.steps[s].accel == b.trajectory.steps[s].accel);
  }
  CHECK(a.trajectory.total_bits == b.trajectory.total_bits);
  CHECK(a.trajectory.total_energy == b.trajectory.total_energy);

  // One solver log per closed-loop step, labeled in order.
  REQUIRE(a.iteration_logs.size() == 4);
  for (int l = 0; l < 4; ++l) CHECK(a.iteration_logs[l].outer_step == l);
}

TEST_CASE("a full-length horizon degenerates to one open-loop solve") {
  ScenarioConfig cfg = small_mission();
  cfg.horizon = cfg.num_steps;
  const UserSet users = materialize_users(cfg);
  const RunResult rr = run_receding_horizon(cfg, users);
  REQUIRE(rr.iteration_logs.size() == 1);

  // The closed loop applied exactly the one solved sequence.
  const State x0{cfg.initial_velocity, cfg.start_pos};
  const HorizonProblem hp = make_horizon_problem(x0, cfg.num_steps, cfg, users);
  const SolveResult sr = solve_horizon(hp, cfg.solver);
  const TrajectoryLog manual = build_trajectory_log(x0, sr.controls, users, cfg);
  REQUIRE(manual.steps.size() == rr.trajectory.steps.size());
  for (size_t s = 0; s < manual.steps.size(); ++s) {
    CHECK(manual.steps[s].accel == rr.trajectory.steps[s].accel);
    CHECK(manual.steps[s].state.position == rr.trajectory.steps[s].state.position);
  }
  CHECK(manual.ee == rr.trajectory.ee);
}

TEST_CASE("frozen solver reproduces the straight baseline exactly") {
  ScenarioConfig cfg = small_mission();
  cfg.horizon = cfg.num_steps;   // single solve applied wholesale
  cfg.solver.max_iters = 0;      // keep the warm start
  const UserSet users = materialize_users(cfg);
  const ControlSequence warm = baseline_constant_acceleration(cfg);
  const RunResult rr = run_receding_horizon(cfg, users, &warm);

  const TrajectoryLog base = build_trajectory_log(
      {cfg.initial_velocity, cfg.start_pos}, warm, users, cfg);
  CHECK(rr.trajectory.ee == base.ee);  // identical flights, identical ratio
  CHECK(rr.trajectory.total_bits == base.total_bits);
  CHECK(rr.trajectory.final_state.position == base.final_state.position);
}

TEST_CASE("an unreachable window reports infeasibility with the step index") {
  ScenarioConfig cfg = small_mission();
  cfg.target_pos = {0.0, 10000.0};  // far beyond one step's reach
  cfg.num_steps = 1;
  cfg.horizon = 1;
  const UserSet users = materialize_users(cfg);

  const HorizonProblem hp =
      make_horizon_problem({cfg.initial_velocity, cfg.start_pos}, 1, cfg, users);
  const SolveResult res = solve_horizon(hp, cfg.solver);
  CHECK_FALSE(res.feasible);
  CHECK(res.res_terminal > cfg.solver.eps_pos);

  try {
    run_receding_horizon(cfg, users);
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    CHECK(e.step == 0);
  }
}
