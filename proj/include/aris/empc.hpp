#pragma once

#include <Eigen/Dense>
#include <vector>

#include "aris/flight.hpp"
#include "aris/scenario.hpp"
#include "aris/solver_settings.hpp"

namespace aris {

// One receding-horizon subproblem: from state x0 with steps_remaining mission
// steps left, optimize the next `horizon` accelerations
// (horizon = min(cfg.horizon, steps_remaining)).
struct HorizonProblem {
  State x0;
  int steps_remaining = 0;
  int horizon = 0;
  const ScenarioConfig* cfg = nullptr;
  const UserSet* users = nullptr;
};

HorizonProblem make_horizon_problem(const State& x0, int steps_remaining,
                                    const ScenarioConfig& cfg, const UserSet& users);

// Energy efficiency of the horizon (bits per joule): transmitted bits with
// least-squares phases at every predicted position, divided by propulsion
// energy plus the horizon's kinetic end correction.  Throws std::domain_error
// on stall speeds or non-positive energy.
double horizon_objective(const HorizonProblem& hp, const ControlSequence& controls);

struct IterationRecord {
  int iter = 0;
  double objective = 0.0;   // raw energy efficiency (bits/J) at the iterate
  double penalized = 0.0;   // objective minus penalty terms
  double grad_norm = 0.0;   // finite-difference gradient norm of the penalized objective
  double penalty = 0.0;     // terminal penalty weight in effect
  double res_speed = 0.0;   // worst speed-bound violation (m/s)
  double res_terminal = 0.0;  // arrival / reachability residual (m)
};

struct IterationLog {
  int outer_step = 0;  // closed-loop step the solve belongs to
  std::vector<IterationRecord> iters;
};

struct SolveResult {
  ControlSequence controls;
  IterationLog log;
  bool feasible = true;
  double res_speed = 0.0;
  double res_terminal = 0.0;
};

// Maximize the horizon objective over acceleration sequences with projected
// gradient ascent: accelerations are projected onto the a_max ball exactly,
// speed bounds and the terminal condition enter as quadratic penalties whose
// weights grow by penalty_growth until the residuals meet tolerance.
// Gradients come from central finite differences; the line search only
// accepts strict improvements, so the penalized value is monotone within a
// penalty level.  Mid-flight horizons use a reachability residual
// max(0, dist(target) - v_max * dt * (steps_remaining - horizon)); horizons
// that reach the mission end use the arrival distance itself.
// A null/empty warm start means zero accelerations.  With max_iters == 0 the
// warm start is returned unchanged (after feasibility evaluation).
SolveResult solve_horizon(const HorizonProblem& hp, const SolverSettings& settings,
                          const ControlSequence* warm = nullptr);

struct RunResult {
  TrajectoryLog trajectory;
  std::vector<IterationLog> iteration_logs;  // one per solve
};

// Closed-loop mission: at each step solve the horizon problem (warm-started
// by shifting the previous solution), apply the first acceleration, advance.
// When horizon == num_steps this degenerates to a single open-loop solve
// applied wholesale.  Throws InfeasibleError (with the step index) when a
// solve exhausts its penalty schedule or the flown path violates constraints.
RunResult run_receding_horizon(const ScenarioConfig& cfg, const UserSet& users,
                               const ControlSequence* initial_warm = nullptr);

}  // namespace aris
