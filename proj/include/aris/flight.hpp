#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "aris/channel.hpp"
#include "aris/scenario.hpp"

namespace aris {

// Planar double-integrator state at fixed altitude.
struct State {
  Eigen::Vector2d velocity{0.0, 0.0};
  Eigen::Vector2d position{0.0, 0.0};
};

using ControlSequence = std::vector<Eigen::Vector2d>;  // accelerations (m/s^2)

// One control interval with exact constant-acceleration integration:
//   v' = v + a*dt,  q' = q + v*dt + a*dt^2/2.
State step(const State& x, const Eigen::Vector2d& accel, double dt);

// States visited under a control sequence; element 0 is x0, element s is the
// state after s steps (length controls.size() + 1).
std::vector<State> rollout(const State& x0, const ControlSequence& controls, double dt);

// State after s steps evaluated through the explicit linear map
//   x[s] = W^s x0 + sum_k W^k Z a[s-1-k]
// (per axis, W = [[1,0],[dt,1]] on (v,q), Z = [dt, dt^2/2]).  Matches the
// step recursion exactly; kept as an independent cross-check.
State closed_form_state(const State& x0, const ControlSequence& controls, int s, double dt);

// Instantaneous propulsion power (W) of the fixed-wing platform:
//   c1*|v|^3 + (c2/|v|) * (1 + a_perp^2 / g^2),
// where a_perp^2 = |a|^2 - (a.v)^2/|v|^2 is the centripetal part.
// Throws std::domain_error when |v| < v_min (the model diverges at hover).
double propulsion_power(const Eigen::Vector2d& v, const Eigen::Vector2d& a,
                        const ScenarioConfig& cfg);

// Total consumed energy (J) over a rollout: sum of dt * power per step plus
// the kinetic-energy end correction m/2 * (|v_S|^2 - |v_0|^2).
double total_energy(const std::vector<State>& states, const ControlSequence& controls,
                    const ScenarioConfig& cfg);

// Phase profile applied at each visited position; defaults to the
// least-squares optimal phases.
using PhaseRule = std::function<Eigen::VectorXd(const ChannelState&)>;

struct BitsResult {
  double total = 0.0;         // bits over the whole rollout
  Eigen::VectorXd per_user;   // split per user, sums to total
};

// Transmitted data over a rollout: per step s (left endpoint of each control
// interval), each user gets dt * (bandwidth/K) * log2(1 + snr_k(q[s], theta)).
BitsResult total_bits(const std::vector<State>& states, const UserSet& users,
                      const ScenarioConfig& cfg, const PhaseRule& phase_rule = {});

// bits / energy (bits per joule).  Throws std::domain_error when the energy
// is not positive (the ratio stops being meaningful).
double energy_efficiency(const std::vector<State>& states, const ControlSequence& controls,
                         const UserSet& users, const ScenarioConfig& cfg,
                         const PhaseRule& phase_rule = {});

// The straight comparison flight: one constant acceleration meeting the
// target at the final step, a = 2*(target - start - v0*T)/T^2 with T = S*dt.
// Throws InfeasibleError when the resulting speeds or acceleration violate
// the platform limits.
ControlSequence baseline_constant_acceleration(const ScenarioConfig& cfg);

// Every constraint violation along a rollout: speed above v_max or below
// v_min (with tolerance eps_limit * limit), acceleration above a_max, and
// terminal position error above eps_pos.  Empty means feasible.
std::vector<std::string> check_constraints(const std::vector<State>& states,
                                           const ControlSequence& controls,
                                           const ScenarioConfig& cfg);

// Per-step record of a flown trajectory, for reporting.
struct StepRecord {
  State state;               // state at the start of the interval
  Eigen::Vector2d accel;
  Eigen::VectorXd phases;    // applied phase profile at state.position
  Eigen::VectorXd snr;       // per-user SNR at state.position
  Eigen::VectorXd bits;      // per-user bits over the interval
  double step_bits = 0.0;
  double step_energy = 0.0;  // dt * power, without the kinetic correction
};

struct TrajectoryLog {
  std::vector<StepRecord> steps;
  State final_state;
  double kinetic_term = 0.0;  // m/2 * (|v_S|^2 - |v_0|^2), part of total_energy
  double total_bits = 0.0;    // = sum of step_bits
  double total_energy = 0.0;  // = sum of step_energy + kinetic_term
  double ee = 0.0;            // total_bits / total_energy
  Eigen::VectorXd per_user_bits;
};

// Fly a control sequence and record everything (least-squares phases at every
// step).  The totals satisfy the identities noted on the fields.
TrajectoryLog build_trajectory_log(const State& x0, const ControlSequence& controls,
                                   const UserSet& users, const ScenarioConfig& cfg);

}  // namespace aris
