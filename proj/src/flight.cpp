#include "aris/flight.hpp"

#include <cmath>
#include <stdexcept>

#include "aris/errors.hpp"
#include "aris/phase_opt.hpp"

namespace aris {

State step(const State& x, const Eigen::Vector2d& accel, double dt) {
  State out;
  out.velocity = x.velocity + accel * dt;
  out.position = x.position + x.velocity * dt + 0.5 * accel * dt * dt;
  return out;
}

std::vector<State> rollout(const State& x0, const ControlSequence& controls, double dt) {
  std::vector<State> states;
  states.reserve(controls.size() + 1);
  states.push_back(x0);
  for (const Eigen::Vector2d& a : controls) states.push_back(step(states.back(), a, dt));
  return states;
}

State closed_form_state(const State& x0, const ControlSequence& controls, int s, double dt) {
  // Per axis, x = (v, q) evolves as x[s] = W^s x0 + sum_k W^k Z a[s-1-k].
  Eigen::Matrix2d w;
  w << 1.0, 0.0,
       dt,  1.0;
  const Eigen::Vector2d z(dt, 0.5 * dt * dt);

  Eigen::Matrix2d w_pow = Eigen::Matrix2d::Identity();
  std::vector<Eigen::Matrix2d> powers(s + 1);
  for (int k = 0; k <= s; ++k) {
    powers[k] = w_pow;
    w_pow = w * w_pow;
  }

  Eigen::Vector2d xs_x = powers[s] * Eigen::Vector2d(x0.velocity.x(), x0.position.x());
  Eigen::Vector2d xs_y = powers[s] * Eigen::Vector2d(x0.velocity.y(), x0.position.y());
  for (int k = 0; k < s; ++k) {
    const Eigen::Vector2d wz = powers[k] * z;
    xs_x += wz * controls[s - 1 - k].x();
    xs_y += wz * controls[s - 1 - k].y();
  }
  State out;
  out.velocity = {xs_x[0], xs_y[0]};
  out.position = {xs_x[1], xs_y[1]};
  return out;
}

double propulsion_power(const Eigen::Vector2d& v, const Eigen::Vector2d& a,
                        const ScenarioConfig& cfg) {
  const double speed = v.norm();
  if (speed < cfg.v_min)
    throw std::domain_error("propulsion model undefined below v_min (speed = " +
                            std::to_string(speed) + " m/s)");
  const double along = a.dot(v) / speed;
  double centripetal_sq = a.squaredNorm() - along * along;
  if (centripetal_sq < 0.0) centripetal_sq = 0.0;  // round-off guard, exact for a || v
  return cfg.energy_c1 * speed * speed * speed +
         (cfg.energy_c2 / speed) * (1.0 + centripetal_sq / (cfg.gravity * cfg.gravity));
}

double total_energy(const std::vector<State>& states, const ControlSequence& controls,
                    const ScenarioConfig& cfg) {
  if (states.size() != controls.size() + 1)
    throw std::invalid_argument("total_energy: need one more state than control");
  double sum = 0.0;
  for (size_t s = 0; s < controls.size(); ++s)
    sum += cfg.dt * propulsion_power(states[s].velocity, controls[s], cfg);
  const double kinetic = 0.5 * cfg.uav_mass * (states.back().velocity.squaredNorm() -
                                               states.front().velocity.squaredNorm());
  return sum + kinetic;
}

BitsResult total_bits(const std::vector<State>& states, const UserSet& users,
                      const ScenarioConfig& cfg, const PhaseRule& phase_rule) {
  const int K = static_cast<int>(users.positions.size());
  BitsResult out;
  out.per_user = Eigen::VectorXd::Zero(K);
  const double per_user_bw = cfg.bandwidth / static_cast<double>(K);

  PhaseLsSolver solver(cfg.num_ris_elements);
  // Each control interval transmits from its starting position.
  for (size_t s = 0; s + 1 < states.size(); ++s) {
    const ChannelState ch = build_channels(states[s].position, users, cfg, cfg.rng_seed);
    const Eigen::VectorXd phases = phase_rule ? phase_rule(ch) : solver.solve(ch, cfg);
    for (int k = 0; k < K; ++k) {
      const double snr = snr_closed_form(phases, k, ch, cfg);
      out.per_user[k] += cfg.dt * per_user_bw * std::log2(1.0 + snr);
    }
  }
  out.total = out.per_user.sum();
  return out;
}

double energy_efficiency(const std::vector<State>& states, const ControlSequence& controls,
                         const UserSet& users, const ScenarioConfig& cfg,
                         const PhaseRule& phase_rule) {
  const double energy = total_energy(states, controls, cfg);
  if (energy <= 0.0)
    throw std::domain_error("energy efficiency undefined: total energy " +
                            std::to_string(energy) + " J is not positive");
  return total_bits(states, users, cfg, phase_rule).total / energy;
}

ControlSequence baseline_constant_acceleration(const ScenarioConfig& cfg) {
  const double t_total = cfg.num_steps * cfg.dt;
  const Eigen::Vector2d accel =
      2.0 * (cfg.target_pos - cfg.start_pos - cfg.initial_velocity * t_total) /
      (t_total * t_total);
  ControlSequence controls(cfg.num_steps, accel);

  const State x0{cfg.initial_velocity, cfg.start_pos};
  const std::vector<State> states = rollout(x0, controls, cfg.dt);
  if (auto violations = check_constraints(states, controls, cfg); !violations.empty()) {
    std::string msg = "baseline flight infeasible:";
    for (const auto& v : violations) msg += "\n  - " + v;
    throw InfeasibleError(msg);
  }
  return controls;
}

std::vector<std::string> check_constraints(const std::vector<State>& states,
                                           const ControlSequence& controls,
                                           const ScenarioConfig& cfg) {
  std::vector<std::string> out;
  const double eps_v = cfg.solver.eps_limit * cfg.v_max;
  const double eps_vmin = cfg.solver.eps_limit * cfg.v_min;
  const double eps_a = cfg.solver.eps_limit * cfg.a_max;

  for (size_t s = 0; s < states.size(); ++s) {
    const double speed = states[s].velocity.norm();
    if (speed > cfg.v_max + eps_v)
      out.push_back("step " + std::to_string(s) + ": speed " + std::to_string(speed) +
                    " m/s exceeds v_max " + std::to_string(cfg.v_max));
    if (speed < cfg.v_min - eps_vmin)
      out.push_back("step " + std::to_string(s) + ": speed " + std::to_string(speed) +
                    " m/s below v_min " + std::to_string(cfg.v_min));
  }
  for (size_t s = 0; s < controls.size(); ++s) {
    const double mag = controls[s].norm();
    if (mag > cfg.a_max + eps_a)
      out.push_back("step " + std::to_string(s) + ": acceleration " + std::to_string(mag) +
                    " m/s^2 exceeds a_max " + std::to_string(cfg.a_max));
  }
  if (!states.empty()) {
    const double terminal = (states.back().position - cfg.target_pos).norm();
    if (terminal > cfg.solver.eps_pos)
      out.push_back("terminal position error " + std::to_string(terminal) +
                    " m exceeds tolerance " + std::to_string(cfg.solver.eps_pos));
  }
  return out;
}

TrajectoryLog build_trajectory_log(const State& x0, const ControlSequence& controls,
                                   const UserSet& users, const ScenarioConfig& cfg) {
  const std::vector<State> states = rollout(x0, controls, cfg.dt);
  const int K = static_cast<int>(users.positions.size());
  const double per_user_bw = cfg.bandwidth / static_cast<double>(K);
  PhaseLsSolver solver(cfg.num_ris_elements);

  TrajectoryLog log;
  log.per_user_bits = Eigen::VectorXd::Zero(K);
  log.steps.reserve(controls.size());
  for (size_t s = 0; s < controls.size(); ++s) {
    StepRecord rec;
    rec.state = states[s];
    rec.accel = controls[s];
    const ChannelState ch = build_channels(states[s].position, users, cfg, cfg.rng_seed);
    rec.phases = solver.solve(ch, cfg);
    rec.snr.resize(K);
    rec.bits.resize(K);
    for (int k = 0; k < K; ++k) {
      rec.snr[k] = snr_closed_form(rec.phases, k, ch, cfg);
      rec.bits[k] = cfg.dt * per_user_bw * std::log2(1.0 + rec.snr[k]);
    }
    rec.step_bits = rec.bits.sum();
    rec.step_energy = cfg.dt * propulsion_power(states[s].velocity, controls[s], cfg);
    log.per_user_bits += rec.bits;
    log.total_bits += rec.step_bits;
    log.total_energy += rec.step_energy;
    log.steps.push_back(std::move(rec));
  }
  log.final_state = states.back();
  log.kinetic_term = 0.5 * cfg.uav_mass * (states.back().velocity.squaredNorm() -
                                           states.front().velocity.squaredNorm());
  log.total_energy += log.kinetic_term;
  log.ee = log.total_bits / log.total_energy;
  return log;
}

}  // namespace aris
