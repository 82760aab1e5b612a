#include "aris/empc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "aris/errors.hpp"
#include "aris/phase_opt.hpp"

namespace aris {
namespace {

// Fit a warm start to the requested length: truncate or pad with zeros.
ControlSequence fit_length(const ControlSequence& src, int len) {
  ControlSequence out(src.begin(), src.begin() + std::min<size_t>(src.size(), len));
  while (static_cast<int>(out.size()) < len) out.emplace_back(0.0, 0.0);
  return out;
}

// Project every acceleration onto the a_max ball (exactly; re-scale once more
// if rounding left the norm a hair above the limit).
void project_controls(ControlSequence& controls, double a_max) {
  for (Eigen::Vector2d& a : controls) {
    double n = a.norm();
    while (n > a_max) {
      a *= a_max / n;
      n = a.norm();
    }
  }
}

// Guarded evaluation of one candidate: raw energy efficiency plus penalty
// bookkeeping.  Propulsion speed is floored at v_min/2 so finite-difference
// probes that graze the stall bound stay finite; the speed penalty pushes
// iterates back above v_min.
struct Evaluation {
  bool valid = false;      // strict model domain (all speeds >= v_min, energy > 0)
  double ee = 0.0;         // bits/J, meaningful when energy > 0
  double penalized = -std::numeric_limits<double>::infinity();
  double res_over = 0.0;   // worst speed excess above v_max (m/s)
  double res_under = 0.0;  // worst speed deficit below v_min (m/s)
  double res_terminal = 0.0;  // arrival / reachability residual (m)
};

class HorizonEvaluator {
 public:
  HorizonEvaluator(const HorizonProblem& hp)
      : hp_(hp), cfg_(*hp.cfg), solver_(cfg_.num_ris_elements),
        final_leg_(hp.horizon == hp.steps_remaining),
        slack_(cfg_.v_max * cfg_.dt * (hp.steps_remaining - hp.horizon)) {}

  Evaluation eval(const ControlSequence& controls, double w_speed, double w_term) const {
    Evaluation ev;
    const std::vector<State> states = rollout(hp_.x0, controls, cfg_.dt);

    double power_sum = 0.0;
    bool stalled = false;
    for (size_t s = 0; s < controls.size(); ++s)
      power_sum += guarded_power(states[s].velocity, controls[s], stalled);
    const double kinetic = 0.5 * cfg_.uav_mass *
                           (states.back().velocity.squaredNorm() -
                            states.front().velocity.squaredNorm());
    const double energy = cfg_.dt * power_sum + kinetic;

    double speed_penalty = 0.0;
    for (size_t s = 1; s < states.size(); ++s) {
      const double speed = states[s].velocity.norm();
      const double over = std::max(0.0, speed - cfg_.v_max);
      const double under = std::max(0.0, cfg_.v_min - speed);
      speed_penalty += over * over + under * under;
      ev.res_over = std::max(ev.res_over, over);
      ev.res_under = std::max(ev.res_under, under);
    }
    {
      // The start state is given, but its speed still decides model validity.
      const double speed0 = states.front().velocity.norm();
      if (speed0 < cfg_.v_min) stalled = true;
    }

    const double dist = (cfg_.target_pos - states.back().position).norm();
    ev.res_terminal = final_leg_ ? dist : std::max(0.0, dist - slack_);

    if (energy <= 0.0) {
      // Deceleration made the kinetic credit eat the whole budget; the ratio
      // is meaningless there, so make the region strongly repellent.
      ev.valid = false;
      ev.ee = std::numeric_limits<double>::quiet_NaN();
      ev.penalized = -1e12 * (1.0 - energy);
      return ev;
    }

    double bits = 0.0;
    const double per_user_bw = cfg_.bandwidth / static_cast<double>(hp_.users->positions.size());
    for (size_t s = 0; s < controls.size(); ++s) {
      const ChannelState ch = build_channels(states[s].position, *hp_.users, cfg_, cfg_.rng_seed);
      const Eigen::VectorXd phases = solver_.solve(ch, cfg_);
      for (int k = 0; k < ch.num_users(); ++k)
        bits += cfg_.dt * per_user_bw * std::log2(1.0 + snr_closed_form(phases, k, ch, cfg_));
    }

    ev.ee = bits / energy;
    ev.valid = !stalled;
    ev.penalized = ev.ee - w_speed * speed_penalty - w_term * ev.res_terminal * ev.res_terminal;
    return ev;
  }

  bool final_leg() const { return final_leg_; }

 private:
  double guarded_power(const Eigen::Vector2d& v, const Eigen::Vector2d& a,
                       bool& stalled) const {
    double speed = v.norm();
    if (speed < cfg_.v_min) {
      stalled = true;
      speed = std::max(speed, 0.5 * cfg_.v_min);
    }
    const double along = (speed > 0.0) ? a.dot(v) / speed : 0.0;
    double centripetal_sq = a.squaredNorm() - along * along;
    if (centripetal_sq < 0.0) centripetal_sq = 0.0;
    return cfg_.energy_c1 * speed * speed * speed +
           (cfg_.energy_c2 / speed) * (1.0 + centripetal_sq / (cfg_.gravity * cfg_.gravity));
  }

  const HorizonProblem& hp_;
  const ScenarioConfig& cfg_;
  PhaseLsSolver solver_;
  bool final_leg_;
  double slack_;
};

}  // namespace

HorizonProblem make_horizon_problem(const State& x0, int steps_remaining,
                                    const ScenarioConfig& cfg, const UserSet& users) {
  HorizonProblem hp;
  hp.x0 = x0;
  hp.steps_remaining = steps_remaining;
  hp.horizon = std::min(cfg.horizon, steps_remaining);
  hp.cfg = &cfg;
  hp.users = &users;
  return hp;
}

double horizon_objective(const HorizonProblem& hp, const ControlSequence& controls) {
  if (static_cast<int>(controls.size()) != hp.horizon)
    throw std::invalid_argument("expected " + std::to_string(hp.horizon) +
                                " controls, got " + std::to_string(controls.size()));
  const ScenarioConfig& cfg = *hp.cfg;
  const std::vector<State> states = rollout(hp.x0, controls, cfg.dt);
  const double energy = total_energy(states, controls, cfg);  // throws below v_min
  if (energy <= 0.0)
    throw std::domain_error("horizon energy " + std::to_string(energy) +
                            " J is not positive");
  return total_bits(states, *hp.users, cfg).total / energy;
}

SolveResult solve_horizon(const HorizonProblem& hp, const SolverSettings& settings,
                          const ControlSequence* warm) {
  const ScenarioConfig& cfg = *hp.cfg;
  const int n = hp.horizon;
  const HorizonEvaluator evaluator(hp);

  SolveResult res;
  res.controls = warm ? fit_length(*warm, n)
                      : ControlSequence(n, Eigen::Vector2d::Zero());
  project_controls(res.controls, cfg.a_max);

  double w_speed = settings.penalty_weight_speed;
  double w_term = settings.penalty_weight_terminal;
  const double eps_over = settings.eps_limit * cfg.v_max;
  const double eps_under = settings.eps_limit * cfg.v_min;
  auto is_feasible = [&](const Evaluation& ev) {
    return ev.res_over <= eps_over && ev.res_under <= eps_under &&
           ev.res_terminal <= settings.eps_pos;
  };

  Evaluation cur = evaluator.eval(res.controls, w_speed, w_term);
  int iter = 0;
  auto log_row = [&](double grad_norm) {
    IterationRecord rec;
    rec.iter = iter;
    rec.objective = cur.valid ? cur.ee : std::numeric_limits<double>::quiet_NaN();
    rec.penalized = cur.penalized;
    rec.grad_norm = grad_norm;
    rec.penalty = w_term;
    rec.res_speed = std::max(cur.res_over, cur.res_under);
    rec.res_terminal = cur.res_terminal;
    res.log.iters.push_back(rec);
  };

  constexpr int kMaxEpochs = 10;
  constexpr double kMinStep = 1e-7;
  for (int epoch = 0; epoch < kMaxEpochs; ++epoch) {
    cur = evaluator.eval(res.controls, w_speed, w_term);
    if (epoch == 0) log_row(0.0);
    double trial_step = settings.step_init;

    for (int it = 0; it < settings.max_iters; ++it) {
      // Central finite differences of the penalized objective, fixed order.
      Eigen::VectorXd grad(2 * n);
      ControlSequence probe = res.controls;
      for (int s = 0; s < n; ++s) {
        for (int axis = 0; axis < 2; ++axis) {
          const double saved = probe[s][axis];
          probe[s][axis] = saved + settings.fd_epsilon;
          const double up = evaluator.eval(probe, w_speed, w_term).penalized;
          probe[s][axis] = saved - settings.fd_epsilon;
          const double down = evaluator.eval(probe, w_speed, w_term).penalized;
          probe[s][axis] = saved;
          grad[2 * s + axis] = (up - down) / (2.0 * settings.fd_epsilon);
        }
      }
      const double grad_norm = grad.norm();
      if (grad_norm < settings.grad_tol) {
        ++iter;
        log_row(grad_norm);
        break;
      }

      // Backtracking line search along the normalized ascent direction;
      // accept only strict improvement of the penalized value.
      bool improved = false;
      for (double t = trial_step; t >= kMinStep; t *= 0.5) {
        ControlSequence cand = res.controls;
        for (int s = 0; s < n; ++s) {
          cand[s].x() += t * grad[2 * s] / grad_norm;
          cand[s].y() += t * grad[2 * s + 1] / grad_norm;
        }
        project_controls(cand, cfg.a_max);
        const Evaluation ev = evaluator.eval(cand, w_speed, w_term);
        if (ev.penalized > cur.penalized) {
          res.controls = std::move(cand);
          cur = ev;
          trial_step = std::min(2.0 * t, 4.0 * settings.step_init);
          improved = true;
          break;
        }
      }
      ++iter;
      log_row(grad_norm);
      if (!improved) break;  // no ascent left at this penalty level
    }

    if (is_feasible(cur)) break;
    if (settings.max_iters == 0) break;  // caller asked for the warm start as-is
    w_speed *= settings.penalty_growth;
    w_term *= settings.penalty_growth;
  }

  res.feasible = is_feasible(cur) && cur.valid;
  res.res_speed = std::max(cur.res_over, cur.res_under);
  res.res_terminal = cur.res_terminal;
  return res;
}

RunResult run_receding_horizon(const ScenarioConfig& cfg, const UserSet& users,
                               const ControlSequence* initial_warm) {
  const State x0{cfg.initial_velocity, cfg.start_pos};
  ControlSequence applied;
  std::vector<IterationLog> logs;

  auto solve_or_throw = [&](const HorizonProblem& hp, const ControlSequence& warm,
                            int outer_step) {
    SolveResult res = solve_horizon(hp, cfg.solver, &warm);
    res.log.outer_step = outer_step;
    if (!res.feasible)
      throw InfeasibleError(
          "no feasible control sequence at step " + std::to_string(outer_step) +
              " after penalty escalation (speed residual " + std::to_string(res.res_speed) +
              " m/s, terminal residual " + std::to_string(res.res_terminal) + " m)",
          outer_step);
    return res;
  };

  if (cfg.horizon == cfg.num_steps) {
    // Degenerate receding horizon: one open-loop solve applied wholesale.
    const HorizonProblem hp = make_horizon_problem(x0, cfg.num_steps, cfg, users);
    const ControlSequence warm = initial_warm
                                     ? fit_length(*initial_warm, hp.horizon)
                                     : ControlSequence(hp.horizon, Eigen::Vector2d::Zero());
    SolveResult res = solve_or_throw(hp, warm, 0);
    applied = std::move(res.controls);
    logs.push_back(std::move(res.log));
  } else {
    State x = x0;
    ControlSequence prev;
    for (int l = 0; l < cfg.num_steps; ++l) {
      const HorizonProblem hp = make_horizon_problem(x, cfg.num_steps - l, cfg, users);
      ControlSequence warm;
      if (l == 0) {
        warm = initial_warm ? fit_length(*initial_warm, hp.horizon)
                            : ControlSequence(hp.horizon, Eigen::Vector2d::Zero());
      } else {
        warm = fit_length(ControlSequence(prev.begin() + 1, prev.end()), hp.horizon);
      }
      SolveResult res = solve_or_throw(hp, warm, l);
      prev = res.controls;
      applied.push_back(res.controls.front());
      x = step(x, res.controls.front(), cfg.dt);
      logs.push_back(std::move(res.log));
    }
  }

  TrajectoryLog traj = build_trajectory_log(x0, applied, users, cfg);
  const std::vector<State> states = rollout(x0, applied, cfg.dt);
  if (auto violations = check_constraints(states, applied, cfg); !violations.empty()) {
    std::string msg = "closed-loop trajectory violates constraints:";
    for (const auto& v : violations) msg += "\n  - " + v;
    throw InfeasibleError(msg);
  }
  return {std::move(traj), std::move(logs)};
}

}  // namespace aris
