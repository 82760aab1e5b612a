#include "aris/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "aris/errors.hpp"
#include "aris/phase_opt.hpp"

namespace aris {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << content;
}

double terminal_error(const TrajectoryLog& log, const ScenarioConfig& cfg) {
  return (log.final_state.position - cfg.target_pos).norm();
}

double min_path_distance(const TrajectoryLog& log, const Eigen::Vector2d& point) {
  double best = (log.final_state.position - point).norm();
  for (const StepRecord& rec : log.steps)
    best = std::min(best, (rec.state.position - point).norm());
  return best;
}

}  // namespace

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

RunReport run_scenario(const ScenarioConfig& cfg, const std::string& mode) {
  if (mode != "empc" && mode != "baseline")
    throw ConfigError("unknown mode '" + mode + "' (expected 'empc' or 'baseline')");

  RunReport rep;
  rep.scenario = cfg;
  rep.mode = mode;

  const UserSet users = materialize_users(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  if (mode == "baseline") {
    const ControlSequence controls = baseline_constant_acceleration(cfg);
    rep.log = build_trajectory_log({cfg.initial_velocity, cfg.start_pos}, controls, users, cfg);
  } else {
    RunResult rr = run_receding_horizon(cfg, users);
    rep.log = std::move(rr.trajectory);
    rep.iteration_logs = std::move(rr.iteration_logs);
  }
  const auto t1 = std::chrono::steady_clock::now();

  rep.summary.mode = mode;
  rep.summary.seed = cfg.rng_seed;
  rep.summary.total_bits = rep.log.total_bits;
  rep.summary.total_energy = rep.log.total_energy;
  rep.summary.ee = rep.log.ee;
  rep.summary.terminal_error = terminal_error(rep.log, cfg);
  rep.summary.wall_time = std::chrono::duration<double>(t1 - t0).count();
  return rep;
}

void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryLog& log,
                          const ScenarioConfig& cfg) {
  std::ostringstream o;
  o << "step,t,qx,qy,vx,vy,ax,ay,step_energy_J,step_bits,ee_cum";
  const int K = static_cast<int>(log.per_user_bits.size());
  for (int k = 0; k < K; ++k) o << ",snr_u" << k;
  o << "\n";

  const double dt = cfg.dt;
  const double half_mass = 0.5 * cfg.uav_mass;
  const double v0_sq = log.steps.empty() ? log.final_state.velocity.squaredNorm()
                                         : log.steps.front().state.velocity.squaredNorm();
  // Cumulative energy includes the kinetic correction accrued so far, so the
  // last row's ee_cum equals the trajectory's overall bits/J.
  double cum_bits = 0.0;
  double cum_energy = 0.0;
  for (size_t s = 0; s < log.steps.size(); ++s) {
    const StepRecord& rec = log.steps[s];
    cum_bits += rec.step_bits;
    cum_energy += rec.step_energy;
    const Eigen::Vector2d v_next = (s + 1 < log.steps.size())
                                       ? log.steps[s + 1].state.velocity
                                       : log.final_state.velocity;
    const double kinetic = half_mass * (v_next.squaredNorm() - v0_sq);
    const double denom = cum_energy + kinetic;
    o << s << "," << format_g17(s * dt) << "," << format_g17(rec.state.position.x()) << ","
      << format_g17(rec.state.position.y()) << "," << format_g17(rec.state.velocity.x()) << ","
      << format_g17(rec.state.velocity.y()) << "," << format_g17(rec.accel.x()) << ","
      << format_g17(rec.accel.y()) << "," << format_g17(rec.step_energy) << ","
      << format_g17(rec.step_bits) << ","
      << (denom > 0.0 ? format_g17(cum_bits / denom) : "nan");
    for (int k = 0; k < K; ++k) o << "," << format_g17(rec.snr[k]);
    o << "\n";
  }
  write_text_file(path, o.str());
}

void write_iterations_csv(const std::filesystem::path& path,
                          const std::vector<IterationLog>& logs) {
  std::ostringstream o;
  o << "outer_step,iter,objective,grad_norm,penalty\n";
  for (const IterationLog& log : logs)
    for (const IterationRecord& rec : log.iters)
      o << log.outer_step << "," << rec.iter << "," << format_g17(rec.objective) << ","
        << format_g17(rec.grad_norm) << "," << format_g17(rec.penalty) << "\n";
  write_text_file(path, o.str());
}

void write_summary(const std::filesystem::path& path, const RunReport& report) {
  std::ostringstream o;
  o << "mode = " << report.mode << "\n";
  o << "seed = " << report.summary.seed << "\n";
  o << "num_steps = " << report.scenario.num_steps << "\n";
  o << "total_bits = " << format_g17(report.summary.total_bits) << "\n";
  o << "total_energy_J = " << format_g17(report.summary.total_energy) << "\n";
  o << "ee_bits_per_joule = " << format_g17(report.summary.ee) << "\n";
  o << "terminal_error_m = " << format_g17(report.summary.terminal_error) << "\n";
  o << "\n--- scenario ---\n";
  o << serialize_config(report.scenario);
  write_text_file(path, o.str());
}

namespace {

ScenarioConfig apply_seed_override(ScenarioConfig cfg, bool has_seed, std::uint64_t seed) {
  if (has_seed) cfg.rng_seed = seed;
  return cfg;
}

void print_summary_line(const RunReport& rep) {
  std::cout << rep.mode << ": bits " << format_g17(rep.summary.total_bits) << ", energy "
            << format_g17(rep.summary.total_energy) << " J, ee "
            << format_g17(rep.summary.ee) << " bits/J, terminal error "
            << format_g17(rep.summary.terminal_error) << " m, wall time "
            << rep.summary.wall_time << " s\n";
}

}  // namespace

int cmd_run(const RunOptions& opt) {
  try {
    const ScenarioConfig cfg = apply_seed_override(load_config_file(opt.scenario_path),
                                                   opt.has_seed_override, opt.seed_override);
    const RunReport rep = run_scenario(cfg, opt.mode);

    std::filesystem::create_directories(opt.out_dir);
    const std::filesystem::path out(opt.out_dir);
    write_trajectory_csv(out / "trajectory.csv", rep.log, cfg);
    if (rep.mode == "empc") write_iterations_csv(out / "iterations.csv", rep.iteration_logs);
    write_summary(out / "summary.txt", rep);
    if (!opt.quiet) print_summary_line(rep);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_compare(const CompareOptions& opt) {
  try {
    const ScenarioConfig cfg = apply_seed_override(load_config_file(opt.scenario_path),
                                                   opt.has_seed_override, opt.seed_override);
    const RunReport empc = run_scenario(cfg, "empc");
    const RunReport base = run_scenario(cfg, "baseline");

    std::filesystem::create_directories(opt.out_dir);
    const std::filesystem::path out(opt.out_dir);
    write_trajectory_csv(out / "empc_trajectory.csv", empc.log, cfg);
    write_iterations_csv(out / "empc_iterations.csv", empc.iteration_logs);
    write_summary(out / "empc_summary.txt", empc);
    write_trajectory_csv(out / "baseline_trajectory.csv", base.log, cfg);
    write_summary(out / "baseline_summary.txt", base);

    const UserSet users = materialize_users(cfg);
    const std::vector<Eigen::Vector2d> centroids = cluster_centroids(users, cfg.clusters);

    std::ostringstream o;
    o << "ee_empc = " << format_g17(empc.summary.ee) << "\n";
    o << "ee_baseline = " << format_g17(base.summary.ee) << "\n";
    o << "ee_ratio = " << format_g17(empc.summary.ee / base.summary.ee) << "\n";
    o << "total_bits_empc = " << format_g17(empc.summary.total_bits) << "\n";
    o << "total_bits_baseline = " << format_g17(base.summary.total_bits) << "\n";
    o << "total_energy_empc_J = " << format_g17(empc.summary.total_energy) << "\n";
    o << "total_energy_baseline_J = " << format_g17(base.summary.total_energy) << "\n";
    o << "terminal_error_empc_m = " << format_g17(empc.summary.terminal_error) << "\n";
    o << "terminal_error_baseline_m = " << format_g17(base.summary.terminal_error) << "\n";
    for (size_t c = 0; c < centroids.size(); ++c) {
      o << "min_dist_cluster_" << c << "_empc_m = "
        << format_g17(min_path_distance(empc.log, centroids[c])) << "\n";
      o << "min_dist_cluster_" << c << "_baseline_m = "
        << format_g17(min_path_distance(base.log, centroids[c])) << "\n";
    }
    o << "\n[per_step_bit_gap]\n";
    o << "step,bits_empc,bits_baseline,gap\n";
    for (size_t s = 0; s < empc.log.steps.size(); ++s) {
      const double be = empc.log.steps[s].step_bits;
      const double bb = s < base.log.steps.size() ? base.log.steps[s].step_bits : 0.0;
      o << s << "," << format_g17(be) << "," << format_g17(bb) << "," << format_g17(be - bb)
        << "\n";
    }
    write_text_file(out / "comparison.txt", o.str());

    if (!opt.quiet) {
      print_summary_line(empc);
      print_summary_line(base);
      std::cout << "ee ratio (empc/baseline): "
                << format_g17(empc.summary.ee / base.summary.ee) << "\n";
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

namespace {

// Small synthetic scenario for the self-check suite.
ScenarioConfig synth_config(int n_elements, int m_antennas, int k_users, std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.num_ris_elements = n_elements;
  cfg.num_bs_antennas = m_antennas;
  cfg.clusters.centers = {{600.0, 700.0}};
  cfg.clusters.counts = {k_users};
  cfg.clusters.spreads = {220.0};
  cfg.num_users = k_users;
  cfg.rng_seed = seed;
  return cfg;
}

struct CheckReporter {
  bool quiet = false;
  bool all_ok = true;
  void operator()(bool ok, const std::string& name, const std::string& detail) {
    all_ok = all_ok && ok;
    if (!quiet || !ok)
      std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << " (" << detail << ")\n";
  }
};

}  // namespace

int cmd_validate(const ValidateOptions& opt) {
  try {
    CheckReporter check;
    check.quiet = opt.quiet;
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> pos(50.0, 1250.0);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);

    // Closed-form SNR against brute-force complex arithmetic.
    {
      double max_rel = 0.0;
      for (int n_elements : {2, 4, 8}) {
        for (int m_antennas : {1, 4}) {
          const ScenarioConfig cfg = synth_config(n_elements, m_antennas, 3, opt.seed);
          const UserSet users = materialize_users(cfg);
          std::uniform_int_distribution<int> pick_user(0, cfg.num_users - 1);
          for (int trial = 0; trial < 50; ++trial) {
            const Eigen::Vector2d q(pos(rng), pos(rng));
            const ChannelState ch = build_channels(q, users, cfg, opt.seed + trial);
            Eigen::VectorXd theta(n_elements);
            for (int i = 0; i < n_elements; ++i) theta[i] = angle(rng);
            const int k = pick_user(rng);
            const double direct = snr_direct(theta, k, ch, cfg);
            const double closed = snr_closed_form(theta, k, ch, cfg);
            max_rel = std::max(max_rel, std::abs(closed - direct) / std::max(direct, 1e-300));
          }
        }
      }
      check(max_rel <= 1e-9, "closed-form SNR matches direct evaluation",
            "max rel err " + format_g17(max_rel));
    }

    // Least-squares phases against grid search on the alignment objective.
    {
      bool beats_grid = true, attains_peak = true;
      std::string detail;
      for (int n_elements : {2, 3, 4}) {
        for (int k_users : {1, 3}) {
          const ScenarioConfig cfg = synth_config(n_elements, 4, k_users, opt.seed + 7);
          const UserSet users = materialize_users(cfg);
          const Eigen::Vector2d q(pos(rng), pos(rng));
          const ChannelState ch = build_channels(q, users, cfg, opt.seed);
          const PhaseLsSolver solver(n_elements);
          const Eigen::VectorXd theta_raw = solver.solve_unwrapped(ch, cfg);
          const double s_star = surrogate_objective(theta_raw, ch, cfg);

          // Exhaustive over the free phases (a common offset is unobservable,
          // so one element is pinned for the larger arrays).
          double grid_min = std::numeric_limits<double>::infinity();
          Eigen::VectorXd theta = Eigen::VectorXd::Zero(n_elements);
          if (n_elements == 2) {
            const int steps = 360;
            for (int i = 0; i < steps; ++i)
              for (int j = 0; j < steps; ++j) {
                theta[0] = i * kTwoPi / steps;
                theta[1] = j * kTwoPi / steps;
                grid_min = std::min(grid_min, surrogate_objective(theta, ch, cfg));
              }
          } else if (n_elements == 3) {
            const int steps = 180;
            for (int i = 0; i < steps; ++i)
              for (int j = 0; j < steps; ++j) {
                theta[1] = i * kTwoPi / steps;
                theta[2] = j * kTwoPi / steps;
                grid_min = std::min(grid_min, surrogate_objective(theta, ch, cfg));
              }
          } else {
            const int steps = 48;
            for (int i = 0; i < steps; ++i)
              for (int j = 0; j < steps; ++j)
                for (int l = 0; l < steps; ++l) {
                  theta[1] = i * kTwoPi / steps;
                  theta[2] = j * kTwoPi / steps;
                  theta[3] = l * kTwoPi / steps;
                  grid_min = std::min(grid_min, surrogate_objective(theta, ch, cfg));
                }
          }
          if (s_star > grid_min + 1e-9 * (1.0 + std::abs(grid_min))) {
            beats_grid = false;
            detail = "N=" + std::to_string(n_elements) + " K=" + std::to_string(k_users);
          }
          if (k_users == 1) {
            const WeightSet w = compute_weights(ch, cfg);
            const double peak = w.c[0] * n_elements * n_elements;
            const double snr = snr_closed_form(wrap_angles(theta_raw), 0, ch, cfg);
            if (std::abs(snr - peak) > 1e-9 * peak) attains_peak = false;
          }
        }
      }
      check(beats_grid, "least-squares phases beat grid search on the alignment objective",
            detail.empty() ? "N in {2,3,4}, K in {1,3}" : detail);
      check(attains_peak, "single-user phases attain the aligned SNR peak",
            "gain * c_1 * N^2 within 1e-9");
    }

    // Step recursion against the explicit linear-map rollout.
    {
      double max_err = 0.0;
      std::uniform_real_distribution<double> accel(-5.0, 5.0);
      for (int trial = 0; trial < 20; ++trial) {
        State x0;
        x0.velocity = {accel(rng), accel(rng)};
        x0.position = {10.0 * accel(rng), 10.0 * accel(rng)};
        ControlSequence controls;
        for (int s = 0; s < 10; ++s) controls.emplace_back(accel(rng), accel(rng));
        const double dt = 0.7;
        const std::vector<State> states = rollout(x0, controls, dt);
        for (int s = 0; s <= 10; ++s) {
          const State cf = closed_form_state(x0, controls, s, dt);
          max_err = std::max(max_err, (cf.position - states[s].position).cwiseAbs().maxCoeff());
          max_err = std::max(max_err, (cf.velocity - states[s].velocity).cwiseAbs().maxCoeff());
        }
      }
      check(max_err <= 1e-12, "state rollout matches the explicit linear map",
            "max abs err " + format_g17(max_err));
    }

    // Optional diagnostic: how much the simplified target vector loses.
    if (opt.paper_literal_b) {
      const ScenarioConfig cfg = synth_config(8, 4, 3, opt.seed + 11);
      const UserSet users = materialize_users(cfg);
      const Eigen::Vector2d q(pos(rng), pos(rng));
      const ChannelState ch = build_channels(q, users, cfg, opt.seed);
      const PhaseLsSolver solver(8);
      const Eigen::VectorXd full = solver.solve_unwrapped(ch, cfg, TargetConvention::BothAngles);
      const Eigen::VectorXd lit = solver.solve_unwrapped(ch, cfg, TargetConvention::UserAngleOnly);
      const double gap = surrogate_objective(lit, ch, cfg) - surrogate_objective(full, ch, cfg);
      std::cout << "diagnostic: user-angle-only surrogate gap = " << format_g17(gap)
                << " (>= 0 means the both-angle targets fit at least as well)\n";
    }

    return check.all_ok ? 0 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace aris
