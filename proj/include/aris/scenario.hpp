#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "aris/errors.hpp"
#include "aris/solver_settings.hpp"

namespace aris {

// Ground users are generated in Gaussian clusters.  One entry per cluster,
// kept as parallel lists; counts must sum to the scenario's user count.
struct ClusterSpec {
  std::vector<Eigen::Vector2d> centers;  // cluster centers (m)
  std::vector<int> counts;               // users per cluster
  std::vector<double> spreads;           // per-cluster std-dev (m)

  int total_count() const;
};

struct UserSet {
  std::vector<Eigen::Vector3d> positions;  // ground users, z = 0
};

// Full description of one mission: radio front-end, flight limits, mission
// geometry, user layout and solver knobs.  Default values match the shipped
// scenarios/default.scn reference mission.
struct ScenarioConfig {
  // Radio front-end
  int num_ris_elements = 32;        // reflecting elements N (uniform linear array)
  int num_bs_antennas = 8;          // base-station antennas M (uniform linear array)
  int num_users = 30;               // ground users K
  double wavelength = 0.1;          // carrier wavelength (m)
  double elem_sep_ris = 0.05;       // RIS element separation (m), default wavelength/2
  double elem_sep_bs = 0.05;        // BS antenna separation (m), default wavelength/2
  double ref_path_loss = 6.3325739776461098e-05;  // channel gain at 1 m, default (wavelength/4pi)^2
  double tx_power_per_user = 1.0;   // transmit power per user (W)
  double bandwidth = 1.0e7;         // total bandwidth (Hz), shared equally across users
  double noise_power = 1.0e-13;     // receiver noise power (W)

  // Flight platform
  double energy_c1 = 9.26e-4;       // propulsion power coefficient (parasitic)
  double energy_c2 = 2250.0;        // propulsion power coefficient (induced)
  double gravity = 9.81;            // m/s^2
  double uav_mass = 2.0;            // kg, enters the kinetic-energy end correction
  double altitude = 150.0;          // fixed flight altitude L (m)
  double v_max = 50.0;              // speed ceiling (m/s)
  double v_min = 1.0;               // stall floor (m/s); propulsion model diverges at 0
  double a_max = 10.0;              // acceleration ceiling (m/s^2)

  // Mission
  double dt = 3.0;                  // control interval (s)
  int num_steps = 10;               // mission length S (steps)
  int horizon = 5;                  // lookahead S0 (steps), <= num_steps
  Eigen::Vector2d start_pos{500.0, 500.0};
  Eigen::Vector2d target_pos{500.0, 1200.0};
  Eigen::Vector2d initial_velocity{0.0, 30.0};  // default: 30 m/s toward the target
  std::uint64_t rng_seed = 1;

  ClusterSpec clusters;             // defaults to the reference 16/7/7 layout
  SolverSettings solver;

  ScenarioConfig();
};

// Parse a scenario from structured text (key = value lines, repeated
// [cluster] blocks, one optional [solver] block).  Missing fields take the
// documented defaults; derived defaults (element separations, reference path
// loss, initial velocity, user count) follow the fields they depend on.
// Throws ConfigError on syntax errors, unknown keys or violated invariants.
ScenarioConfig load_config(const std::string& text);
ScenarioConfig load_config_file(const std::filesystem::path& path);

// Serialize every field explicitly with 17 significant digits so that
// load(serialize(cfg)) reproduces cfg bit for bit.
std::string serialize_config(const ScenarioConfig& cfg);

// Returns human-readable descriptions of every violated invariant
// (empty when the configuration is valid).
std::vector<std::string> validate(const ScenarioConfig& cfg);

// Draw cluster users (isotropic Gaussian around each center, z = 0).
// Same spec and seed always produce the same set.
UserSet generate_users(const ClusterSpec& spec, std::uint64_t seed);

// generate_users for the scenario's own cluster spec and seed, with the
// user-count invariant checked.
UserSet materialize_users(const ScenarioConfig& cfg);

// Empirical centroid of each cluster's generated users (users are laid out
// cluster by cluster, so the counts partition the set).
std::vector<Eigen::Vector2d> cluster_centroids(const UserSet& users, const ClusterSpec& spec);

}  // namespace aris
