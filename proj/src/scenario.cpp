#include "aris/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

namespace aris {
namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_real(const std::string& v, int line, const std::string& key) {
  const std::string t = trim(v);
  double out = 0.0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc{} || p != t.data() + t.size())
    throw ConfigError("line " + std::to_string(line) + ": field '" + key +
                      "': cannot parse real value '" + t + "'");
  return out;
}

long long parse_int(const std::string& v, int line, const std::string& key) {
  const std::string t = trim(v);
  long long out = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc{} || p != t.data() + t.size())
    throw ConfigError("line " + std::to_string(line) + ": field '" + key +
                      "': cannot parse integer value '" + t + "'");
  return out;
}

Eigen::Vector2d parse_vec2(const std::string& v, int line, const std::string& key) {
  std::string t = trim(v);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']')
    throw ConfigError("line " + std::to_string(line) + ": field '" + key +
                      "': expected [x, y]");
  t = t.substr(1, t.size() - 2);
  size_t comma = t.find(',');
  if (comma == std::string::npos)
    throw ConfigError("line " + std::to_string(line) + ": field '" + key +
                      "': expected [x, y]");
  return {parse_real(t.substr(0, comma), line, key),
          parse_real(t.substr(comma + 1), line, key)};
}

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Cluster block under construction while parsing.
struct ClusterDraft {
  std::optional<Eigen::Vector2d> center;
  std::optional<int> count;
  double spread = 0.0;
  int line = 0;
};

}  // namespace

int ClusterSpec::total_count() const {
  return std::accumulate(counts.begin(), counts.end(), 0);
}

ScenarioConfig::ScenarioConfig() {
  // Reference user layout: one dominant cluster east of the flight line and
  // two smaller, more distant ones west of it.
  clusters.centers = {{680.0, 850.0}, {250.0, 600.0}, {280.0, 1120.0}};
  clusters.counts = {16, 7, 7};
  clusters.spreads = {40.0, 40.0, 40.0};
}

ScenarioConfig load_config(const std::string& text) {
  ScenarioConfig cfg;

  // Presence flags for fields whose defaults depend on other fields.
  bool has_sep_ris = false, has_sep_bs = false, has_ref_loss = false;
  bool has_init_vel = false, has_num_users = false, has_clusters = false;

  enum class Section { Top, Cluster, Solver };
  Section section = Section::Top;
  std::vector<ClusterDraft> drafts;

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (size_t hash = s.find('#'); hash != std::string::npos) s.erase(hash);
    s = trim(s);
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s == "[cluster]") {
        if (!has_clusters) {  // explicit clusters replace the default layout
          has_clusters = true;
          cfg.clusters = ClusterSpec{};
        }
        drafts.push_back(ClusterDraft{});
        drafts.back().line = line;
        section = Section::Cluster;
      } else if (s == "[solver]") {
        section = Section::Solver;
      } else {
        throw ConfigError("line " + std::to_string(line) + ": unknown section " + s);
      }
      continue;
    }

    size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line) + ": expected 'key = value', got '" + s + "'");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = s.substr(eq + 1);

    if (section == Section::Cluster) {
      ClusterDraft& d = drafts.back();
      if (key == "center") d.center = parse_vec2(val, line, key);
      else if (key == "count") d.count = static_cast<int>(parse_int(val, line, key));
      else if (key == "spread") d.spread = parse_real(val, line, key);
      else throw ConfigError("line " + std::to_string(line) + ": unknown cluster key '" + key + "'");
      continue;
    }
    if (section == Section::Solver) {
      SolverSettings& sv = cfg.solver;
      if (key == "max_iters") sv.max_iters = static_cast<int>(parse_int(val, line, key));
      else if (key == "grad_tol") sv.grad_tol = parse_real(val, line, key);
      else if (key == "step_init") sv.step_init = parse_real(val, line, key);
      else if (key == "penalty_weight_terminal") sv.penalty_weight_terminal = parse_real(val, line, key);
      else if (key == "penalty_weight_speed") sv.penalty_weight_speed = parse_real(val, line, key);
      else if (key == "penalty_growth") sv.penalty_growth = parse_real(val, line, key);
      else if (key == "fd_epsilon") sv.fd_epsilon = parse_real(val, line, key);
      else if (key == "eps_pos") sv.eps_pos = parse_real(val, line, key);
      else if (key == "eps_limit") sv.eps_limit = parse_real(val, line, key);
      else throw ConfigError("line " + std::to_string(line) + ": unknown solver key '" + key + "'");
      continue;
    }

    if (key == "num_ris_elements") cfg.num_ris_elements = static_cast<int>(parse_int(val, line, key));
    else if (key == "num_bs_antennas") cfg.num_bs_antennas = static_cast<int>(parse_int(val, line, key));
    else if (key == "num_users") { cfg.num_users = static_cast<int>(parse_int(val, line, key)); has_num_users = true; }
    else if (key == "wavelength") cfg.wavelength = parse_real(val, line, key);
    else if (key == "elem_sep_ris") { cfg.elem_sep_ris = parse_real(val, line, key); has_sep_ris = true; }
    else if (key == "elem_sep_bs") { cfg.elem_sep_bs = parse_real(val, line, key); has_sep_bs = true; }
    else if (key == "ref_path_loss") { cfg.ref_path_loss = parse_real(val, line, key); has_ref_loss = true; }
    else if (key == "tx_power_per_user") cfg.tx_power_per_user = parse_real(val, line, key);
    else if (key == "bandwidth") cfg.bandwidth = parse_real(val, line, key);
    else if (key == "noise_power") cfg.noise_power = parse_real(val, line, key);
    else if (key == "energy_c1") cfg.energy_c1 = parse_real(val, line, key);
    else if (key == "energy_c2") cfg.energy_c2 = parse_real(val, line, key);
    else if (key == "gravity") cfg.gravity = parse_real(val, line, key);
    else if (key == "uav_mass") cfg.uav_mass = parse_real(val, line, key);
    else if (key == "altitude") cfg.altitude = parse_real(val, line, key);
    else if (key == "v_max") cfg.v_max = parse_real(val, line, key);
    else if (key == "v_min") cfg.v_min = parse_real(val, line, key);
    else if (key == "a_max") cfg.a_max = parse_real(val, line, key);
    else if (key == "dt") cfg.dt = parse_real(val, line, key);
    else if (key == "num_steps") cfg.num_steps = static_cast<int>(parse_int(val, line, key));
    else if (key == "horizon") cfg.horizon = static_cast<int>(parse_int(val, line, key));
    else if (key == "start_pos") cfg.start_pos = parse_vec2(val, line, key);
    else if (key == "target_pos") cfg.target_pos = parse_vec2(val, line, key);
    else if (key == "initial_velocity") { cfg.initial_velocity = parse_vec2(val, line, key); has_init_vel = true; }
    else if (key == "rng_seed") cfg.rng_seed = static_cast<std::uint64_t>(parse_int(val, line, key));
    else throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
  }

  // Materialize explicit clusters.
  if (has_clusters) {
    for (const ClusterDraft& d : drafts) {
      if (!d.center)
        throw ConfigError("line " + std::to_string(d.line) + ": [cluster] block missing 'center'");
      if (!d.count)
        throw ConfigError("line " + std::to_string(d.line) + ": [cluster] block missing 'count'");
      cfg.clusters.centers.push_back(*d.center);
      cfg.clusters.counts.push_back(*d.count);
      cfg.clusters.spreads.push_back(d.spread);
    }
  }

  // Derived defaults follow the fields they depend on.
  if (!has_sep_ris) cfg.elem_sep_ris = cfg.wavelength / 2.0;
  if (!has_sep_bs) cfg.elem_sep_bs = cfg.wavelength / 2.0;
  if (!has_ref_loss) {
    const double s = cfg.wavelength / (4.0 * std::numbers::pi);
    cfg.ref_path_loss = s * s;
  }
  if (!has_init_vel) {
    Eigen::Vector2d dir = cfg.target_pos - cfg.start_pos;
    const double n = dir.norm();
    cfg.initial_velocity = (n > 0.0) ? Eigen::Vector2d(30.0 * dir / n) : Eigen::Vector2d(30.0, 0.0);
  }
  if (!has_num_users) cfg.num_users = cfg.clusters.total_count();

  if (auto violations = validate(cfg); !violations.empty()) {
    std::string msg = "invalid scenario:";
    for (const auto& v : violations) msg += "\n  - " + v;
    throw ConfigError(msg);
  }
  return cfg;
}

ScenarioConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_config(ss.str());
}

std::string serialize_config(const ScenarioConfig& cfg) {
  std::ostringstream o;
  o << "num_ris_elements = " << cfg.num_ris_elements << "\n";
  o << "num_bs_antennas = " << cfg.num_bs_antennas << "\n";
  o << "num_users = " << cfg.num_users << "\n";
  o << "wavelength = " << g17(cfg.wavelength) << "\n";
  o << "elem_sep_ris = " << g17(cfg.elem_sep_ris) << "\n";
  o << "elem_sep_bs = " << g17(cfg.elem_sep_bs) << "\n";
  o << "ref_path_loss = " << g17(cfg.ref_path_loss) << "\n";
  o << "tx_power_per_user = " << g17(cfg.tx_power_per_user) << "\n";
  o << "bandwidth = " << g17(cfg.bandwidth) << "\n";
  o << "noise_power = " << g17(cfg.noise_power) << "\n";
  o << "energy_c1 = " << g17(cfg.energy_c1) << "\n";
  o << "energy_c2 = " << g17(cfg.energy_c2) << "\n";
  o << "gravity = " << g17(cfg.gravity) << "\n";
  o << "uav_mass = " << g17(cfg.uav_mass) << "\n";
  o << "altitude = " << g17(cfg.altitude) << "\n";
  o << "v_max = " << g17(cfg.v_max) << "\n";
  o << "v_min = " << g17(cfg.v_min) << "\n";
  o << "a_max = " << g17(cfg.a_max) << "\n";
  o << "dt = " << g17(cfg.dt) << "\n";
  o << "num_steps = " << cfg.num_steps << "\n";
  o << "horizon = " << cfg.horizon << "\n";
  o << "start_pos = [" << g17(cfg.start_pos.x()) << ", " << g17(cfg.start_pos.y()) << "]\n";
  o << "target_pos = [" << g17(cfg.target_pos.x()) << ", " << g17(cfg.target_pos.y()) << "]\n";
  o << "initial_velocity = [" << g17(cfg.initial_velocity.x()) << ", "
    << g17(cfg.initial_velocity.y()) << "]\n";
  o << "rng_seed = " << cfg.rng_seed << "\n";
  for (size_t c = 0; c < cfg.clusters.centers.size(); ++c) {
    o << "\n[cluster]\n";
    o << "center = [" << g17(cfg.clusters.centers[c].x()) << ", "
      << g17(cfg.clusters.centers[c].y()) << "]\n";
    o << "count = " << cfg.clusters.counts[c] << "\n";
    o << "spread = " << g17(cfg.clusters.spreads[c]) << "\n";
  }
  const SolverSettings& sv = cfg.solver;
  o << "\n[solver]\n";
  o << "max_iters = " << sv.max_iters << "\n";
  o << "grad_tol = " << g17(sv.grad_tol) << "\n";
  o << "step_init = " << g17(sv.step_init) << "\n";
  o << "penalty_weight_terminal = " << g17(sv.penalty_weight_terminal) << "\n";
  o << "penalty_weight_speed = " << g17(sv.penalty_weight_speed) << "\n";
  o << "penalty_growth = " << g17(sv.penalty_growth) << "\n";
  o << "fd_epsilon = " << g17(sv.fd_epsilon) << "\n";
  o << "eps_pos = " << g17(sv.eps_pos) << "\n";
  o << "eps_limit = " << g17(sv.eps_limit) << "\n";
  return o.str();
}

std::vector<std::string> validate(const ScenarioConfig& cfg) {
  std::vector<std::string> v;
  auto require = [&](bool ok, const std::string& msg) {
    if (!ok) v.push_back(msg);
  };

  require(cfg.num_ris_elements >= 2,
          "num_ris_elements >= 2 violated (num_ris_elements = " + std::to_string(cfg.num_ris_elements) + ")");
  require(cfg.num_bs_antennas >= 1,
          "num_bs_antennas >= 1 violated (num_bs_antennas = " + std::to_string(cfg.num_bs_antennas) + ")");
  require(cfg.num_users >= 1,
          "num_users >= 1 violated (num_users = " + std::to_string(cfg.num_users) + ")");

  auto positive = [&](double x, const char* name) {
    require(x > 0.0, std::string(name) + " > 0 violated (" + name + " = " + g17(x) + ")");
  };
  positive(cfg.wavelength, "wavelength");
  positive(cfg.elem_sep_ris, "elem_sep_ris");
  positive(cfg.elem_sep_bs, "elem_sep_bs");
  positive(cfg.ref_path_loss, "ref_path_loss");
  positive(cfg.tx_power_per_user, "tx_power_per_user");
  positive(cfg.bandwidth, "bandwidth");
  positive(cfg.noise_power, "noise_power");
  positive(cfg.energy_c1, "energy_c1");
  positive(cfg.energy_c2, "energy_c2");
  positive(cfg.gravity, "gravity");
  positive(cfg.uav_mass, "uav_mass");
  positive(cfg.altitude, "altitude");
  positive(cfg.v_max, "v_max");
  positive(cfg.v_min, "v_min");
  positive(cfg.a_max, "a_max");
  positive(cfg.dt, "dt");

  require(cfg.num_steps >= 1,
          "num_steps >= 1 violated (num_steps = " + std::to_string(cfg.num_steps) + ")");
  require(cfg.horizon >= 1,
          "horizon >= 1 violated (horizon = " + std::to_string(cfg.horizon) + ")");
  require(cfg.horizon <= cfg.num_steps,
          "horizon <= num_steps violated (horizon = " + std::to_string(cfg.horizon) +
          ", num_steps = " + std::to_string(cfg.num_steps) + ")");

  const double v0 = cfg.initial_velocity.norm();
  require(cfg.v_min <= v0,
          "v_min <= |initial_velocity| violated (v_min = " + g17(cfg.v_min) +
          ", |initial_velocity| = " + g17(v0) + ")");
  require(v0 <= cfg.v_max,
          "|initial_velocity| <= v_max violated (|initial_velocity| = " + g17(v0) +
          ", v_max = " + g17(cfg.v_max) + ")");

  const double dist = (cfg.target_pos - cfg.start_pos).norm();
  const double reach = cfg.v_max * cfg.num_steps * cfg.dt;
  require(dist <= reach,
          "reachability |target_pos - start_pos| <= v_max * num_steps * dt violated (distance = " +
          g17(dist) + " m, reach = " + g17(reach) + " m)");

  const ClusterSpec& cl = cfg.clusters;
  require(!cl.centers.empty(), "at least one user cluster required");
  require(cl.counts.size() == cl.centers.size() && cl.spreads.size() == cl.centers.size(),
          "cluster lists (centers, counts, spreads) must have equal length");
  if (cl.counts.size() == cl.centers.size()) {
    for (size_t i = 0; i < cl.counts.size(); ++i)
      require(cl.counts[i] >= 1,
              "cluster count >= 1 violated (cluster " + std::to_string(i) + ")");
  }
  if (cl.spreads.size() == cl.centers.size()) {
    for (size_t i = 0; i < cl.spreads.size(); ++i)
      require(cl.spreads[i] >= 0.0,
              "cluster spread >= 0 violated (cluster " + std::to_string(i) + ")");
  }
  require(cl.total_count() == cfg.num_users,
          "num_users must equal the total cluster count (num_users = " +
          std::to_string(cfg.num_users) + ", clusters sum to " +
          std::to_string(cl.total_count()) + ")");

  const SolverSettings& sv = cfg.solver;
  require(sv.max_iters >= 0, "solver max_iters >= 0 violated");
  positive(sv.grad_tol, "solver grad_tol");
  positive(sv.step_init, "solver step_init");
  positive(sv.penalty_weight_terminal, "solver penalty_weight_terminal");
  positive(sv.penalty_weight_speed, "solver penalty_weight_speed");
  require(sv.penalty_growth > 1.0, "solver penalty_growth > 1 violated (penalty_growth = " +
          g17(sv.penalty_growth) + ")");
  positive(sv.fd_epsilon, "solver fd_epsilon");
  positive(sv.eps_pos, "solver eps_pos");
  positive(sv.eps_limit, "solver eps_limit");

  return v;
}

UserSet generate_users(const ClusterSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  UserSet out;
  for (size_t c = 0; c < spec.centers.size(); ++c) {
    for (int i = 0; i < spec.counts[c]; ++i) {
      const double dx = gauss(rng) * spec.spreads[c];
      const double dy = gauss(rng) * spec.spreads[c];
      out.positions.emplace_back(spec.centers[c].x() + dx, spec.centers[c].y() + dy, 0.0);
    }
  }
  return out;
}

UserSet materialize_users(const ScenarioConfig& cfg) {
  UserSet users = generate_users(cfg.clusters, cfg.rng_seed);
  if (static_cast<int>(users.positions.size()) != cfg.num_users)
    throw ConfigError("generated user count does not match num_users");
  return users;
}

std::vector<Eigen::Vector2d> cluster_centroids(const UserSet& users, const ClusterSpec& spec) {
  std::vector<Eigen::Vector2d> out;
  out.reserve(spec.counts.size());
  size_t offset = 0;
  for (int count : spec.counts) {
    Eigen::Vector2d sum(0.0, 0.0);
    for (int i = 0; i < count; ++i) sum += users.positions[offset + i].head<2>();
    out.push_back(sum / count);
    offset += count;
  }
  return out;
}

}  // namespace aris
