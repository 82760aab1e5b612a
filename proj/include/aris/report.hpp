#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "aris/empc.hpp"
#include "aris/flight.hpp"
#include "aris/scenario.hpp"

namespace aris {

struct RunSummary {
  std::string mode;          // "empc" or "baseline"
  std::uint64_t seed = 0;
  double total_bits = 0.0;
  double total_energy = 0.0;  // J
  double ee = 0.0;            // bits/J
  double terminal_error = 0.0;  // m
  double wall_time = 0.0;     // s; reported on stdout only, never in files
};

struct RunReport {
  ScenarioConfig scenario;
  std::string mode;
  TrajectoryLog log;
  std::vector<IterationLog> iteration_logs;  // empty in baseline mode
  RunSummary summary;
};

// Fly one mission in the given mode ("empc" or "baseline") and collect the
// full report.  Deterministic for a fixed scenario and seed.
RunReport run_scenario(const ScenarioConfig& cfg, const std::string& mode);

// File writers.  All numbers carry 17 significant digits so outputs are
// byte-identical across repeated runs and round-trip through text exactly.
void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryLog& log,
                          const ScenarioConfig& cfg);
void write_iterations_csv(const std::filesystem::path& path,
                          const std::vector<IterationLog>& logs);
void write_summary(const std::filesystem::path& path, const RunReport& report);

// Format one double with 17 significant digits (shortest exact form).
std::string format_g17(double v);

struct RunOptions {
  std::string scenario_path;
  std::string mode = "empc";
  std::string out_dir;
  bool has_seed_override = false;
  std::uint64_t seed_override = 0;
  bool quiet = false;
};

struct CompareOptions {
  std::string scenario_path;
  std::string out_dir;
  bool has_seed_override = false;
  std::uint64_t seed_override = 0;
  bool quiet = false;
};

struct ValidateOptions {
  std::uint64_t seed = 1;
  bool paper_literal_b = false;  // also report the diagnostic target-vector gap
  bool quiet = false;
};

// CLI entry points.  Return the process exit code:
//   0 success, 1 input error, 2 infeasibility, 3 self-check failure.
int cmd_run(const RunOptions& opt);
int cmd_compare(const CompareOptions& opt);
int cmd_validate(const ValidateOptions& opt);

}  // namespace aris
