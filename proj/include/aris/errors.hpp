#pragma once

#include <stdexcept>
#include <string>

namespace aris {

// Scenario file / configuration problems: bad syntax, unknown keys,
// violated parameter invariants.  CLI maps these to exit code 1.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// The optimizer (or the straight-line baseline) could not produce a
// trajectory satisfying the motion constraints.  CLI maps these to exit 2.
struct InfeasibleError : std::runtime_error {
  explicit InfeasibleError(const std::string& msg, int step_index = -1)
      : std::runtime_error(msg), step(step_index) {}
  int step;  // closed-loop step where the failure occurred, -1 if global
};

}  // namespace aris
