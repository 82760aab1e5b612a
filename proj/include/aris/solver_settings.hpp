#pragma once

namespace aris {

// Knobs for the receding-horizon solver (projected gradient ascent with
// quadratic penalties).  Loaded from the optional [solver] block of a
// scenario file; defaults are tuned for the shipped mission scenarios.
struct SolverSettings {
  int max_iters = 60;          // gradient iterations per penalty level
  double grad_tol = 1e-6;      // stop when the penalized gradient norm falls below
  double step_init = 2.0;      // initial trial step along the normalized gradient (m/s^2)
  double penalty_weight_terminal = 1e3;  // weight on the squared arrival/reachability residual
  double penalty_weight_speed = 1e3;     // weight on squared speed-bound violations
  double penalty_growth = 10.0;          // multiplier applied when residuals stay out of tolerance
  double fd_epsilon = 1e-4;    // central finite-difference probe size (m/s^2)
  double eps_pos = 1.0;        // terminal position tolerance (m)
  double eps_limit = 1e-6;     // speed/acceleration tolerance as a fraction of the limit
};

}  // namespace aris
