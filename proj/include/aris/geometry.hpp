#pragma once

#include <Eigen/Dense>

#include "aris/scenario.hpp"

namespace aris {

// Sines of the array angles seen from a drone position q = (qx, qy, L).
// Both uniform linear arrays lie along the global x-axis; the base station
// sits at the origin.  Only sines enter the steering phases, so angles are
// carried as sines directly.
struct AngleSet {
  double sin_aod_bs = 0.0;            // departure at the BS toward the drone
  double sin_aoa_bs_ris = 0.0;        // arrival at the drone-mounted array from the BS
  Eigen::VectorXd sin_aod_ris_user;   // departure at the drone-mounted array toward each user
};

// Compute the angle sines for position q against the given users.
// Throws std::domain_error when the drone coincides with the origin or a user.
AngleSet angles_at(const Eigen::Vector2d& q, const UserSet& users,
                   const ScenarioConfig& cfg);

// Uniform-linear-array steering vector: entry n is
// exp(-j * 2*pi * n * elem_sep * sin_angle / wavelength), n = 0..count-1.
Eigen::VectorXcd steering_vector(double sin_angle, int count, double elem_sep,
                                 double wavelength);

}  // namespace aris
