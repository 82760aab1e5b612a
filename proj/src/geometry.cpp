#include "aris/geometry.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace aris {

AngleSet angles_at(const Eigen::Vector2d& q, const UserSet& users,
                   const ScenarioConfig& cfg) {
  const Eigen::Vector3d drone(q.x(), q.y(), cfg.altitude);

  AngleSet out;
  const double bs_dist = drone.norm();
  if (bs_dist <= 0.0)
    throw std::domain_error("degenerate geometry: drone coincides with the base station");
  // Departure at the BS toward the drone is mirrored as arrival at the
  // drone-mounted array, both measured along the shared x-axis orientation.
  out.sin_aod_bs = q.x() / bs_dist;
  out.sin_aoa_bs_ris = -out.sin_aod_bs;

  out.sin_aod_ris_user.resize(static_cast<Eigen::Index>(users.positions.size()));
  for (size_t k = 0; k < users.positions.size(); ++k) {
    const Eigen::Vector3d diff = users.positions[k] - drone;
    const double dist = diff.norm();
    if (dist <= 0.0)
      throw std::domain_error("degenerate geometry: drone coincides with user " +
                              std::to_string(k));
    out.sin_aod_ris_user[static_cast<Eigen::Index>(k)] = diff.x() / dist;
  }
  return out;
}

Eigen::VectorXcd steering_vector(double sin_angle, int count, double elem_sep,
                                 double wavelength) {
  using namespace std::complex_literals;
  const double coef = -2.0 * std::numbers::pi * elem_sep * sin_angle / wavelength;
  Eigen::VectorXcd v(count);
  for (int n = 0; n < count; ++n) v[n] = std::exp(1i * (coef * n));
  return v;
}

}  // namespace aris
