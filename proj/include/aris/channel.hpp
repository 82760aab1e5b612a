#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "aris/geometry.hpp"
#include "aris/scenario.hpp"

namespace aris {

// Line-of-sight channels at one drone position: the BS -> reflecting-array
// matrix and one array -> user vector per user, together with the scalar
// gains and the angle sines they were built from.
struct ChannelState {
  Eigen::Vector2d q;                          // drone position the state was built at
  Eigen::MatrixXcd h_bs_ris;                  // N x M, rank one
  std::vector<Eigen::VectorXcd> h_ris_user;   // K vectors of length N
  std::complex<double> alpha;                 // BS->array gain, |alpha| = sqrt(l0)/dist
  Eigen::VectorXcd beta;                      // per-user gains, |beta_k| = sqrt(l0)/dist_k
  double random_phase_bs_ris = 0.0;           // seeded phase on the BS->array link
  double random_phase_ris_user = 0.0;         // seeded phase on the array->user links
  AngleSet angles;

  int num_elements() const { return static_cast<int>(h_bs_ris.rows()); }
  int num_antennas() const { return static_cast<int>(h_bs_ris.cols()); }
  int num_users() const { return static_cast<int>(h_ris_user.size()); }
};

// Build all channels at position q.  The two random link phases are drawn
// deterministically from (seed, q); they never influence SNR.
ChannelState build_channels(const Eigen::Vector2d& q, const UserSet& users,
                            const ScenarioConfig& cfg, std::uint64_t seed);

// Maximum-ratio transmit precoder toward the drone: the BS steering vector
// normalized to unit power.  Identical for every user.
Eigen::VectorXcd mrt_precoder(const Eigen::Vector2d& q, const ScenarioConfig& cfg);

// Receive SNR of user k evaluated by brute-force complex arithmetic:
// P_k * |h_k^H diag(e^{j theta}) H w|^2 / noise.  This is the ground truth
// the closed forms are checked against.
double snr_direct(const Eigen::VectorXd& phases, int user_index,
                  const ChannelState& ch, const ScenarioConfig& cfg);

}  // namespace aris
