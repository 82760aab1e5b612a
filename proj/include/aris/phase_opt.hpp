#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "aris/channel.hpp"

namespace aris {

// The per-pair phase model: with array separation d and angle sines mu_k
// (toward user k) and phi (from the BS), user k sees element n with phase
//   B_n^k = (2*pi/wavelength) * n * d * (sin mu_k - sin phi) + theta_n,
// and its SNR depends on the phases only through the pairwise differences
// B_n^k - B_m^k.  Aligning all B_n^k maximizes the SNR.

// Effective array gain of the BS side after maximum-ratio precoding.  The
// pairwise model above absorbs it as a constant factor M on the link gain;
// tests pin it against snr_direct.
double bs_array_gain(const ScenarioConfig& cfg);

// Per-user link constants and rate-bound weights:
//   c_k     = bs_array_gain * (P_k / noise) * |alpha * beta_k|^2
//   gamma_k = bandwidth * c_k / (ln2 * K * (1 + c_k * N^2))
// gamma_k converts the quadratic misalignment penalty into a per-step rate
// lower bound and weights each user in the phase least-squares problem.
struct WeightSet {
  Eigen::VectorXd c;
  Eigen::VectorXd gamma;
};
WeightSet compute_weights(const ChannelState& ch, const ScenarioConfig& cfg);

// Closed-form SNR of user k:
//   c_k * |sum_n exp(j * B_n^k)|^2
//     = c_k * (N + sum_{n != m} cos(B_n^k - B_m^k)).
// Agrees with snr_direct to floating-point accuracy.
double snr_closed_form(const Eigen::VectorXd& phases, int user_index,
                       const ChannelState& ch, const ScenarioConfig& cfg);

// Quadratic per-step rate lower bound for user k (bits per step before the
// dt factor): gamma_k * (N^2 - 1/2 * sum_{n != m} (B_n^k - B_m^k)^2).
// Can be negative far from alignment; attains its maximum gamma_k * N^2
// when all B_n^k coincide.
double rate_lower_bound(const Eigen::VectorXd& phases, int user_index,
                        const ChannelState& ch, const ScenarioConfig& cfg);

// All element pairs (n, m), n < m, in lexicographic order, and the matrix A
// whose row for pair (n, m) computes theta_n - theta_m.  A has N(N-1)/2 rows,
// rank N-1, and A * ones = 0 (a common phase offset is unobservable).
struct PairDifferenceSystem {
  Eigen::MatrixXd a_matrix;
  std::vector<std::pair<int, int>> pair_order;
};
PairDifferenceSystem build_difference_system(int n_elements);

// Which target vector to solve against.  BothAngles zeroes the pair residuals
// B_n^k - B_m^k of the channel model above; UserAngleOnly is a diagnostic
// variant that drops the BS-side angle from the target.
enum class TargetConvention { BothAngles, UserAngleOnly };

// Per-pair targets for user k: entry for pair (n, m) is the value of
// theta_n - theta_m that zeroes the pair residual,
//   b_{(n,m)} = (2*pi/wavelength) * (m - n) * d * (sin mu_k - sin phi).
Eigen::VectorXd build_target_vector(int user_index, const ChannelState& ch,
                                    const ScenarioConfig& cfg,
                                    TargetConvention conv = TargetConvention::BothAngles);

// The quantity the phase least-squares problem minimizes:
//   sum_k gamma_k * sum_{n != m} (B_n^k - B_m^k)^2
// evaluated literally (no angle wrapping), i.e. twice the gamma-weighted
// squared residual of the pair system.
double surrogate_objective(const Eigen::VectorXd& phases, const ChannelState& ch,
                           const ScenarioConfig& cfg,
                           TargetConvention conv = TargetConvention::BothAngles);

// Solves min_theta sum_k gamma_k ||A theta - b^k||^2 through a rank-revealing
// orthogonal decomposition of A (rank tolerance 1e-10 relative), picking the
// minimum-norm solution.  Build once per element count; the decomposition is
// reused across drone positions.
class PhaseLsSolver {
 public:
  explicit PhaseLsSolver(int n_elements);

  const PairDifferenceSystem& system() const { return sys_; }

  // Minimum-norm least-squares solution, unwrapped (entries may fall outside
  // [0, 2*pi); pair differences are exact).
  Eigen::VectorXd solve_unwrapped(const ChannelState& ch, const ScenarioConfig& cfg,
                                  TargetConvention conv = TargetConvention::BothAngles) const;

  // Same solution wrapped elementwise into [0, 2*pi).  Wrapping leaves every
  // SNR unchanged.
  Eigen::VectorXd solve(const ChannelState& ch, const ScenarioConfig& cfg,
                        TargetConvention conv = TargetConvention::BothAngles) const;

 private:
  PairDifferenceSystem sys_;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod_;
};

// One-shot convenience wrapper around PhaseLsSolver: the phase profile applied
// at a given channel state.  Returned wrapped into [0, 2*pi).
Eigen::VectorXd optimal_phases(const ChannelState& ch, const ScenarioConfig& cfg);

// Wrap an angle (or each coefficient of a vector) into [0, 2*pi).
double wrap_angle(double theta);
Eigen::VectorXd wrap_angles(const Eigen::VectorXd& theta);

}  // namespace aris
