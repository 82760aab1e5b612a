#include "aris/phase_opt.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace aris {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Linear coefficient of the element index in the pair phase model of user k:
// B_n^k = pair_coef * n + theta_n.
double pair_coef(int user_index, const ChannelState& ch, const ScenarioConfig& cfg,
                 TargetConvention conv) {
  const double sin_mu = ch.angles.sin_aod_ris_user[user_index];
  const double geom = (conv == TargetConvention::BothAngles)
                          ? sin_mu - ch.angles.sin_aoa_bs_ris
                          : sin_mu;  // diagnostic variant drops the BS-side angle
  return kTwoPi * cfg.elem_sep_ris * geom / cfg.wavelength;
}

}  // namespace

double bs_array_gain(const ScenarioConfig& cfg) {
  return static_cast<double>(cfg.num_bs_antennas);
}

WeightSet compute_weights(const ChannelState& ch, const ScenarioConfig& cfg) {
  const int K = ch.num_users();
  const double n2 = static_cast<double>(cfg.num_ris_elements) *
                    static_cast<double>(cfg.num_ris_elements);
  WeightSet w;
  w.c.resize(K);
  w.gamma.resize(K);
  for (int k = 0; k < K; ++k) {
    const double link = std::norm(ch.alpha * ch.beta[k]);
    w.c[k] = bs_array_gain(cfg) * cfg.tx_power_per_user * link / cfg.noise_power;
    w.gamma[k] = cfg.bandwidth * w.c[k] /
                 (std::numbers::ln2 * static_cast<double>(K) * (1.0 + w.c[k] * n2));
  }
  return w;
}

double snr_closed_form(const Eigen::VectorXd& phases, int user_index,
                       const ChannelState& ch, const ScenarioConfig& cfg) {
  using namespace std::complex_literals;
  const double coef = pair_coef(user_index, ch, cfg, TargetConvention::BothAngles);
  // |sum_n e^{j B_n}|^2 equals N + sum_{n != m} cos(B_n - B_m) exactly.
  std::complex<double> sum = 0.0;
  for (Eigen::Index n = 0; n < phases.size(); ++n)
    sum += std::exp(1i * (coef * static_cast<double>(n) + phases[n]));
  const double c_k = bs_array_gain(cfg) * cfg.tx_power_per_user *
                     std::norm(ch.alpha * ch.beta[user_index]) / cfg.noise_power;
  return c_k * std::norm(sum);
}

double rate_lower_bound(const Eigen::VectorXd& phases, int user_index,
                        const ChannelState& ch, const ScenarioConfig& cfg) {
  const WeightSet w = compute_weights(ch, cfg);
  const double coef = pair_coef(user_index, ch, cfg, TargetConvention::BothAngles);
  const Eigen::Index N = phases.size();
  double quad = 0.0;  // sum over ordered pairs of (B_n - B_m)^2
  for (Eigen::Index n = 0; n < N; ++n) {
    const double bn = coef * static_cast<double>(n) + phases[n];
    for (Eigen::Index m = n + 1; m < N; ++m) {
      const double bm = coef * static_cast<double>(m) + phases[m];
      quad += 2.0 * (bn - bm) * (bn - bm);
    }
  }
  const double n2 = static_cast<double>(N) * static_cast<double>(N);
  return w.gamma[user_index] * (n2 - 0.5 * quad);
}

PairDifferenceSystem build_difference_system(int n_elements) {
  if (n_elements < 2)
    throw std::domain_error("pair difference system needs at least 2 elements");
  const int pairs = n_elements * (n_elements - 1) / 2;
  PairDifferenceSystem sys;
  sys.a_matrix = Eigen::MatrixXd::Zero(pairs, n_elements);
  sys.pair_order.reserve(pairs);
  int row = 0;
  for (int n = 0; n < n_elements; ++n) {
    for (int m = n + 1; m < n_elements; ++m) {
      sys.a_matrix(row, n) = 1.0;
      sys.a_matrix(row, m) = -1.0;
      sys.pair_order.emplace_back(n, m);
      ++row;
    }
  }
  return sys;
}

Eigen::VectorXd build_target_vector(int user_index, const ChannelState& ch,
                                    const ScenarioConfig& cfg, TargetConvention conv) {
  const double coef = pair_coef(user_index, ch, cfg, conv);
  const int N = cfg.num_ris_elements;
  Eigen::VectorXd b(N * (N - 1) / 2);
  int row = 0;
  for (int n = 0; n < N; ++n)
    for (int m = n + 1; m < N; ++m)
      // (theta_n - theta_m) - b = B_n - B_m, so b = coef * (m - n).
      b[row++] = coef * static_cast<double>(m - n);
  return b;
}

double surrogate_objective(const Eigen::VectorXd& phases, const ChannelState& ch,
                           const ScenarioConfig& cfg, TargetConvention conv) {
  const WeightSet w = compute_weights(ch, cfg);
  const Eigen::Index N = phases.size();
  double total = 0.0;
  for (int k = 0; k < ch.num_users(); ++k) {
    const double coef = pair_coef(k, ch, cfg, conv);
    double quad = 0.0;
    for (Eigen::Index n = 0; n < N; ++n) {
      const double bn = coef * static_cast<double>(n) + phases[n];
      for (Eigen::Index m = n + 1; m < N; ++m) {
        const double bm = coef * static_cast<double>(m) + phases[m];
        quad += 2.0 * (bn - bm) * (bn - bm);  // ordered pairs, each twice
      }
    }
    total += w.gamma[k] * quad;
  }
  return total;
}

PhaseLsSolver::PhaseLsSolver(int n_elements) : sys_(build_difference_system(n_elements)) {
  cod_.setThreshold(1e-10);
  cod_.compute(sys_.a_matrix);
}

Eigen::VectorXd PhaseLsSolver::solve_unwrapped(const ChannelState& ch,
                                               const ScenarioConfig& cfg,
                                               TargetConvention conv) const {
  const WeightSet w = compute_weights(ch, cfg);
  const double wsum = w.gamma.sum();
  // A is shared across users, so the weighted problem collapses onto the
  // gamma-weighted mean target; the decomposition returns the minimum-norm
  // least-squares solution.
  Eigen::VectorXd b_mean = Eigen::VectorXd::Zero(sys_.a_matrix.rows());
  for (int k = 0; k < ch.num_users(); ++k)
    b_mean += w.gamma[k] * build_target_vector(k, ch, cfg, conv);
  b_mean /= wsum;
  return cod_.solve(b_mean);
}

Eigen::VectorXd PhaseLsSolver::solve(const ChannelState& ch, const ScenarioConfig& cfg,
                                     TargetConvention conv) const {
  return wrap_angles(solve_unwrapped(ch, cfg, conv));
}

Eigen::VectorXd optimal_phases(const ChannelState& ch, const ScenarioConfig& cfg) {
  return PhaseLsSolver(cfg.num_ris_elements).solve(ch, cfg);
}

double wrap_angle(double theta) {
  double w = theta - kTwoPi * std::floor(theta / kTwoPi);
  if (w >= kTwoPi) w = 0.0;  // guard the half-ulp case
  return w;
}

Eigen::VectorXd wrap_angles(const Eigen::VectorXd& theta) {
  return theta.unaryExpr([](double t) { return wrap_angle(t); });
}

}  // namespace aris
