#include "aris/channel.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <random>

namespace aris {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Deterministic per-(seed, position) stream for the link phases.
std::mt19937_64 position_rng(const Eigen::Vector2d& q, std::uint64_t seed) {
  std::uint64_t mix = seed;
  auto fold = [&mix](std::uint64_t v) {
    mix ^= v + 0x9e3779b97f4a7c15ULL + (mix << 6) + (mix >> 2);
  };
  fold(std::bit_cast<std::uint64_t>(q.x()));
  fold(std::bit_cast<std::uint64_t>(q.y()));
  return std::mt19937_64(mix);
}

}  // namespace

ChannelState build_channels(const Eigen::Vector2d& q, const UserSet& users,
                            const ScenarioConfig& cfg, std::uint64_t seed) {
  using namespace std::complex_literals;

  ChannelState ch;
  ch.q = q;
  ch.angles = angles_at(q, users, cfg);

  auto rng = position_rng(q, seed);
  std::uniform_real_distribution<double> uni(0.0, kTwoPi);
  ch.random_phase_bs_ris = uni(rng);
  ch.random_phase_ris_user = uni(rng);

  const Eigen::Vector3d drone(q.x(), q.y(), cfg.altitude);
  const double sqrt_l0 = std::sqrt(cfg.ref_path_loss);

  // BS -> array: rank-one outer product of the two steering vectors, scaled
  // by the free-space gain with distance phase and the random link phase.
  const double bs_dist = drone.norm();
  ch.alpha = (sqrt_l0 / bs_dist) *
             std::exp(1i * (ch.random_phase_bs_ris - kTwoPi * bs_dist / cfg.wavelength));
  const Eigen::VectorXcd g_ris = steering_vector(ch.angles.sin_aoa_bs_ris, cfg.num_ris_elements,
                                                 cfg.elem_sep_ris, cfg.wavelength);
  const Eigen::VectorXcd g_bs = steering_vector(ch.angles.sin_aod_bs, cfg.num_bs_antennas,
                                                cfg.elem_sep_bs, cfg.wavelength);
  ch.h_bs_ris = ch.alpha * (g_ris * g_bs.adjoint());

  // Array -> user k: h_k = conj(beta_k) * steering(mu_k), so the received
  // row h_k^H equals beta_k * steering(mu_k)^H.
  const int K = static_cast<int>(users.positions.size());
  ch.beta.resize(K);
  ch.h_ris_user.reserve(K);
  for (int k = 0; k < K; ++k) {
    const double dist = (users.positions[k] - drone).norm();
    const std::complex<double> beta =
        (sqrt_l0 / dist) *
        std::exp(1i * (ch.random_phase_ris_user - kTwoPi * dist / cfg.wavelength));
    ch.beta[k] = beta;
    const Eigen::VectorXcd g_user = steering_vector(ch.angles.sin_aod_ris_user[k],
                                                    cfg.num_ris_elements, cfg.elem_sep_ris,
                                                    cfg.wavelength);
    ch.h_ris_user.push_back(std::conj(beta) * g_user);
  }
  return ch;
}

Eigen::VectorXcd mrt_precoder(const Eigen::Vector2d& q, const ScenarioConfig& cfg) {
  const Eigen::Vector3d drone(q.x(), q.y(), cfg.altitude);
  const double bs_dist = drone.norm();
  if (bs_dist <= 0.0)
    throw std::domain_error("degenerate geometry: drone coincides with the base station");
  const double sin_aod = q.x() / bs_dist;
  Eigen::VectorXcd w = steering_vector(sin_aod, cfg.num_bs_antennas, cfg.elem_sep_bs,
                                       cfg.wavelength);
  return w / w.norm();
}

double snr_direct(const Eigen::VectorXd& phases, int user_index,
                  const ChannelState& ch, const ScenarioConfig& cfg) {
  using namespace std::complex_literals;
  Eigen::VectorXcd theta(phases.size());
  for (Eigen::Index n = 0; n < phases.size(); ++n) theta[n] = std::exp(1i * phases[n]);

  const Eigen::VectorXcd w = mrt_precoder(ch.q, cfg);
  const std::complex<double> s =
      ch.h_ris_user[user_index].adjoint() * theta.asDiagonal() * ch.h_bs_ris * w;
  return cfg.tx_power_per_user * std::norm(s) / cfg.noise_power;
}

}  // namespace aris
