#include "dlgain/downlink.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "dlgain/block.hpp"
#include "dlgain/error.hpp"
#include "dlgain/estimators.hpp"

namespace dlgain {

BlockObservation simulate_block(const EffectiveGains& gains, const std::vector<double>& eta,
                                double sigma_dl, int tau_d, Rng& rng,
                                const DownlinkOptions& options) {
  if (tau_d < 2) throw Error(ErrorCode::kConfigInvalid, "need at least two data symbols");
  const Eigen::Index n_users = gains.alpha.rows();
  if (static_cast<Eigen::Index>(eta.size()) != n_users || gains.alpha.cols() != n_users) {
    throw Error(ErrorCode::kDimensionMismatch, "gain and power dimensions differ");
  }
  std::vector<int> receivers = options.receivers;
  if (receivers.empty()) {
    receivers.resize(n_users);
    std::iota(receivers.begin(), receivers.end(), 0);
  }
  const auto n_rx = static_cast<Eigen::Index>(receivers.size());

  // Rows of sqrt(eta_{u'}) alpha(u, u') for the receiving users.
  CMatrix mix(n_rx, n_users);
  for (Eigen::Index r = 0; r < n_rx; ++r) {
    const int u = receivers[r];
    if (u < 0 || u >= n_users) throw Error(ErrorCode::kDimensionMismatch, "receiver out of range");
    for (Eigen::Index c = 0; c < n_users; ++c) mix(r, c) = std::sqrt(eta[c]) * gains.alpha(u, c);
  }

  const double noise_scale = std::sqrt(sigma_dl);
  CVector symbols(n_users);
  CVector noise(n_rx);
  CVector y(n_rx);
  Eigen::VectorXd total = Eigen::VectorXd::Zero(n_rx);
  Eigen::VectorXd first = Eigen::VectorXd::Zero(n_rx);
  for (int n = 0; n < tau_d; ++n) {
    if (options.symbols == SymbolModel::kGaussian) {
      fill_standard_cn(rng, {symbols.data(), static_cast<std::size_t>(n_users)});
    } else {
      for (auto& s : symbols) s = std::polar(1.0, uniform(rng, 0.0, 2.0 * std::numbers::pi));
    }
    fill_standard_cn(rng, {noise.data(), static_cast<std::size_t>(n_rx)});
    y.noalias() = mix * symbols;
    y += noise_scale * noise;
    const Eigen::VectorXd power = y.cwiseAbs2();
    if (n == 0) first = power;
    total += power;
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  BlockObservation obs;
  obs.tau_d = tau_d;
  obs.xi.assign(n_users, nan);
  obs.xi_loo.assign(n_users, nan);
  obs.first_power.assign(n_users, nan);
  for (Eigen::Index r = 0; r < n_rx; ++r) {
    const int u = receivers[r];
    obs.xi[u] = total(r) / tau_d;
    obs.xi_loo[u] = (total(r) - first(r)) / (tau_d - 1);
    obs.first_power[u] = first(r);
  }
  return obs;
}

double asymptotic_xi(const EffectiveGains& gains, const std::vector<double>& eta, double sigma_dl,
                     int user) {
  double sum = sigma_dl;
  for (Eigen::Index c = 0; c < gains.alpha.cols(); ++c) {
    sum += eta[c] * std::norm(gains.alpha(user, c));
  }
  return sum;
}

double lln_gap(const EffectiveGains& gains, const std::vector<double>& eta,
               const Eigen::VectorXd& expected, int user, int users_per_cell) {
  double gap = 0.0;
  for (Eigen::Index c = 0; c < gains.alpha.cols(); ++c) {
    if (c == user) continue;
    gap += eta[c] * (std::norm(gains.alpha(user, c)) - expected(c));
  }
  return gap / users_per_cell;
}

std::vector<LlnPoint> check_lln_over_users(const NetworkConfig& base,
                                           const std::vector<int>& k_values, int drops,
                                           std::uint64_t seed) {
  if (drops < 1) throw Error(ErrorCode::kConfigInvalid, "need at least one drop");
  std::vector<LlnPoint> out;
  for (int k : k_values) {
    NetworkConfig cfg = base;
    cfg.users_per_cell = k;
    cfg.fading_mode = FadingMode::kUncorrelated;
    if (cfg.num_antennas < k) cfg.num_antennas = k;
    double sum_sq = 0.0;
    for (int d = 0; d < drops; ++d) {
      Rng setup = make_stream(seed, static_cast<std::uint64_t>(k), d, stream::kSetup);
      const Scenario s = build_scenario(cfg, setup);
      const UplinkStatistics stats = precompute_statistics(s);
      const PrecoderOptions opts{.scheme = Scheme::kMr};
      const PrecodingPlan plan = make_precoding_plan(s, stats, opts, setup);
      const Eigen::MatrixXd expected = expected_gain_power(s, stats, plan, TMethod::kMrIid);
      Rng block_rng = make_stream(seed, static_cast<std::uint64_t>(k), d, stream::kBlock);
      const ChannelBlock block = generate_block(s, stats, plan, block_rng);
      const double gap = lln_gap(block.gains, s.eta(), expected.row(0).transpose(), 0, k);
      sum_sq += gap * gap;
    }
    out.push_back({k, drops, std::sqrt(sum_sq / drops)});
  }
  return out;
}

}  // namespace dlgain
