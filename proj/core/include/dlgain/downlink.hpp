#pragma once

#include <cstdint>
#include <vector>

#include "dlgain/precoding.hpp"

namespace dlgain {

enum class SymbolModel { kGaussian, kUnitModulus };

struct DownlinkOptions {
  SymbolModel symbols = SymbolModel::kGaussian;
  // Users (by user(l, k) index) whose signals are synthesized; empty means
  // all. Entries of other users stay NaN.
  std::vector<int> receivers;
};

// Received-power statistics of one block, indexed by user(l, k).
struct BlockObservation {
  int tau_d = 0;
  // Sample mean power over all tau_d symbols.
  std::vector<double> xi;
  // Sample mean power with the first symbol left out.
  std::vector<double> xi_loo;
  // |y[0]|^2, the left-out symbol.
  std::vector<double> first_power;
};

// y_{lk}[n] = sum_{l',k'} sqrt(eta_{l'k'}) alpha^{l'k'}_{lk} s_{l'k'}[n] + w_{lk}[n]
// with symbols shared by all receivers and independent CN(0, sigma_dl^2) noise.
BlockObservation simulate_block(const EffectiveGains& gains, const std::vector<double>& eta,
                                double sigma_dl, int tau_d, Rng& rng,
                                const DownlinkOptions& options = {});

// Limit of xi for infinitely many symbols:
//   sum_{l',k'} eta_{l'k'} |alpha^{l'k'}_{lk}|^2 + sigma_dl^2.
double asymptotic_xi(const EffectiveGains& gains, const std::vector<double>& eta, double sigma_dl,
                     int user);

// (1/K) * sum over interferers u' != user of eta_{u'} (|alpha(user, u')|^2 - expected(u')),
// where expected holds E{|alpha(user, u')|^2} over the channel realizations.
double lln_gap(const EffectiveGains& gains, const std::vector<double>& eta,
               const Eigen::VectorXd& expected, int user, int users_per_cell);

struct LlnPoint {
  int users_per_cell = 0;
  int drops = 0;
  double rms_gap = 0.0;
};

// For each K, draws `drops` independent uncorrelated MR networks and one
// channel block each, and reports the RMS of lln_gap for user (0, 0).
std::vector<LlnPoint> check_lln_over_users(const NetworkConfig& base,
                                           const std::vector<int>& k_values, int drops,
                                           std::uint64_t seed);

}  // namespace dlgain
