#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "dlgain/downlink.hpp"

namespace dlgain {

struct MlpModel;

enum class TMethod {
  kMrCorrelated,
  // Coherent pilot-contamination term evaluated with the serving user's
  // Psi instead of the one at the interfering BS. Diagnostic only.
  kMrCorrelatedAsPrinted,
  kMrIid,
  kZfIid,
  kMonteCarlo,
};
std::string_view to_string(TMethod method);

// T_{lk}: interference plus noise power that the blind estimator subtracts.
struct InterferenceConstant {
  TMethod method = TMethod::kMrCorrelated;
  // Indexed by user(l, k).
  std::vector<double> t;
  // Monte Carlo standard errors; zero for closed forms.
  std::vector<double> std_error;

  double operator[](int user) const { return t[static_cast<std::size_t>(user)]; }
};

// E{|alpha(u, u')|^2} for every pair of users (row u receives, column u'
// is served), from the closed form selected by `method`. The diagonal holds
// the second moment of the own gain.
Eigen::MatrixXd expected_gain_power(const Scenario& s, const UplinkStatistics& stats,
                                    const PrecodingPlan& plan, TMethod method);

// sum_{u' != u} eta_{u'} E{|alpha(u, u')|^2} + sigma_dl^2 for every user.
InterferenceConstant interference_from_moments(const Scenario& s,
                                               const Eigen::MatrixXd& expected, TMethod method);

InterferenceConstant t_mr_correlated(const Scenario& s, const UplinkStatistics& stats,
                                     const PrecodingPlan& plan);
InterferenceConstant t_mr_correlated_as_printed(const Scenario& s, const UplinkStatistics& stats,
                                                const PrecodingPlan& plan);
InterferenceConstant t_mr_iid(const Scenario& s, const UplinkStatistics& stats,
                              const PrecodingPlan& plan);
InterferenceConstant t_zf_iid(const Scenario& s, const UplinkStatistics& stats,
                              const PrecodingPlan& plan);

// Sample averages over independent blocks; needs n_blocks >= 1000.
struct MonteCarloMoments {
  InterferenceConstant t;
  // Sample mean of |alpha(u, u')|^2 and its standard error.
  Eigen::MatrixXd mean_power;
  Eigen::MatrixXd power_std_error;
  // Sample mean of the own gain alpha(u, u) and its standard error.
  std::vector<Complex> mean_own_gain;
  std::vector<double> own_gain_std_error;
  int n_blocks = 0;
};

MonteCarloMoments monte_carlo_moments(const Scenario& s, const UplinkStatistics& stats,
                                      const PrecodingPlan& plan, int n_blocks, Rng& rng);
InterferenceConstant t_monte_carlo(const Scenario& s, const UplinkStatistics& stats,
                                   const PrecodingPlan& plan, int n_blocks, Rng& rng);

// Closed form matching the scheme and fading mode, or Monte Carlo with
// `mc_blocks` blocks for ZF under correlated fading.
InterferenceConstant interference_constant(const Scenario& s, const UplinkStatistics& stats,
                                           const PrecodingPlan& plan, int mc_blocks, Rng& rng);

// E{alpha^{lk}_{lk}}: sqrt(rho tr Phi) for MR, sqrt(rho / E{|z|^2}) for ZF.
double hardening_mean(const Scenario& s, const PrecodingPlan& plan, int user);

enum class Branch { kBlind, kFallbackMean, kOracle, kNeural };
std::string_view to_string(Branch branch);

struct GainEstimate {
  double value = 0.0;
  Branch branch = Branch::kFallbackMean;
};

// sqrt((xi - t) / eta) if xi > theta, otherwise the fallback. Requires
// theta >= t so the radicand is positive on the blind branch.
GainEstimate model_aided_estimate(double xi, double t, double eta, double theta, double fallback);

// model_aided_estimate with xi replaced by its limit for infinitely long blocks.
GainEstimate oracle_estimate(const EffectiveGains& gains, const std::vector<double>& eta,
                             double sigma_dl, double t, int user, double theta, double fallback);

// Features are (xi', T, eta rho beta). Throws kModelNotLoaded for an empty model.
GainEstimate neural_estimate(const MlpModel& model, double xi_loo, double t, double eta_rho_beta);

}  // namespace dlgain
