#pragma once

#include <string_view>
#include <vector>

#include "dlgain/uplink.hpp"

namespace dlgain {

enum class Scheme { kMr, kZf };
std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view text);

enum class ZfNormMode { kAnalyticIid, kMonteCarlo };

// MR normalization. kAverage divides by sqrt(E{|g_hat|^2}); kInstantaneous
// divides by the realized norm and is not covered by the closed forms.
enum class MrNorm { kAverage, kInstantaneous };

struct PrecoderOptions {
  Scheme scheme = Scheme::kMr;
  ZfNormMode zf_norm = ZfNormMode::kMonteCarlo;
  MrNorm mr_norm = MrNorm::kAverage;
  int zf_norm_draws = 10000;
};

// Per-user normalization constants E{|v|^2} of the unnormalized precoder v
// (g_hat for MR, z for ZF). Long-term, so computed once per scenario.
struct PrecodingPlan {
  PrecoderOptions options;
  std::vector<double> norm_constant;
  // Standard error of each constant; zero for analytic constants.
  std::vector<double> norm_std_error;
};

// ZF in kAnalyticIid mode uses 1/((M-K) gamma^l_{lk}); kMonteCarlo averages
// over independent draws of the estimate matrix of each cell.
PrecodingPlan make_precoding_plan(const Scenario& s, const UplinkStatistics& stats,
                                  const PrecoderOptions& options, Rng& rng);

// Columns indexed by user(l, k).
struct PrecoderSet {
  Scheme scheme = Scheme::kMr;
  CMatrix w;
};

PrecoderSet mr_precoders(const ChannelEstimates& est, const PrecodingPlan& plan);
PrecoderSet zf_precoders(const Scenario& s, const ChannelEstimates& est,
                         const PrecodingPlan& plan);
void build_precoders(const Scenario& s, const ChannelEstimates& est, const PrecodingPlan& plan,
                     PrecoderSet& out);

// alpha(user(l, k), user(l', k')) = sqrt(rho) (g^{l'}_{lk})^H w_{l'k'}.
struct EffectiveGains {
  CMatrix alpha;

  Complex operator()(int row_user, int col_user) const { return alpha(row_user, col_user); }
};

EffectiveGains effective_gains(const Scenario& s, const ChannelEstimates& est,
                               const PrecoderSet& precoders);
void effective_gains(const Scenario& s, const ChannelEstimates& est,
                     const PrecoderSet& precoders, EffectiveGains& out);

}  // namespace dlgain
