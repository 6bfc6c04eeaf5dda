#include "dlgain/precoding.hpp"

#include <cmath>

#include "dlgain/error.hpp"

namespace dlgain {

std::string_view to_string(Scheme scheme) { return scheme == Scheme::kMr ? "mr" : "zf"; }

Scheme parse_scheme(std::string_view text) {
  if (text == "mr") return Scheme::kMr;
  if (text == "zf") return Scheme::kZf;
  throw Error(ErrorCode::kConfigInvalid, "unknown precoding scheme '" + std::string(text) + "'");
}

namespace {

void zf_monte_carlo_norms(const Scenario& s, const UplinkStatistics& stats, int draws, Rng& rng,
                          PrecodingPlan& plan) {
  const int m = s.antennas();
  const int users = s.users();
  const Layout& layout = s.layout();
  CMatrix g(m, users);
  for (int l = 0; l < s.cells(); ++l) {
    std::vector<double> sum(users, 0.0);
    std::vector<double> sum_sq(users, 0.0);
    for (int n = 0; n < draws; ++n) {
      fill_standard_cn(rng, {g.data(), static_cast<std::size_t>(g.size())});
      for (int k = 0; k < users; ++k) {
        if (stats.iid()) {
          g.col(k) *= std::sqrt(stats.gamma(l, k, l));
        } else {
          const CVector v = g.col(k);
          g.col(k).noalias() =
              stats.user(l, k).est_cov.cholesky().triangularView<Eigen::Lower>() * v;
        }
      }
      const CMatrix z = gram_pseudoinverse_columns(g);
      for (int k = 0; k < users; ++k) {
        const double v = z.col(k).squaredNorm();
        sum[k] += v;
        sum_sq[k] += v * v;
      }
    }
    for (int k = 0; k < users; ++k) {
      const double mean = sum[k] / draws;
      const double var = std::max(0.0, sum_sq[k] / draws - mean * mean);
      plan.norm_constant[layout.user(l, k)] = mean;
      plan.norm_std_error[layout.user(l, k)] = std::sqrt(var / draws);
    }
  }
}

}  // namespace

PrecodingPlan make_precoding_plan(const Scenario& s, const UplinkStatistics& stats,
                                  const PrecoderOptions& options, Rng& rng) {
  const Layout& layout = s.layout();
  PrecodingPlan plan;
  plan.options = options;
  plan.norm_constant.assign(layout.num_users(), 0.0);
  plan.norm_std_error.assign(layout.num_users(), 0.0);

  if (options.scheme == Scheme::kMr) {
    for (int l = 0; l < s.cells(); ++l) {
      for (int k = 0; k < s.users(); ++k) {
        const double tr = stats.trace_phi(l, k);
        if (!(tr > 0.0)) throw Error(ErrorCode::kDegenerateChannel, "estimate covariance has zero trace");
        plan.norm_constant[layout.user(l, k)] = tr;
      }
    }
    return plan;
  }

  if (s.antennas() <= s.users()) {
    throw Error(ErrorCode::kInsufficientAntennas, "zero-forcing needs more antennas than users");
  }
  if (options.zf_norm == ZfNormMode::kAnalyticIid) {
    if (!stats.iid()) {
      throw Error(ErrorCode::kWrongMode, "analytic ZF normalization needs uncorrelated fading");
    }
    const double dof = s.antennas() - s.users();
    for (int l = 0; l < s.cells(); ++l) {
      for (int k = 0; k < s.users(); ++k) {
        const double gamma = stats.gamma(l, k, l);
        if (!(gamma > 0.0)) throw Error(ErrorCode::kDegenerateChannel, "zero estimate variance");
        plan.norm_constant[layout.user(l, k)] = 1.0 / (dof * gamma);
      }
    }
    return plan;
  }
  if (options.zf_norm_draws < 1) {
    throw Error(ErrorCode::kConfigInvalid, "ZF normalization needs at least one draw");
  }
  zf_monte_carlo_norms(s, stats, options.zf_norm_draws, rng, plan);
  return plan;
}

PrecoderSet mr_precoders(const ChannelEstimates& est, const PrecodingPlan& plan) {
  PrecoderSet out;
  out.scheme = Scheme::kMr;
  out.w = est.g_hat;
  for (Eigen::Index u = 0; u < out.w.cols(); ++u) {
    const double norm_sq = plan.options.mr_norm == MrNorm::kAverage
                               ? plan.norm_constant[u]
                               : out.w.col(u).squaredNorm();
    if (!(norm_sq > 0.0)) throw Error(ErrorCode::kDegenerateChannel, "zero MR precoder");
    out.w.col(u) /= std::sqrt(norm_sq);
  }
  return out;
}

PrecoderSet zf_precoders(const Scenario& s, const ChannelEstimates& est,
                         const PrecodingPlan& plan) {
  if (s.antennas() <= s.users()) {
    throw Error(ErrorCode::kInsufficientAntennas, "zero-forcing needs more antennas than users");
  }
  const int users = s.users();
  PrecoderSet out;
  out.scheme = Scheme::kZf;
  out.w.resize(est.g_hat.rows(), est.g_hat.cols());
  for (int l = 0; l < s.cells(); ++l) {
    const CMatrix z = gram_pseudoinverse_columns(est.g_hat.middleCols(l * users, users));
    for (int k = 0; k < users; ++k) {
      const int u = l * users + k;
      out.w.col(u) = z.col(k) / std::sqrt(plan.norm_constant[u]);
    }
  }
  return out;
}

void build_precoders(const Scenario& s, const ChannelEstimates& est, const PrecodingPlan& plan,
                     PrecoderSet& out) {
  out = plan.options.scheme == Scheme::kMr ? mr_precoders(est, plan) : zf_precoders(s, est, plan);
}

void effective_gains(const Scenario& s, const ChannelEstimates& est,
                     const PrecoderSet& precoders, EffectiveGains& out) {
  const int n_users = s.layout().num_users();
  const int users = s.users();
  const double sqrt_rho = std::sqrt(s.downlink_power());
  out.alpha.resize(n_users, n_users);
  for (int bs = 0; bs < s.cells(); ++bs) {
    out.alpha.middleCols(bs * users, users).noalias() =
        sqrt_rho * (est.channels[bs].adjoint() * precoders.w.middleCols(bs * users, users));
  }
}

EffectiveGains effective_gains(const Scenario& s, const ChannelEstimates& est,
                               const PrecoderSet& precoders) {
  EffectiveGains out;
  effective_gains(s, est, precoders, out);
  return out;
}

}  // namespace dlgain
