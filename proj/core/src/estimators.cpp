#include "dlgain/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "dlgain/block.hpp"
#include "dlgain/error.hpp"
#include "dlgain/mlp.hpp"

namespace dlgain {
namespace {

double trace_product(const CMatrix& a, const CMatrix& b) {
  return (a.transpose().array() * b.array()).sum().real();
}

Complex trace_product_complex(const CMatrix& a, const CMatrix& b) {
  return (a.transpose().array() * b.array()).sum();
}

void require_mr_average(const PrecodingPlan& plan) {
  if (plan.options.scheme != Scheme::kMr || plan.options.mr_norm != MrNorm::kAverage) {
    throw Error(ErrorCode::kWrongMode, "closed form needs MR with average normalization");
  }
}

Eigen::MatrixXd mr_correlated_moments(const Scenario& s, const UplinkStatistics& stats,
                                      bool as_printed) {
  if (stats.iid()) throw Error(ErrorCode::kWrongMode, "correlated closed form needs matrices");
  const Layout& layout = s.layout();
  const int n = layout.num_users();
  const double rho = s.downlink_power();
  const double tau_p = s.pilots().length();
  Eigen::MatrixXd out(n, n);
  for (int l = 0; l < s.cells(); ++l) {
    for (int k = 0; k < s.users(); ++k) {
      const int u = layout.user(l, k);
      for (int l2 = 0; l2 < s.cells(); ++l2) {
        const CMatrix& r_u = s.correlation(l, k, l2).matrix();
        for (int k2 = 0; k2 < s.users(); ++k2) {
          const int u2 = layout.user(l2, k2);
          const UserStatistics& served = stats.user(l2, k2);
          double value = trace_product(served.est_cov.matrix(), r_u) / served.trace_phi;
          if (k2 == k && s.pilots().shares_pilots(l, l2)) {
            // |E{g^H g_hat}|^2 / tr(Phi) for the pilot-sharing estimate.
            const CMatrix& r_served = s.correlation(l2, k, l2).matrix();
            Complex cross;
            double denom;
            if (as_printed && l2 != l) {
              const CMatrix x = hermitian_solve(stats.user(l, k).psi, r_served);
              cross = trace_product_complex(r_u, x);
              denom = trace_product(r_served, x);
            } else {
              cross = trace_product_complex(r_u, served.psi_inv_r);
              denom = served.trace_phi / (tau_p * s.pilot_power(l2, k));
            }
            value += tau_p * s.pilot_power(l, k) * std::norm(cross) / denom;
          }
          out(u, u2) = rho * value;
        }
      }
    }
  }
  return out;
}

Eigen::MatrixXd mr_iid_moments(const Scenario& s, const UplinkStatistics& stats) {
  if (!stats.iid()) throw Error(ErrorCode::kWrongMode, "i.i.d. closed form needs uncorrelated fading");
  const Layout& layout = s.layout();
  const int n = layout.num_users();
  const double rho = s.downlink_power();
  const double m = s.antennas();
  Eigen::MatrixXd out(n, n);
  for (int l = 0; l < s.cells(); ++l) {
    for (int k = 0; k < s.users(); ++k) {
      for (int l2 = 0; l2 < s.cells(); ++l2) {
        for (int k2 = 0; k2 < s.users(); ++k2) {
          double value = s.beta(l, k, l2);
          if (k2 == k && s.pilots().shares_pilots(l, l2)) value += m * stats.gamma(l, k, l2);
          out(layout.user(l, k), layout.user(l2, k2)) = rho * value;
        }
      }
    }
  }
  return out;
}

Eigen::MatrixXd zf_iid_moments(const Scenario& s, const UplinkStatistics& stats) {
  if (!stats.iid()) throw Error(ErrorCode::kWrongMode, "i.i.d. closed form needs uncorrelated fading");
  if (s.antennas() <= s.users()) {
    throw Error(ErrorCode::kInsufficientAntennas, "zero-forcing needs more antennas than users");
  }
  const Layout& layout = s.layout();
  const int n = layout.num_users();
  const double rho = s.downlink_power();
  const double dof = s.antennas() - s.users();
  Eigen::MatrixXd out(n, n);
  for (int l = 0; l < s.cells(); ++l) {
    for (int k = 0; k < s.users(); ++k) {
      for (int l2 = 0; l2 < s.cells(); ++l2) {
        const double beta = s.beta(l, k, l2);
        const bool shared = s.pilots().shares_pilots(l, l2);
        const double gamma = shared ? stats.gamma(l, k, l2) : 0.0;
        for (int k2 = 0; k2 < s.users(); ++k2) {
          double value = shared ? beta - gamma : beta;
          if (shared && k2 == k) value += dof * gamma;
          out(layout.user(l, k), layout.user(l2, k2)) = rho * value;
        }
      }
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(TMethod method) {
  switch (method) {
    case TMethod::kMrCorrelated: return "mr_correlated";
    case TMethod::kMrCorrelatedAsPrinted: return "mr_correlated_as_printed";
    case TMethod::kMrIid: return "mr_iid";
    case TMethod::kZfIid: return "zf_iid";
    case TMethod::kMonteCarlo: return "monte_carlo";
  }
  return "unknown";
}

std::string_view to_string(Branch branch) {
  switch (branch) {
    case Branch::kBlind: return "blind";
    case Branch::kFallbackMean: return "fallback_mean";
    case Branch::kOracle: return "oracle";
    case Branch::kNeural: return "neural";
  }
  return "unknown";
}

Eigen::MatrixXd expected_gain_power(const Scenario& s, const UplinkStatistics& stats,
                                    const PrecodingPlan& plan, TMethod method) {
  switch (method) {
    case TMethod::kMrCorrelated:
      require_mr_average(plan);
      return mr_correlated_moments(s, stats, false);
    case TMethod::kMrCorrelatedAsPrinted:
      require_mr_average(plan);
      return mr_correlated_moments(s, stats, true);
    case TMethod::kMrIid:
      require_mr_average(plan);
      return mr_iid_moments(s, stats);
    case TMethod::kZfIid:
      if (plan.options.scheme != Scheme::kZf) {
        throw Error(ErrorCode::kWrongMode, "ZF closed form needs a ZF plan");
      }
      return zf_iid_moments(s, stats);
    case TMethod::kMonteCarlo:
      break;
  }
  throw Error(ErrorCode::kWrongMode, "Monte Carlo moments have no closed form");
}

InterferenceConstant interference_from_moments(const Scenario& s,
                                               const Eigen::MatrixXd& expected, TMethod method) {
  const int n = s.layout().num_users();
  InterferenceConstant out;
  out.method = method;
  out.t.assign(n, s.config().noise_power_dl);
  out.std_error.assign(n, 0.0);
  for (int u = 0; u < n; ++u) {
    for (int u2 = 0; u2 < n; ++u2) {
      if (u2 != u) out.t[u] += s.eta()[u2] * expected(u, u2);
    }
  }
  return out;
}

InterferenceConstant t_mr_correlated(const Scenario& s, const UplinkStatistics& stats,
                                     const PrecodingPlan& plan) {
  return interference_from_moments(
      s, expected_gain_power(s, stats, plan, TMethod::kMrCorrelated), TMethod::kMrCorrelated);
}

InterferenceConstant t_mr_correlated_as_printed(const Scenario& s, const UplinkStatistics& stats,
                                                const PrecodingPlan& plan) {
  return interference_from_moments(
      s, expected_gain_power(s, stats, plan, TMethod::kMrCorrelatedAsPrinted),
      TMethod::kMrCorrelatedAsPrinted);
}

InterferenceConstant t_mr_iid(const Scenario& s, const UplinkStatistics& stats,
                              const PrecodingPlan& plan) {
  return interference_from_moments(s, expected_gain_power(s, stats, plan, TMethod::kMrIid),
                                   TMethod::kMrIid);
}

InterferenceConstant t_zf_iid(const Scenario& s, const UplinkStatistics& stats,
                              const PrecodingPlan& plan) {
  return interference_from_moments(s, expected_gain_power(s, stats, plan, TMethod::kZfIid),
                                   TMethod::kZfIid);
}

MonteCarloMoments monte_carlo_moments(const Scenario& s, const UplinkStatistics& stats,
                                      const PrecodingPlan& plan, int n_blocks, Rng& rng) {
  if (n_blocks < 1000) throw Error(ErrorCode::kConfigInvalid, "Monte Carlo needs >= 1000 blocks");
  const int n = s.layout().num_users();
  const std::vector<double>& eta = s.eta();

  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXcd own_sum = Eigen::VectorXcd::Zero(n);
  Eigen::VectorXd own_sq = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd interf_sum = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd interf_sq = Eigen::VectorXd::Zero(n);
  Eigen::Map<const Eigen::VectorXd> eta_vec(eta.data(), n);

  ChannelBlock block;
  for (int b = 0; b < n_blocks; ++b) {
    generate_block(s, stats, plan, rng, block);
    const Eigen::MatrixXd power = block.gains.alpha.cwiseAbs2();
    sum += power;
    sum_sq += power.cwiseAbs2();
    const Eigen::VectorXcd own = block.gains.alpha.diagonal();
    own_sum += own;
    own_sq += own.cwiseAbs2();
    const Eigen::VectorXd interf = power * eta_vec - power.diagonal().cwiseProduct(eta_vec);
    interf_sum += interf;
    interf_sq += interf.cwiseAbs2();
  }

  const double nb = n_blocks;
  auto std_err = [nb](double s1, double s2) {
    const double mean = s1 / nb;
    return std::sqrt(std::max(0.0, s2 / nb - mean * mean) / (nb - 1.0));
  };

  MonteCarloMoments out;
  out.n_blocks = n_blocks;
  out.mean_power = sum / nb;
  out.power_std_error.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out.power_std_error(i, j) = std_err(sum(i, j), sum_sq(i, j));
  }
  out.t.method = TMethod::kMonteCarlo;
  out.t.t.resize(n);
  out.t.std_error.resize(n);
  out.mean_own_gain.resize(n);
  out.own_gain_std_error.resize(n);
  for (int u = 0; u < n; ++u) {
    out.t.t[u] = interf_sum(u) / nb + s.config().noise_power_dl;
    out.t.std_error[u] = std_err(interf_sum(u), interf_sq(u));
    out.mean_own_gain[u] = own_sum(u) / nb;
    const double var = std::max(0.0, own_sq(u) / nb - std::norm(out.mean_own_gain[u]));
    out.own_gain_std_error[u] = std::sqrt(var / (nb - 1.0));
  }
  return out;
}

InterferenceConstant t_monte_carlo(const Scenario& s, const UplinkStatistics& stats,
                                   const PrecodingPlan& plan, int n_blocks, Rng& rng) {
  return monte_carlo_moments(s, stats, plan, n_blocks, rng).t;
}

InterferenceConstant interference_constant(const Scenario& s, const UplinkStatistics& stats,
                                           const PrecodingPlan& plan, int mc_blocks, Rng& rng) {
  if (plan.options.scheme == Scheme::kMr && plan.options.mr_norm == MrNorm::kAverage) {
    return s.iid() ? t_mr_iid(s, stats, plan) : t_mr_correlated(s, stats, plan);
  }
  if (plan.options.scheme == Scheme::kZf && s.iid() &&
      plan.options.zf_norm == ZfNormMode::kAnalyticIid) {
    return t_zf_iid(s, stats, plan);
  }
  return t_monte_carlo(s, stats, plan, mc_blocks, rng);
}

double hardening_mean(const Scenario& s, const PrecodingPlan& plan, int user) {
  const double c = plan.norm_constant[static_cast<std::size_t>(user)];
  if (plan.options.scheme == Scheme::kMr) {
    if (plan.options.mr_norm != MrNorm::kAverage) {
      throw Error(ErrorCode::kWrongMode, "hardening mean needs average MR normalization");
    }
    return std::sqrt(s.downlink_power() * c);
  }
  return std::sqrt(s.downlink_power() / c);
}

GainEstimate model_aided_estimate(double xi, double t, double eta, double theta, double fallback) {
  if (!(t >= 0.0) || !(eta > 0.0) || !(theta >= t)) {
    throw Error(ErrorCode::kConfigInvalid, "model-aided estimate needs t >= 0, eta > 0, theta >= t");
  }
  if (xi > theta) return {std::sqrt((xi - t) / eta), Branch::kBlind};
  return {fallback, Branch::kFallbackMean};
}

GainEstimate oracle_estimate(const EffectiveGains& gains, const std::vector<double>& eta,
                             double sigma_dl, double t, int user, double theta, double fallback) {
  const double xi = asymptotic_xi(gains, eta, sigma_dl, user);
  GainEstimate est = model_aided_estimate(xi, t, eta[static_cast<std::size_t>(user)], theta, fallback);
  if (est.branch == Branch::kBlind) est.branch = Branch::kOracle;
  return est;
}

GainEstimate neural_estimate(const MlpModel& model, double xi_loo, double t, double eta_rho_beta) {
  if (!model.loaded()) throw Error(ErrorCode::kModelNotLoaded, "no trained model");
  const Eigen::RowVector3d features(xi_loo, t, eta_rho_beta);
  if (!features.allFinite()) throw Error(ErrorCode::kDimensionMismatch, "features must be finite");
  return {std::max(0.0, predict(model, features)), Branch::kNeural};
}

}  // namespace dlgain
