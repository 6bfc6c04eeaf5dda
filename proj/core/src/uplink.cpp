#include "dlgain/uplink.hpp"

#include <cmath>

#include "dlgain/error.hpp"

namespace dlgain {

UplinkStatistics::UplinkStatistics(Layout layout, int antennas, std::vector<UserStatistics> users,
                                   std::vector<double> psi_scalar, std::vector<double> gamma)
    : layout_(layout),
      iid_(users.empty()),
      users_(std::move(users)),
      psi_scalar_(std::move(psi_scalar)),
      gamma_(std::move(gamma)) {
  trace_phi_.resize(layout_.num_users());
  for (int l = 0; l < layout_.cells; ++l) {
    for (int k = 0; k < layout_.users; ++k) {
      const int u = layout_.user(l, k);
      trace_phi_[u] = iid_ ? antennas * gamma_[layout_.link(l, k, l)] : users_[u].trace_phi;
    }
  }
}

const UserStatistics& UplinkStatistics::user(int cell, int k) const {
  if (iid_) throw Error(ErrorCode::kWrongMode, "uncorrelated statistics have no matrices");
  return users_[layout_.user(cell, k)];
}

double UplinkStatistics::psi(int bs, int k) const {
  if (!iid_) throw Error(ErrorCode::kWrongMode, "scalar Psi exists only in uncorrelated mode");
  return psi_scalar_[layout_.user(bs, k)];
}

double UplinkStatistics::gamma(int user_cell, int k, int bs) const {
  if (!iid_) throw Error(ErrorCode::kWrongMode, "gamma exists only in uncorrelated mode");
  return gamma_[layout_.link(user_cell, k, bs)];
}

UplinkStatistics precompute_statistics(const Scenario& s) {
  const Layout& layout = s.layout();
  const PilotBook& pilots = s.pilots();
  const int m = s.antennas();
  const double tau_p = pilots.length();
  const double sigma2 = s.config().noise_power_ul;

  if (s.iid()) {
    std::vector<double> psi(layout.num_users());
    for (int bs = 0; bs < s.cells(); ++bs) {
      for (int k = 0; k < s.users(); ++k) {
        double sum = sigma2;
        for (int l2 = 0; l2 < s.cells(); ++l2) {
          if (pilots.shares_pilots(bs, l2)) sum += tau_p * s.pilot_power(l2, k) * s.beta(l2, k, bs);
        }
        psi[layout.user(bs, k)] = sum;
      }
    }
    // gamma^{bs}_{l k} uses Psi at BS bs for the pilot group of cell l, which
    // differs from bs's own group when the cells do not share pilots.
    std::vector<double> gamma(layout.num_links());
    for (int l = 0; l < s.cells(); ++l) {
      for (int k = 0; k < s.users(); ++k) {
        for (int bs = 0; bs < s.cells(); ++bs) {
          double psi_group = sigma2;
          for (int l2 = 0; l2 < s.cells(); ++l2) {
            if (pilots.shares_pilots(l, l2)) {
              psi_group += tau_p * s.pilot_power(l2, k) * s.beta(l2, k, bs);
            }
          }
          const double b = s.beta(l, k, bs);
          gamma[layout.link(l, k, bs)] = tau_p * s.pilot_power(l, k) * b * b / psi_group;
        }
      }
    }
    return UplinkStatistics(layout, m, {}, std::move(psi), std::move(gamma));
  }

  std::vector<UserStatistics> users(layout.num_users());
  for (int l = 0; l < s.cells(); ++l) {
    for (int k = 0; k < s.users(); ++k) {
      CMatrix psi = sigma2 * CMatrix::Identity(m, m);
      for (int l2 = 0; l2 < s.cells(); ++l2) {
        if (pilots.shares_pilots(l, l2)) {
          psi += tau_p * s.pilot_power(l2, k) * s.correlation(l2, k, l).matrix();
        }
      }
      UserStatistics& u = users[layout.user(l, k)];
      u.psi = HermitianPsd(0.5 * (psi + psi.adjoint()));
      const CMatrix& r = s.correlation(l, k, l).matrix();
      u.psi_inv_r = hermitian_solve(u.psi, r);
      const double p = s.pilot_power(l, k);
      // R Psi^{-1} = (Psi^{-1} R)^H since both are Hermitian.
      u.estimator = std::sqrt(p) * u.psi_inv_r.adjoint();
      CMatrix phi = tau_p * p * r * u.psi_inv_r;
      phi = 0.5 * (phi + phi.adjoint()).eval();
      CMatrix c = r - phi;
      c = 0.5 * (c + c.adjoint()).eval();
      u.est_cov = HermitianPsd(std::move(phi));
      u.err_cov = HermitianPsd(std::move(c));
      u.est_cov.factorize();
      u.trace_phi = u.est_cov.trace();
    }
  }
  return UplinkStatistics(layout, m, std::move(users), {}, {});
}

void run_uplink_training(const Scenario& s, const UplinkStatistics& stats, Rng& rng,
                         ChannelEstimates& out) {
  const Layout& layout = s.layout();
  const PilotBook& pilots = s.pilots();
  const int m = s.antennas();
  const int n_users = layout.num_users();
  const double tau_p = pilots.length();

  out.channels.resize(s.cells());
  for (int bs = 0; bs < s.cells(); ++bs) {
    CMatrix& g = out.channels[bs];
    g.resize(m, n_users);
    fill_standard_cn(rng, {g.data(), static_cast<std::size_t>(g.size())});
    for (int l = 0; l < s.cells(); ++l) {
      for (int k = 0; k < s.users(); ++k) {
        const int u = layout.user(l, k);
        if (s.iid()) {
          g.col(u) *= std::sqrt(s.beta(l, k, bs));
        } else {
          const CVector v = g.col(u);
          g.col(u).noalias() = s.correlation(l, k, bs).cholesky().triangularView<Eigen::Lower>() * v;
        }
      }
    }
  }

  out.despread.resize(m, n_users);
  out.g_hat.resize(m, n_users);
  fill_standard_cn(rng, {out.despread.data(), static_cast<std::size_t>(out.despread.size())});
  const double noise_scale = std::sqrt(tau_p * s.config().noise_power_ul);
  for (int l = 0; l < s.cells(); ++l) {
    const CMatrix& g = out.channels[l];
    for (int k = 0; k < s.users(); ++k) {
      const int u = layout.user(l, k);
      auto y = out.despread.col(u);
      y *= noise_scale;
      for (int l2 = 0; l2 < s.cells(); ++l2) {
        if (pilots.shares_pilots(l, l2)) {
          y += (tau_p * std::sqrt(s.pilot_power(l2, k))) * g.col(layout.user(l2, k));
        }
      }
      if (s.iid()) {
        const double scale = std::sqrt(s.pilot_power(l, k)) * s.beta(l, k, l) / stats.psi(l, k);
        out.g_hat.col(u) = scale * y;
      } else {
        out.g_hat.col(u).noalias() = stats.user(l, k).estimator * y;
      }
    }
  }
  out.error.resize(m, n_users);
  for (int l = 0; l < s.cells(); ++l) {
    for (int k = 0; k < s.users(); ++k) {
      const int u = layout.user(l, k);
      out.error.col(u) = out.channels[l].col(u) - out.g_hat.col(u);
    }
  }
}

ChannelEstimates run_uplink_training(const Scenario& s, const UplinkStatistics& stats, Rng& rng) {
  ChannelEstimates out;
  run_uplink_training(s, stats, rng, out);
  return out;
}

CVector cross_cell_estimate(const Scenario& s, const UplinkStatistics& stats,
                            const ChannelEstimates& est, int user_cell, int k, int bs) {
  if (!s.pilots().shares_pilots(user_cell, bs)) {
    throw Error(ErrorCode::kWrongMode, "cells do not share pilots");
  }
  const auto y = est.despread.col(s.layout().user(bs, k));
  const double sqrt_p = std::sqrt(s.pilot_power(user_cell, k));
  if (s.iid()) {
    return (sqrt_p * s.beta(user_cell, k, bs) / stats.psi(bs, k)) * y;
  }
  const CMatrix& r = s.correlation(user_cell, k, bs).matrix();
  return sqrt_p * (r * hermitian_solve(stats.user(bs, k).psi, y));
}

}  // namespace dlgain
