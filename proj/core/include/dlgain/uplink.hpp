#pragma once

#include <vector>

#include "dlgain/linalg.hpp"
#include "dlgain/scenario.hpp"

namespace dlgain {

// Long-term MMSE statistics of the serving-link estimate of user (l, k).
struct UserStatistics {
  // Psi = sum over pilot-sharing cells of tau_p p R^l_{l'k} + sigma_ul^2 I.
  HermitianPsd psi;
  // Psi^{-1} R^l_{lk}.
  CMatrix psi_inv_r;
  // sqrt(p) R Psi^{-1}, applied to the despread pilot observation.
  CMatrix estimator;
  // Phi = tau_p p R Psi^{-1} R and C = R - Phi.
  HermitianPsd est_cov;
  HermitianPsd err_cov;
  double trace_phi = 0.0;
};

class UplinkStatistics {
 public:
  UplinkStatistics() = default;
  // Uncorrelated mode when `users` is empty.
  UplinkStatistics(Layout layout, int antennas, std::vector<UserStatistics> users,
                   std::vector<double> psi_scalar, std::vector<double> gamma);

  bool iid() const { return iid_; }
  const Layout& layout() const { return layout_; }

  // Correlated mode only.
  const UserStatistics& user(int cell, int k) const;

  // tr(Phi_{lk}); M gamma^l_{lk} in uncorrelated mode.
  double trace_phi(int cell, int k) const { return trace_phi_[layout_.user(cell, k)]; }

  // Uncorrelated mode only. psi^{bs}_k is the scalar Psi at BS `bs` for the
  // pilot of user k in `bs`'s pilot group.
  double psi(int bs, int k) const;
  // gamma^{bs}_{user_cell, k}: variance of the MMSE estimate of the link
  // from user (user_cell, k) to BS `bs`.
  double gamma(int user_cell, int k, int bs) const;

 private:
  Layout layout_;
  bool iid_ = false;
  std::vector<UserStatistics> users_;
  std::vector<double> trace_phi_;
  std::vector<double> psi_scalar_;
  std::vector<double> gamma_;
};

UplinkStatistics precompute_statistics(const Scenario& s);

// One block of true channels and serving-link estimates.
struct ChannelEstimates {
  // channels[bs].col(user(l, k)) = g^{bs}_{lk}.
  std::vector<CMatrix> channels;
  // Columns indexed by user(l, k): despread observation at the serving BS,
  // its MMSE estimate and the error g - g_hat.
  CMatrix despread;
  CMatrix g_hat;
  CMatrix error;
};

// Draws all channels, forms the despread pilot observations and computes the
// serving-link MMSE estimates. The overload reuses the storage in `out`.
ChannelEstimates run_uplink_training(const Scenario& s, const UplinkStatistics& stats, Rng& rng);
void run_uplink_training(const Scenario& s, const UplinkStatistics& stats, Rng& rng,
                         ChannelEstimates& out);

// MMSE estimate at BS `bs` of the channel of user (user_cell, k), computed
// from the despread observation of the pilot that user shares with (bs, k).
CVector cross_cell_estimate(const Scenario& s, const UplinkStatistics& stats,
                            const ChannelEstimates& est, int user_cell, int k, int bs);

}  // namespace dlgain
