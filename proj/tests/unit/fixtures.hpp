#pragma once

#include <functional>

#include "dlgain/scenario.hpp"

namespace dlgain::test {

inline NetworkConfig small_config(int cells, int users, int antennas,
                                  FadingMode mode = FadingMode::kUncorrelated) {
  NetworkConfig cfg;
  cfg.num_cells = cells;
  cfg.users_per_cell = users;
  cfg.num_antennas = antennas;
  cfg.fading_mode = mode;
  return cfg;
}

// Hand-built uncorrelated scenario with beta(user_cell, k, bs) from `gain`.
inline Scenario iid_scenario(const NetworkConfig& cfg,
                             const std::function<double(int, int, int)>& gain,
                             double rho = 1.0) {
  ScenarioParts parts;
  parts.config = cfg;
  parts.downlink_power = rho;
  const Layout layout{cfg.num_cells, cfg.users_per_cell};
  parts.beta.resize(static_cast<std::size_t>(layout.num_links()));
  for (int l = 0; l < cfg.num_cells; ++l) {
    for (int k = 0; k < cfg.users_per_cell; ++k) {
      for (int b = 0; b < cfg.num_cells; ++b) parts.beta[layout.link(l, k, b)] = gain(l, k, b);
    }
  }
  return Scenario(std::move(parts));
}

// Hand-built correlated scenario with R(user_cell, k, bs) from `corr`.
inline Scenario correlated_scenario(const NetworkConfig& cfg,
                                    const std::function<CMatrix(int, int, int)>& corr,
                                    double rho = 1.0) {
  ScenarioParts parts;
  parts.config = cfg;
  parts.downlink_power = rho;
  const Layout layout{cfg.num_cells, cfg.users_per_cell};
  parts.correlation.resize(static_cast<std::size_t>(layout.num_links()));
  for (int l = 0; l < cfg.num_cells; ++l) {
    for (int k = 0; k < cfg.users_per_cell; ++k) {
      for (int b = 0; b < cfg.num_cells; ++b) {
        parts.correlation[layout.link(l, k, b)] = HermitianPsd(corr(l, k, b));
      }
    }
  }
  return Scenario(std::move(parts));
}

// Well-conditioned random PSD matrix with trace M * beta.
inline CMatrix random_psd(int m, double beta, Rng& rng) {
  CMatrix b(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) b(i, j) = standard_cn(rng);
  }
  CMatrix a = b * b.adjoint() + CMatrix::Identity(m, m) * static_cast<double>(m);
  a = (a + a.adjoint()).eval() * 0.5;
  return a * (beta * m / a.trace().real());
}

inline double rel_frobenius(const CMatrix& a, const CMatrix& b) { return (a - b).norm() / b.norm(); }

}  // namespace dlgain::test
