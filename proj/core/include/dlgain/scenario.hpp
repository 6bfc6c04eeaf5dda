#pragma once

#include <vector>

#include "dlgain/config.hpp"
#include "dlgain/layout.hpp"
#include "dlgain/linalg.hpp"
#include "dlgain/pilots.hpp"
#include "dlgain/random.hpp"

namespace dlgain {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Minimum Euclidean distance between a and the 9 wrapped copies of b.
double wrap_distance(Point a, Point b, double area_side);

// Displacement from a to the nearest wrapped copy of b.
Point wrap_offset(Point a, Point b, double area_side);

// Large-scale fading in dB: -35 - 36.7 log10(d / 1 m) + shadow_db.
double pathloss_db(double distance, double shadow_db, double min_distance = 0.0);

// Approximate Gaussian local scattering model for a half-wavelength ULA:
//   [R]_{m,n} = beta e^{j pi (m-n) sin(aoa)} e^{-asd^2/2 (pi (m-n) cos(aoa))^2}
HermitianPsd local_scattering_r(double beta, double nominal_aoa, double asd, int antennas);

// Downlink power giving median rho * beta(d_edge) / sigma_dl^2 equal to the
// configured cell-edge SNR, with d_edge half the cell diagonal and the median
// taken over 10^4 shadow-fading draws from a fixed stream.
double calibrate_downlink_power(const NetworkConfig& cfg);

// Everything needed to assemble a Scenario; build_scenario fills it from a
// random drop, tests fill it by hand.
struct ScenarioParts {
  NetworkConfig config;
  double downlink_power = 1.0;
  // Indexed by Layout::link (user cell, user, BS).
  std::vector<double> beta;
  // Correlated mode: one matrix per link. Left empty in uncorrelated mode,
  // where R = beta I. When non-empty, beta is recomputed as tr(R)/M.
  std::vector<HermitianPsd> correlation;
  std::vector<double> shadow_db;
  std::vector<double> nominal_aoa;
  std::vector<Point> bs_positions;
  std::vector<Point> user_positions;
};

class Scenario {
 public:
  explicit Scenario(ScenarioParts parts);

  const NetworkConfig& config() const { return parts_.config; }
  const Layout& layout() const { return layout_; }
  const PilotBook& pilots() const { return pilots_; }

  int cells() const { return layout_.cells; }
  int users() const { return layout_.users; }
  int antennas() const { return parts_.config.num_antennas; }
  bool iid() const { return parts_.correlation.empty(); }

  double beta(int user_cell, int user, int bs) const {
    return parts_.beta[layout_.link(user_cell, user, bs)];
  }
  // Correlated scenarios only.
  const HermitianPsd& correlation(int user_cell, int user, int bs) const;
  // R as a dense matrix in either mode.
  CMatrix correlation_matrix(int user_cell, int user, int bs) const;

  double eta(int cell, int user) const { return eta_[layout_.user(cell, user)]; }
  const std::vector<double>& eta() const { return eta_; }
  double downlink_power() const { return parts_.downlink_power; }
  double pilot_power(int /*cell*/, int /*user*/) const { return parts_.config.uplink_power; }

  const std::vector<Point>& bs_positions() const { return parts_.bs_positions; }
  const std::vector<Point>& user_positions() const { return parts_.user_positions; }
  double shadow_db(int user_cell, int user, int bs) const;
  double nominal_aoa(int user_cell, int user, int bs) const;

  // g^{bs}_{user} ~ CN(0, R) for one link.
  CVector sample_channel(int user_cell, int user, int bs, Rng& rng) const;

 private:
  ScenarioParts parts_;
  Layout layout_;
  PilotBook pilots_;
  std::vector<double> eta_;
};

// Square grid of cells with wrap-around, uniform user drops at least
// min_distance from the serving BS, 7 dB log-normal shadowing redrawn until
// the serving BS is strongest, equal power split eta = 1/K.
Scenario build_scenario(const NetworkConfig& cfg, Rng& rng);

}  // namespace dlgain
