#include "dlgain/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dlgain/error.hpp"

namespace dlgain {
namespace {

constexpr int kMaxShadowRedraws = 1000;
constexpr int kCalibrationDraws = 10000;
constexpr std::uint64_t kCalibrationSeed = 0xd1a9'0001;

std::vector<Point> grid_bs_positions(const NetworkConfig& cfg) {
  const int side = cfg.grid_side();
  const double cs = cfg.cell_side();
  std::vector<Point> out(cfg.num_cells);
  for (int l = 0; l < cfg.num_cells; ++l) {
    out[l] = {(l % side + 0.5) * cs, (l / side + 0.5) * cs};
  }
  return out;
}

}  // namespace

Point wrap_offset(Point a, Point b, double area_side) {
  Point best{b.x - a.x, b.y - a.y};
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int sx = -1; sx <= 1; ++sx) {
    for (int sy = -1; sy <= 1; ++sy) {
      const double dx = b.x + sx * area_side - a.x;
      const double dy = b.y + sy * area_side - a.y;
      const double d2 = dx * dx + dy * dy;
      if (d2 < best_d2) {
        best_d2 = d2;
        best = {dx, dy};
      }
    }
  }
  return best;
}

double wrap_distance(Point a, Point b, double area_side) {
  const Point d = wrap_offset(a, b, area_side);
  return std::hypot(d.x, d.y);
}

double pathloss_db(double distance, double shadow_db, double min_distance) {
  if (distance < min_distance) {
    throw Error(ErrorCode::kBelowMinDistance,
                "distance " + std::to_string(distance) + " m below minimum");
  }
  return -35.0 - 36.7 * std::log10(distance) + shadow_db;
}

HermitianPsd local_scattering_r(double beta, double nominal_aoa, double asd, int antennas) {
  const double s = std::sin(nominal_aoa);
  const double c = std::cos(nominal_aoa);
  // Toeplitz: entries depend only on the offset m - n.
  CVector first(antennas);
  for (int d = 0; d < antennas; ++d) {
    const double spread = std::numbers::pi * d * c;
    first(d) = beta * std::polar(std::exp(-0.5 * asd * asd * spread * spread),
                                 std::numbers::pi * d * s);
  }
  CMatrix r(antennas, antennas);
  for (int m = 0; m < antennas; ++m) {
    for (int n = 0; n < antennas; ++n) {
      r(m, n) = m >= n ? first(m - n) : std::conj(first(n - m));
    }
  }
  return HermitianPsd(std::move(r));
}

double calibrate_downlink_power(const NetworkConfig& cfg) {
  if (cfg.downlink_max_power) return *cfg.downlink_max_power;
  const double d_edge = cfg.cell_side() * std::numbers::sqrt2 / 2.0;
  Rng rng = make_stream(kCalibrationSeed, stream::kCalibration);
  std::vector<double> snr_db(kCalibrationDraws);
  for (auto& v : snr_db) {
    const double shadow = cfg.shadow_std_db * standard_normal(rng);
    v = pathloss_db(d_edge, shadow) - linear_to_db(cfg.noise_power_dl);
  }
  const auto mid = snr_db.begin() + kCalibrationDraws / 2;
  std::nth_element(snr_db.begin(), mid, snr_db.end());
  const double median_hi = *mid;
  const double median_lo = *std::max_element(snr_db.begin(), mid);
  const double median_db = 0.5 * (median_lo + median_hi);
  // rho * beta / sigma^2 = S  <=>  rho_dB = S_dB - (beta/sigma^2)_dB.
  return db_to_linear(cfg.snr_edge_db - median_db);
}

Scenario::Scenario(ScenarioParts parts) : parts_(std::move(parts)) {
  parts_.config.validate();
  const auto& cfg = parts_.config;
  layout_ = {cfg.num_cells, cfg.users_per_cell};
  const auto links = static_cast<std::size_t>(layout_.num_links());

  if (!parts_.correlation.empty()) {
    if (parts_.correlation.size() != links) {
      throw Error(ErrorCode::kDimensionMismatch, "need one correlation matrix per link");
    }
    parts_.beta.resize(links);
    for (std::size_t i = 0; i < links; ++i) {
      auto& r = parts_.correlation[i];
      if (r.size() != cfg.num_antennas) {
        throw Error(ErrorCode::kDimensionMismatch, "correlation matrix has wrong size");
      }
      r.factorize();
      parts_.beta[i] = r.trace() / cfg.num_antennas;
    }
  } else if (parts_.beta.size() != links) {
    throw Error(ErrorCode::kDimensionMismatch, "need one large-scale gain per link");
  }
  for (double b : parts_.beta) {
    if (!(b >= 0.0) || !std::isfinite(b)) {
      throw Error(ErrorCode::kConfigInvalid, "large-scale gains must be finite and >= 0");
    }
  }
  if (!(parts_.downlink_power > 0.0)) {
    throw Error(ErrorCode::kConfigInvalid, "downlink power must be positive");
  }
  pilots_ = assign_pilots(cfg);
  eta_.assign(layout_.num_users(), 1.0 / cfg.users_per_cell);
}

const HermitianPsd& Scenario::correlation(int user_cell, int user, int bs) const {
  if (iid()) throw Error(ErrorCode::kWrongMode, "uncorrelated scenario stores no matrices");
  return parts_.correlation[layout_.link(user_cell, user, bs)];
}

CMatrix Scenario::correlation_matrix(int user_cell, int user, int bs) const {
  if (iid()) {
    const int m = antennas();
    return CMatrix::Identity(m, m) * beta(user_cell, user, bs);
  }
  return correlation(user_cell, user, bs).matrix();
}

double Scenario::shadow_db(int user_cell, int user, int bs) const {
  return parts_.shadow_db.empty() ? 0.0 : parts_.shadow_db[layout_.link(user_cell, user, bs)];
}

double Scenario::nominal_aoa(int user_cell, int user, int bs) const {
  return parts_.nominal_aoa.empty() ? 0.0
                                    : parts_.nominal_aoa[layout_.link(user_cell, user, bs)];
}

CVector Scenario::sample_channel(int user_cell, int user, int bs, Rng& rng) const {
  if (iid()) {
    CVector v(antennas());
    fill_standard_cn(rng, {v.data(), static_cast<std::size_t>(v.size())});
    return v * std::sqrt(beta(user_cell, user, bs));
  }
  return sample_cn(correlation(user_cell, user, bs), rng);
}

Scenario build_scenario(const NetworkConfig& cfg, Rng& rng) {
  cfg.validate();
  const Layout layout{cfg.num_cells, cfg.users_per_cell};
  const int num_links = layout.num_links();

  ScenarioParts parts;
  parts.config = cfg;
  parts.downlink_power = calibrate_downlink_power(cfg);
  parts.bs_positions = grid_bs_positions(cfg);
  parts.user_positions.resize(layout.num_users());
  parts.beta.resize(num_links);
  parts.shadow_db.resize(num_links);
  parts.nominal_aoa.resize(num_links);

  const double cs = cfg.cell_side();
  std::vector<double> distance(cfg.num_cells);
  std::vector<double> shadow(cfg.num_cells);
  for (int l = 0; l < cfg.num_cells; ++l) {
    const Point bs = parts.bs_positions[l];
    for (int k = 0; k < cfg.users_per_cell; ++k) {
      Point pos;
      do {
        pos = {bs.x + uniform(rng, -cs / 2, cs / 2), bs.y + uniform(rng, -cs / 2, cs / 2)};
      } while (std::hypot(pos.x - bs.x, pos.y - bs.y) < cfg.min_distance);
      parts.user_positions[layout.user(l, k)] = pos;

      for (int j = 0; j < cfg.num_cells; ++j) {
        distance[j] = wrap_distance(parts.bs_positions[j], pos, cfg.area_side);
      }
      bool serving_strongest = false;
      for (int attempt = 0; attempt < kMaxShadowRedraws && !serving_strongest; ++attempt) {
        for (int j = 0; j < cfg.num_cells; ++j) shadow[j] = cfg.shadow_std_db * standard_normal(rng);
        const double serving = pathloss_db(distance[l], shadow[l], cfg.min_distance);
        serving_strongest = true;
        for (int j = 0; j < cfg.num_cells; ++j) {
          if (j != l && pathloss_db(distance[j], shadow[j]) > serving) serving_strongest = false;
        }
      }
      if (!serving_strongest) {
        throw Error(ErrorCode::kNonConvergentShadowing, "serving BS never strongest");
      }
      for (int j = 0; j < cfg.num_cells; ++j) {
        const int link = layout.link(l, k, j);
        parts.shadow_db[link] = shadow[j];
        parts.beta[link] = db_to_linear(pathloss_db(distance[j], shadow[j]));
        const Point d = wrap_offset(parts.bs_positions[j], pos, cfg.area_side);
        parts.nominal_aoa[link] = std::atan2(d.y, d.x);
      }
    }
  }

  if (cfg.fading_mode == FadingMode::kCorrelated) {
    parts.correlation.reserve(num_links);
    for (int link = 0; link < num_links; ++link) {
      parts.correlation.push_back(local_scattering_r(parts.beta[link], parts.nominal_aoa[link],
                                                     cfg.asd, cfg.num_antennas));
    }
  }
  return Scenario(std::move(parts));
}

}  // namespace dlgain
