#pragma once

#include <cmath>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

namespace dlgain {

enum class FadingMode { kCorrelated, kUncorrelated };

std::string_view to_string(FadingMode mode);
FadingMode parse_fading_mode(std::string_view text);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double dbm_to_watts(double dbm) { return db_to_linear(dbm - 30.0); }
inline double degrees_to_radians(double deg) { return deg * std::numbers::pi / 180.0; }

// Static description of the simulated network. Powers are in watts,
// distances in meters, angles in radians.
struct NetworkConfig {
  int num_cells = 4;
  double area_side = 500.0;
  int num_antennas = 64;
  int users_per_cell = 3;
  int coherence_length = 500;
  int pilot_reuse = 1;
  double uplink_power = 0.1;
  // When unset, the downlink power is calibrated from snr_edge_db.
  std::optional<double> downlink_max_power;
  double snr_edge_db = 10.0;
  // -94 dBm over a 20 MHz band.
  double noise_power_ul = dbm_to_watts(-94.0);
  double noise_power_dl = dbm_to_watts(-94.0);
  double asd = degrees_to_radians(7.0);
  double min_distance = 35.0;
  double shadow_std_db = 7.0;
  FadingMode fading_mode = FadingMode::kCorrelated;

  int pilot_length() const { return pilot_reuse * users_per_cell; }
  int data_length() const { return coherence_length - pilot_length(); }
  int grid_side() const;
  double cell_side() const { return area_side / grid_side(); }

  // Throws Error(kConfigInvalid) describing the first violated constraint.
  void validate() const;
};

NetworkConfig parse_network_config(std::string_view json_text);
NetworkConfig load_network_config(const std::filesystem::path& path);

}  // namespace dlgain
