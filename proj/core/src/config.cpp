#include <cmath>
#include <fstream>
#include <sstream>

#include "config_json.hpp"
#include "dlgain/error.hpp"

namespace dlgain {

std::string_view to_string(FadingMode mode) {
  return mode == FadingMode::kCorrelated ? "correlated" : "uncorrelated";
}

FadingMode parse_fading_mode(std::string_view text) {
  if (text == "correlated") return FadingMode::kCorrelated;
  if (text == "uncorrelated") return FadingMode::kUncorrelated;
  throw Error(ErrorCode::kConfigInvalid, "unknown fading mode '" + std::string(text) + "'");
}

int NetworkConfig::grid_side() const {
  return static_cast<int>(std::lround(std::sqrt(static_cast<double>(num_cells))));
}

void NetworkConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kConfigInvalid, msg); };
  if (num_cells < 1) fail("num_cells must be >= 1");
  if (grid_side() * grid_side() != num_cells) fail("num_cells must be a perfect square");
  if (users_per_cell < 1) fail("users_per_cell must be >= 1");
  if (num_antennas < users_per_cell) fail("num_antennas must be >= users_per_cell");
  if (pilot_reuse < 1) fail("pilot_reuse must be >= 1");
  if (num_cells % pilot_reuse != 0) fail("num_cells must be divisible by pilot_reuse");
  if (pilot_length() > coherence_length) fail("pilot length exceeds coherence_length");
  if (data_length() < 2) fail("need at least two downlink data symbols per block");
  if (!(area_side > 0.0)) fail("area_side must be positive");
  if (!(uplink_power > 0.0)) fail("uplink_power must be positive");
  if (downlink_max_power && !(*downlink_max_power > 0.0)) fail("downlink_max_power must be positive");
  if (!(noise_power_ul > 0.0) || !(noise_power_dl > 0.0)) fail("noise powers must be positive");
  if (!(asd >= 0.0)) fail("asd must be non-negative");
  if (!(min_distance > 0.0)) fail("min_distance must be positive");
  if (min_distance >= cell_side() / 2.0) fail("min_distance leaves no room inside a cell");
  if (!(shadow_std_db >= 0.0)) fail("shadow_std_db must be non-negative");
}

namespace detail {

nlohmann::json parse_json_object(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigInvalid, std::string("malformed config: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kConfigInvalid, "config must be a JSON object");
  return j;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigInvalid, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void apply_network_keys(const nlohmann::json& j, NetworkConfig& cfg,
                        std::set<std::string>& consumed) {
  auto get = [&](const char* key, auto& out) {
    if (!j.contains(key)) return false;
    consumed.insert(key);
    try {
      j.at(key).get_to(out);
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorCode::kConfigInvalid, std::string("bad value for '") + key + "'");
    }
    return true;
  };
  get("num_cells", cfg.num_cells);
  get("area_side", cfg.area_side);
  get("num_antennas", cfg.num_antennas);
  get("users_per_cell", cfg.users_per_cell);
  get("coherence_length", cfg.coherence_length);
  get("pilot_reuse", cfg.pilot_reuse);
  get("uplink_power", cfg.uplink_power);
  double value = 0.0;
  if (get("downlink_max_power", value)) cfg.downlink_max_power = value;
  get("snr_edge_db", cfg.snr_edge_db);
  if (get("noise_power_ul_dbm", value)) cfg.noise_power_ul = dbm_to_watts(value);
  if (get("noise_power_dl_dbm", value)) cfg.noise_power_dl = dbm_to_watts(value);
  if (get("asd_degrees", value)) cfg.asd = degrees_to_radians(value);
  get("min_distance", cfg.min_distance);
  get("shadow_std_db", cfg.shadow_std_db);
  std::string mode;
  if (get("fading_mode", mode)) cfg.fading_mode = parse_fading_mode(mode);
}

void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& consumed) {
  for (const auto& [key, value] : j.items()) {
    if (!consumed.contains(key)) {
      throw Error(ErrorCode::kConfigInvalid, "unknown config key '" + key + "'");
    }
  }
}

}  // namespace detail

NetworkConfig parse_network_config(std::string_view json_text) {
  const auto j = detail::parse_json_object(json_text);
  NetworkConfig cfg;
  std::set<std::string> consumed;
  detail::apply_network_keys(j, cfg, consumed);
  detail::reject_unknown_keys(j, consumed);
  cfg.validate();
  return cfg;
}

NetworkConfig load_network_config(const std::filesystem::path& path) {
  return parse_network_config(detail::read_text_file(path));
}

}  // namespace dlgain
