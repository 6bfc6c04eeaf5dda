#pragma once

#include <json.hpp>
#include <set>
#include <string>

#include "dlgain/config.hpp"

namespace dlgain::detail {

// Reads the network keys present in `object` into `cfg` and records each
// consumed key so callers can reject unknown ones.
void apply_network_keys(const nlohmann::json& object, NetworkConfig& cfg,
                        std::set<std::string>& consumed);

void reject_unknown_keys(const nlohmann::json& object, const std::set<std::string>& consumed);

nlohmann::json parse_json_object(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace dlgain::detail
