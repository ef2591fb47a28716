#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace optotherm {

// Canned configurations for the documented device regimes. Each preset is a
// complete config document; CLI flags and user config keys override it.
const std::vector<std::string>& preset_names();
bool is_preset(std::string_view name);
nlohmann::json preset_config(std::string_view name);  // throws ConfigError

}  // namespace optotherm
