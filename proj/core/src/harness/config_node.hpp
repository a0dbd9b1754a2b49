#pragma once

#include "synclab/harness/config.hpp"

#include <yaml-cpp/yaml.h>

namespace synclab::harness::detail {

[[nodiscard]] Scenario scenario_from_node(const YAML::Node& root);
/// Loads YAML text, mapping parser errors to ConfigError.
[[nodiscard]] YAML::Node load_yaml(const std::string& text);

}  // namespace synclab::harness::detail
