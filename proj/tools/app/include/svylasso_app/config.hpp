#pragma once

#include <map>
#include <string>
#include <vector>

#include <svylasso/sampling.hpp>

namespace svylasso::app {

/// Flat `key = value` settings; `#` starts a comment.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config(const std::string& text, const std::string& source = "<config>");
ConfigMap read_config(const std::string& path);

/// Keys understood by `simulate`.
const std::vector<std::string>& simulation_keys();

/// A study over a grid of p values sharing every other setting.
struct StudyPlan {
  SimulationConfig base;
  std::vector<Index> p_values;
};

/// Builds the plan from settings; unknown keys and malformed values are
/// UserErrors.
StudyPlan plan_from_config(const ConfigMap& cfg);

}  // namespace svylasso::app
