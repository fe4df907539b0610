#include "svylasso_app/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "svylasso_app/errors.hpp"

namespace svylasso::app {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    throw UserError("setting '" + key + "': cannot parse '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw UserError("setting '" + key + "': expected true or false, got '" + value + "'");
}

}  // namespace

ConfigMap parse_config(const std::string& text, const std::string& source) {
  ConfigMap out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UserError(source + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw UserError(source + ":" + std::to_string(lineno) + ": empty key");
    out[key] = value;
  }
  return out;
}

ConfigMap read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UserError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

const std::vector<std::string>& simulation_keys() {
  static const std::vector<std::string> keys = {
      "scheme",     "n_s",        "p",          "population",       "prob",           "replications",
      "level",      "seed",       "lambda",     "cv_folds",         "cv_rule",        "test_column",
      "coefficient_null", "ame_null", "regenerate_population", "mle_iterations", "threads"};
  return keys;
}

StudyPlan plan_from_config(const ConfigMap& cfg) {
  StudyPlan plan;
  SimulationConfig& c = plan.base;
  plan.p_values = {c.p};
  for (const auto& [key, value] : cfg) {
    if (key == "scheme") {
      if (value == "standard") {
        c.scheme = SchemeKind::standard;
      } else if (value == "exogenous") {
        c.scheme = SchemeKind::exogenous;
      } else {
        throw UserError("setting 'scheme': expected standard or exogenous, got '" + value + "'");
      }
    } else if (key == "n_s") {
      c.per_stratum = parse_number<Index>(key, value);
    } else if (key == "p") {
      plan.p_values.clear();
      std::string item;
      std::istringstream in(value);
      while (std::getline(in, item, ',')) plan.p_values.push_back(parse_number<Index>(key, trim(item)));
      if (plan.p_values.empty()) throw UserError("setting 'p': empty list");
    } else if (key == "population") {
      c.population_size = parse_number<Index>(key, value);
    } else if (key == "prob") {
      c.prob = parse_number<double>(key, value);
    } else if (key == "replications") {
      c.replications = parse_number<int>(key, value);
    } else if (key == "level") {
      c.level = parse_number<double>(key, value);
    } else if (key == "seed") {
      c.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "lambda") {
      if (value == "cv") {
        c.cross_validate = true;
      } else {
        c.cross_validate = false;
        c.fixed_lambda = parse_number<double>(key, value);
      }
    } else if (key == "cv_folds") {
      c.cv_folds = parse_number<int>(key, value);
    } else if (key == "cv_rule") {
      if (value == "min") {
        c.cv_rule = CvRule::best;
      } else if (value == "1se") {
        c.cv_rule = CvRule::one_se;
      } else {
        throw UserError("setting 'cv_rule': expected min or 1se, got '" + value + "'");
      }
    } else if (key == "test_column") {
      c.test_column = parse_number<Index>(key, value);
    } else if (key == "coefficient_null") {
      c.coefficient_null = parse_number<double>(key, value);
    } else if (key == "ame_null") {
      c.ame_null = parse_number<double>(key, value);
    } else if (key == "regenerate_population") {
      c.regenerate_population = parse_bool(key, value);
    } else if (key == "mle_iterations") {
      c.mle_iterations = parse_number<int>(key, value);
    } else if (key == "threads") {
      c.threads = parse_number<int>(key, value);
    } else {
      throw UserError("unknown setting '" + key + "'");
    }
  }
  if (!(c.level > 0.0 && c.level < 1.0)) throw UserError("setting 'level' must lie in (0, 1)");
  if (c.replications < 0) throw UserError("setting 'replications' must be >= 0");
  if (c.per_stratum < 1) throw UserError("setting 'n_s' must be >= 1");
  if (!(c.prob > 0.0 && c.prob < 1.0)) throw UserError("setting 'prob' must lie in (0, 1)");
  for (Index p : plan.p_values) {
    if (p < 2) throw UserError("setting 'p': every value must be >= 2");
    if (c.test_column < 1 || c.test_column > p) throw UserError("setting 'test_column' out of range for p");
  }
  return plan;
}

}  // namespace svylasso::app
