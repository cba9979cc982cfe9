#include "wildgan/run_config.hpp"

#include <fstream>

#include "wildgan/error.hpp"

namespace wildgan {

using nlohmann::json;

RunConfig RunConfig::load(const std::string& config_path) {
  RunConfig cfg;
  if (config_path.empty()) return cfg;
  std::ifstream in(config_path);
  if (!in) throw IoError("cannot open config file: " + config_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("bad config file " + config_path + ": " + e.what());
  }
  if (!j.is_object())
    throw ValidationError("config file must be a JSON object of flat dotted keys");
  cfg.file_values_ = std::move(j);
  return cfg;
}

void RunConfig::set_override(const std::string& key, const json& value) {
  overrides_[key] = value;
}

json RunConfig::lookup(const std::string& key) const {
  if (overrides_.contains(key)) return overrides_.at(key);
  if (file_values_.contains(key)) return file_values_.at(key);
  return json();
}

int64_t RunConfig::get_int(const std::string& key, int64_t def) const {
  json v = lookup(key);
  int64_t out = def;
  if (!v.is_null()) {
    if (!v.is_number_integer())
      throw ValidationError("config key '" + key + "' must be an integer");
    out = v.get<int64_t>();
  }
  resolved_[key] = out;
  return out;
}

double RunConfig::get_double(const std::string& key, double def) const {
  json v = lookup(key);
  double out = def;
  if (!v.is_null()) {
    if (!v.is_number())
      throw ValidationError("config key '" + key + "' must be a number");
    out = v.get<double>();
  }
  resolved_[key] = out;
  return out;
}

std::string RunConfig::get_string(const std::string& key, const std::string& def) const {
  json v = lookup(key);
  std::string out = def;
  if (!v.is_null()) {
    if (!v.is_string())
      throw ValidationError("config key '" + key + "' must be a string");
    out = v.get<std::string>();
  }
  resolved_[key] = out;
  return out;
}

bool RunConfig::get_bool(const std::string& key, bool def) const {
  json v = lookup(key);
  bool out = def;
  if (!v.is_null()) {
    if (!v.is_boolean())
      throw ValidationError("config key '" + key + "' must be a boolean");
    out = v.get<bool>();
  }
  resolved_[key] = out;
  return out;
}

void RunConfig::write_resolved(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write resolved config: " + path);
  out << resolved_.dump(2) << "\n";
}

}  // namespace wildgan
