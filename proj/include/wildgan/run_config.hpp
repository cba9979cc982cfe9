#pragma once

#include <map>
#include <optional>
#include <string>

#include "json.hpp"

namespace wildgan {

// Layered command configuration: built-in default < config file (flat dotted
// JSON keys) < CLI flag. Every value read through a getter lands in the
// resolved snapshot, which each command echoes to disk; re-running from that
// snapshot reproduces the run bit-exactly.
class RunConfig {
 public:
  RunConfig() = default;

  static RunConfig load(const std::string& config_path);  // empty path ok

  void set_override(const std::string& key, const nlohmann::json& value);

  int64_t get_int(const std::string& key, int64_t def) const;
  double get_double(const std::string& key, double def) const;
  std::string get_string(const std::string& key, const std::string& def) const;
  bool get_bool(const std::string& key, bool def) const;

  nlohmann::json resolved() const { return resolved_; }
  void write_resolved(const std::string& path) const;

 private:
  nlohmann::json lookup(const std::string& key) const;

  nlohmann::json file_values_ = nlohmann::json::object();
  nlohmann::json overrides_ = nlohmann::json::object();
  mutable nlohmann::json resolved_ = nlohmann::json::object();
};

}  // namespace wildgan
