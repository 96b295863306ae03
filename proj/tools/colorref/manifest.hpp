#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace colorref::cli {

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

/// Record of one run, written as `<out>.manifest.json`. Everything except
/// wall_clock_seconds is a function of the command line and input bytes.
class RunManifest {
 public:
  explicit RunManifest(std::string command);

  void set_config(nlohmann::json config) { config_ = std::move(config); }
  void add_seed(const std::string& name, std::uint64_t seed) { seeds_[name] = seed; }
  void add_input(const std::string& path);
  void add_output(const std::string& path) { outputs_.push_back(path); }
  void set_extra(const std::string& key, nlohmann::json value) { extra_[key] = std::move(value); }

  nlohmann::ordered_json to_json() const;
  /// Writes `<primary_output>.manifest.json`.
  void write(const std::string& primary_output) const;

 private:
  std::string command_;
  nlohmann::json config_ = nlohmann::json::object();
  nlohmann::json seeds_ = nlohmann::json::object();
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<std::string> outputs_;
  nlohmann::json extra_ = nlohmann::json::object();
  std::chrono::steady_clock::time_point start_;
};

}  // namespace colorref::cli
