#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace iae::cli {

// FNV-1a 64 over the file's bytes, as 16 hex digits.
std::string file_checksum(const std::string& path);

std::string utc_timestamp(std::chrono::system_clock::time_point t);

// Record of one CLI run, written next to the artifacts it produced.
class RunManifest {
 public:
  explicit RunManifest(std::string command);

  nlohmann::json& config() { return config_; }
  void add_input(const std::string& role, const std::string& path);
  void add_output(const std::string& role, const std::string& path);

  // Stamps the end time, checksums the outputs, then writes `path` via a
  // temporary file and rename.
  void write(const std::string& path);

 private:
  std::string command_;
  std::chrono::system_clock::time_point start_;
  nlohmann::json config_ = nlohmann::json::object();
  std::vector<std::pair<std::string, std::string>> inputs_, outputs_;
};

}  // namespace iae::cli
