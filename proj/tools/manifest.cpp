#include "manifest.hpp"

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace iae::cli {

std::string file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest::RunManifest(std::string command)
    : command_(std::move(command)), start_(std::chrono::system_clock::now()) {}

void RunManifest::add_input(const std::string& role, const std::string& path) {
  inputs_.emplace_back(role, path);
}

void RunManifest::add_output(const std::string& role, const std::string& path) {
  outputs_.emplace_back(role, path);
}

void RunManifest::write(const std::string& path) {
  nlohmann::json j;
  j["command"] = command_;
  j["config"] = config_;
  j["started"] = utc_timestamp(start_);
  j["finished"] = utc_timestamp(std::chrono::system_clock::now());
  for (const auto& [role, p] : inputs_) {
    j["inputs"][role] = {{"path", p}, {"checksum", file_checksum(p)}};
  }
  for (const auto& [role, p] : outputs_) {
    j["outputs"][role] = {{"path", p}, {"checksum", file_checksum(p)}};
  }

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write manifest " + tmp);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write manifest " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace iae::cli
