#pragma once

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace freqconn::cli {

std::string sha256_file(const std::filesystem::path& path);

/// Everything needed to rerun a command: the resolved options, the digests
/// of what was read and what was written, and timing.
class RunManifest {
 public:
  RunManifest(std::string command, std::vector<std::pair<std::string, std::string>> config);

  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);
  void add_failure(std::string where, std::string reason);
  void add_note(std::string note);
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  /// argv (without the program name) that reproduces the run into `out`.
  [[nodiscard]] std::vector<std::string> argv(const std::string& out) const;
  void write(const std::filesystem::path& dir) const;

  static nlohmann::json read(const std::filesystem::path& path);

 private:
  std::string command_;
  std::vector<std::pair<std::string, std::string>> config_;
  std::optional<std::uint64_t> seed_;
  nlohmann::json inputs_ = nlohmann::json::array();
  nlohmann::json outputs_ = nlohmann::json::array();
  nlohmann::json failures_ = nlohmann::json::array();
  nlohmann::json notes_ = nlohmann::json::array();
  std::chrono::system_clock::time_point started_ = std::chrono::system_clock::now();
  std::chrono::steady_clock::time_point clock_ = std::chrono::steady_clock::now();
};

} // namespace freqconn::cli
