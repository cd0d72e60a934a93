#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace fluoinv::cli {

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Output directory plus the inventory that ends up in manifest.json.
class RunManifest {
public:
  RunManifest(std::filesystem::path dir, std::string command, nlohmann::json config, std::uint64_t seed, int threads);

  std::filesystem::path file(const std::string& name) const { return dir_ / name; }
  /// Records a finished file; the digest is taken at write() time.
  void add(const std::string& name);
  void set_status(std::string status, int exit_code);
  void set_summary(nlohmann::json summary) { summary_ = std::move(summary); }
  /// Writes manifest.json; returns its path.
  std::filesystem::path write();

  const std::filesystem::path& dir() const noexcept { return dir_; }
  const std::vector<std::string>& files() const noexcept { return files_; }

private:
  std::filesystem::path dir_;
  std::string command_;
  nlohmann::json config_;
  std::uint64_t seed_;
  int threads_;
  std::string started_;
  std::string status_ = "ok";
  int exit_code_ = 0;
  nlohmann::json summary_ = nlohmann::json::object();
  std::vector<std::string> files_;
};

}  // namespace fluoinv::cli
