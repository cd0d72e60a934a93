#include "fluoinv/cli/manifest.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <memory>
#include <stdexcept>

#include <openssl/evp.h>

#ifndef FLUOINV_VERSION
#define FLUOINV_VERSION "unknown"
#endif

namespace fluoinv::cli {

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::string hex;
  char two[3];
  for (unsigned int k = 0; k < len; ++k) {
    std::snprintf(two, sizeof two, "%02x", md[k]);
    hex += two;
  }
  return hex;
}

RunManifest::RunManifest(std::filesystem::path dir, std::string command, nlohmann::json config, std::uint64_t seed,
                         int threads)
    : dir_(std::move(dir)),
      command_(std::move(command)),
      config_(std::move(config)),
      seed_(seed),
      threads_(threads),
      started_(utc_now()) {
  std::filesystem::create_directories(dir_);
}

void RunManifest::add(const std::string& name) {
  if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
}

void RunManifest::set_status(std::string status, int exit_code) {
  status_ = std::move(status);
  exit_code_ = exit_code;
}

std::filesystem::path RunManifest::write() {
  nlohmann::json inv = nlohmann::json::array();
  for (const auto& f : files_) {
    const auto p = dir_ / f;
    inv.push_back({{"file", f}, {"bytes", std::filesystem::file_size(p)}, {"sha256", sha256_file(p)}});
  }
  nlohmann::json m = {{"command", command_},
                      {"version", FLUOINV_VERSION},
                      {"seed", seed_},
                      {"threads", threads_},
                      {"started", started_},
                      {"finished", utc_now()},
                      {"status", status_},
                      {"exit_code", exit_code_},
                      {"config", config_},
                      {"summary", summary_},
                      {"files", inv}};
  const auto path = dir_ / "manifest.json";
  std::ofstream out(path, std::ios::trunc);
  out << m.dump(2) << "\n";
  if (!out) throw std::runtime_error("error writing " + path.string());
  return path;
}

}  // namespace fluoinv::cli
