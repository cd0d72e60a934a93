#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace fluoinv::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  ///< unexpected runtime error
  kExitConfig = 2,
  kExitNonConvergence = 3,
  kExitPropertyFailure = 4,
};

struct Options {
  std::string command;  ///< forward | p1 | p2 | rates | spectral | verify
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> preset;
  std::filesystem::path out = "out";
  int threads = 0;  ///< 0 keeps the OpenMP default
};

/// Resolves the configuration, runs the command, writes CSVs and
/// manifest.json into opts.out. Messages go to `log`, errors to `err`.
int run_command(const Options& opts, std::ostream& log, std::ostream& err);

}  // namespace fluoinv::cli
