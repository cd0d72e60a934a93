#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fluoinv/experiments.hpp"
#include "fluoinv/stochastic.hpp"

namespace fluoinv::cli {

/// Invalid configuration. line is 1-based and 0 when the offending value did
/// not come from a file (preset default or command-line override).
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& what, int line = 0, std::string path = {});
  int line() const noexcept { return line_; }
  const std::string& path() const noexcept { return path_; }

private:
  int line_;
  std::string path_;
};

/// A named scalar field: "constant" with a value, or a built-in name.
struct FieldSpec {
  std::string name = "constant";
  double value = 0.0;
};

struct ProblemSection {
  double T = 1.0;
  double tau = 0.01;
  double M = 5.0;
  FieldSpec p{"example2", 0.0};  ///< "example2" or "constant"
  FieldSpec b{"example2", 0.0};  ///< "example2", "example2-flipped" or "constant"
};

struct MeasurementSection {
  std::size_t n = 10000;
  NoiseKind noise = NoiseKind::Gaussian;
  double sigma = 0.002;
  bool relative = false;  ///< sigma is a fraction of max |g|
  PointLayout layout = PointLayout::Halton;
};

enum class LambdaPolicy { Prior, Fixed, SelfConsistent, Ladder };

struct FitSection {
  int s = 0;
  LambdaPolicy policy = LambdaPolicy::Prior;
  double lambda = 1e-6;              ///< used by Fixed
  std::vector<double> ladder;        ///< used by Ladder
  double stop_tol = 1e-10;           ///< self-consistent loop
  int max_outer = 50;
  double tol = 0.0;                  ///< 0 selects the solver default
  std::string truth = "example1";    ///< example1 | example2-smooth | example2-discontinuous
};

struct P2Section {
  bool clean = false;  ///< run on exact data (inverse-crime oracle)
  double tol = 1e-10;
  int max_iter = 200;
  bool clamp = true;
};

struct RatesSection {
  std::optional<int> cells;  ///< defaults to grid.cells
  std::string target = "p1"; ///< p1 or p2
  std::vector<int> s{0, 1};
  int trials = 10;
  double n_start = 1e4;
  double n_factor = 3.1622776601683795;
  int points = 5;
  int tail_trials = 0;  ///< > 0 adds a single-point tail run
  std::vector<double> tail_z;
};

struct SpectralSection {
  int dirichlet_cells = 64;
  int dirichlet_dim = 2;
  int k_max = 200;
  int smoothing_cells = 32;
  std::size_t n = 200;
  std::vector<int> s{0, 1};
};

struct VerifySection {
  int cells = 32;
  int monotone_pairs = 10;
  int energy_pairs = 20;
  int stability_pairs = 20;
  int lipschitz_pairs = 20;
};

struct RunConfig {
  std::string preset;
  std::uint64_t seed = 0;
  double beta = 1.0;
  int dim = 2;
  int cells = 100;
  ProblemSection problem;
  FieldSpec source{"example2-smooth", 0.0};  ///< q* for forward, p2, verify
  MeasurementSection measurements;
  FitSection fit;
  P2Section p2;
  RatesSection rates;
  SpectralSection spectral;
  VerifySection verify;
  nlohmann::json echo;  ///< the merged document, for the manifest
};

/// Parses JSON text; syntax errors become ConfigError with the line.
nlohmann::json parse_json_text(const std::string& text);

/// Merges `overlay` onto the preset document and validates every key.
/// `text` is the overlay's source and is used to locate errors.
RunConfig resolve_config(const nlohmann::json& base, const nlohmann::json& overlay, const std::string& text);

/// Line of the value at `path` in `text`, 0 if it cannot be found.
int locate_line(const std::string& text, const std::vector<std::string>& path);

ProblemSpec problem_spec(const RunConfig& cfg, int cells);
SpatialFunction source_function(const FieldSpec& spec);

}  // namespace fluoinv::cli
