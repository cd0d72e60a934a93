#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fluoinv/experiments.hpp"

namespace fluoinv {

/// Inputs of the maximum-principle / monotonicity / stability battery.
struct VerifyConfig {
  ProblemSpec problem;  ///< defaults to Example 2 data
  SpatialFunction q_star = example2_smooth_source;
  /// Configuration used for the stability inequality; needs a small
  /// contraction factor, see stability_spec().
  ProblemSpec stability;
  std::uint64_t seed = 0;
  int monotone_pairs = 10;
  int energy_pairs = 20;
  int stability_pairs = 20;
  int lipschitz_pairs = 20;
};

/// Example 2 on a 32 x 32 grid with M = 5, and the p = 100 stability setup.
VerifyConfig default_verify_config();

/// p = 100, b = 1, beta = 1e-3, T = 0.04, M = 0.01 on a 32 x 32 grid. The
/// smallness factor sqrt(T) M_b (M + 1) / (m_Q sqrt(C_p)) is about 0.87.
ProblemSpec stability_spec();

struct CheckResult {
  std::string id;
  std::string description;
  bool pass = false;
  bool informational = false;  ///< reported, never fails the battery
  double value = 0.0;
  double bound = 0.0;
  std::string note;
};

/// Runs every check; exceptions inside a check turn into a failed row.
std::vector<CheckResult> run_property_battery(const VerifyConfig& cfg);

/// True when no non-informational check failed.
bool battery_passed(const std::vector<CheckResult>& rows);

}  // namespace fluoinv
