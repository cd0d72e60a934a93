#include <gtest/gtest.h>

#include <map>
#include <set>

#include "fluoinv/properties.hpp"

using namespace fluoinv;

namespace {

std::map<std::string, CheckResult> by_id(const std::vector<CheckResult>& rows) {
  std::map<std::string, CheckResult> m;
  for (const auto& r : rows) m.emplace(r.id, r);
  return m;
}

const std::vector<CheckResult>& default_rows() {
  static const auto rows = run_property_battery(default_verify_config());
  return rows;
}

}  // namespace

TEST(Properties, BatteryShape) {
  const auto& rows = default_rows();
  EXPECT_EQ(rows.size(), 26u);
  std::set<std::string> ids;
  for (const auto& r : rows) {
    EXPECT_TRUE(ids.insert(r.id).second) << r.id;
    EXPECT_FALSE(r.description.empty()) << r.id;
  }
}

TEST(Properties, ExampleTwoOutcomes) {
  const auto rows = by_id(default_rows());
  // u_e starts at zero while b(., 0) = 5, so the discrete time derivatives
  // carry an initial layer and the derivative rows cannot hold.
  const std::set<std::string> incompatible{"ue_time_derivatives_nonnegative", "ue_dt_bounded", "ue_dtt_bounded"};
  for (const auto& [id, r] : rows) {
    if (r.informational) continue;
    if (incompatible.contains(id))
      EXPECT_FALSE(r.pass) << id;
    else
      EXPECT_TRUE(r.pass) << id << " value=" << r.value << " bound=" << r.bound << " " << r.note;
  }
  EXPECT_TRUE(rows.at("assumption_potential").informational);
  EXPECT_TRUE(rows.at("K_lipschitz").informational);
  // With data vanishing at t = 0 the same bounds hold.
  EXPECT_TRUE(rows.at("ue_derivative_bounds_compatible").pass);
  EXPECT_LT(rows.at("stability_smallness").value, 1.0);
  EXPECT_FALSE(battery_passed(default_rows()));
}

TEST(Properties, NegativeBoundaryDataIsFlagged) {
  auto cfg = default_verify_config();
  cfg.problem.cells = 16;
  cfg.problem.b = [](Point p, double t) { return -example2_boundary(p, t); };
  const auto rows = by_id(run_property_battery(cfg));
  EXPECT_FALSE(rows.at("assumption_b_signs").pass);
  EXPECT_FALSE(rows.at("ue_nonnegative").pass);
}

TEST(Properties, BatteryPassedIgnoresInformationalRows) {
  std::vector<CheckResult> rows(2);
  rows[0].pass = true;
  rows[1].informational = true;
  EXPECT_TRUE(battery_passed(rows));
  rows[0].pass = false;
  EXPECT_FALSE(battery_passed(rows));
}
