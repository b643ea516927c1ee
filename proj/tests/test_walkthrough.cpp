#include <cmath>
#include <map>
#include <string>

#include "doctest.h"
#include "hourglass/walkthrough.hpp"

using namespace hourglass;

namespace {

bool row_finite(const WalkthroughRegionRow& row) {
  return std::isfinite(row.area) && std::isfinite(row.predicted_area) &&
         std::isfinite(row.boundary_sup) &&
         std::isfinite(row.predicted_boundary) &&
         std::isfinite(row.integral_abs) &&
         std::isfinite(row.predicted_integral) && std::isfinite(row.l2) &&
         std::isfinite(row.predicted_l2) && std::isfinite(row.area_ratio()) &&
         std::isfinite(row.boundary_ratio()) &&
         std::isfinite(row.integral_ratio()) && std::isfinite(row.l2_ratio());
}

std::map<std::string, WalkthroughRegionRow> by_region(
    const WalkthroughReport& report) {
  std::map<std::string, WalkthroughRegionRow> out;
  for (const auto& row : report.rows) out[row.region] = row;
  return out;
}

}  // namespace

TEST_CASE("thin long cylinder selects case 2") {
  WalkthroughReport report = genus2_walkthrough(1.0, 0.01, 2.0);
  CHECK(report.selected_case == 2);
  CHECK(report.constant == report.f_pT);
  CHECK(report.d == doctest::Approx(std::sqrt(0.01 / 2.0)));
  CHECK(report.rows.size() == 5);
  CHECK(report.rows.front().region == "T");
  CHECK(report.rows.back().region == "A");
  for (const auto& row : report.rows) CHECK(row_finite(row));

  // The annulus average cancels exactly in int_A (f - fhat0) |q|.
  CHECK(report.integral_A_residual < 1e-8);
  CHECK(report.delta <= 1.0 / std::sqrt(2.0) + 1e-6);
  CHECK(report.delta_hat == doctest::Approx(report.delta / report.d));
  CHECK(std::isfinite(report.step2_ratio));
  CHECK(std::isfinite(report.rotation_residual));

  auto rows = by_region(report);
  REQUIRE(rows.count("A"));
  REQUIRE(rows.count("T"));
  // Direct mensuration: area(A) = slit * (2L - 2Bs) against 4 pi L s.
  CHECK(rows["A"].area_ratio() == doctest::Approx(1.0).epsilon(0.15));
  // T fills most of the torus square.
  CHECK(rows["T"].area_ratio() > 0.3);
  CHECK(rows["T"].area_ratio() < 1.2);
  for (const auto& [name, row] : rows) CHECK(row.area > 0.0);
}

TEST_CASE("long cylinder with wider slit selects case 1") {
  WalkthroughReport report = genus2_walkthrough(1.0, 0.028, 40.0);
  CHECK(report.selected_case == 1);
  CHECK(report.constant == report.f_hat0);
  CHECK(report.rows.size() == 5);
  CHECK(report.rows.front().region == "A");
  for (const auto& row : report.rows) CHECK(row_finite(row));

  // Case 1 predicts |int_A g |q|| = 0; the measured cell is the residual of
  // the exact cancellation.
  CHECK(report.rows.front().predicted_integral == 0.0);
  CHECK(report.rows.front().integral_abs < 1e-8);
  CHECK(report.integral_A_residual < 1e-8);

  auto rows = by_region(report);
  for (const auto& [name, row] : rows) CHECK(row.area > 0.0);
  CHECK(rows["A"].area_ratio() == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("walkthrough parameter validation") {
  // B*s must stay below b*S for the mid region to exist.
  CHECK_THROWS_AS(genus2_walkthrough(1.0, 0.04, 2.0), SurfaceError);
  WalkthroughParams tight;
  tight.B = 300.0;  // annulus interior empty
  CHECK_THROWS_AS(genus2_walkthrough(1.0, 0.01, 2.0, tight), SurfaceError);
}
