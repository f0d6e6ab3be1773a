#include "wvsim/fringe.hpp"

#include "wvsim/weakvalue.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace wvsim;

namespace {

constexpr double kPi = std::numbers::pi;

Scenario nested() { return build_scenario(BuiltinScenario::Nested); }

}  // namespace

TEST_CASE("identical tags keep perfect visibility and zero leak") {
  for (double theta : {0.0, 0.4, 1.3, kPi / 2}) {
    FringeReport r = analyze_tagged_inner(nested(), theta, theta);
    CHECK(r.visibility == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.distinguishability == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.leak_probability < 1e-12);
  }
}

TEST_CASE("opposite tags (relative angle pi) fully distinguish and leak one half") {
  for (auto [tb, tc] : std::vector<std::pair<double, double>>{{kPi, 0.0}, {kPi / 2, -kPi / 2}}) {
    FringeReport r = analyze_tagged_inner(nested(), tb, tc);
    CHECK(r.visibility == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.distinguishability == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.leak_probability == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("small tag mismatch leaks quadratically") {
  std::vector<double> deltas, leaks;
  for (int i = 0; i < 6; ++i) {
    const double delta = 1e-2 * std::pow(10.0, i / 5.0);
    deltas.push_back(delta);
    leaks.push_back(analyze_tagged_inner(nested(), delta, 0.0).leak_probability);
  }
  const double slope = wvsim::testing::fit_log_slope(deltas, leaks);
  CHECK(slope == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("leak matches the closed form for the shared tag qubit") {
  for (auto [tb, tc] : std::vector<std::pair<double, double>>{
           {0.3, 0.0}, {1.0, 0.25}, {2.0, -0.5}, {kPi, 0.0}}) {
    const double expect = (1.0 - std::cos((tb - tc) / 2.0)) / 2.0;
    FringeReport r = analyze_tagged_inner(nested(), tb, tc);
    CHECK(r.leak_probability == doctest::Approx(expect).epsilon(1e-12));
    CHECK(r.visibility == doctest::Approx(std::abs(std::cos((tb - tc) / 2.0))).epsilon(1e-12));
  }
}

TEST_CASE("dv sweep saturates the inequality for pure tags") {
  std::vector<double> grid;
  for (int i = 0; i < 50; ++i) grid.push_back(kPi * i / 49.0);
  auto reports = dv_inequality_sweep(grid);
  REQUIRE(reports.size() == 50);
  for (const auto& r : reports) {
    CHECK(r.dv_sum() <= 1.0 + 1e-10);
    CHECK(std::abs(r.dv_sum() - 1.0) < 1e-10);
    CHECK(r.distinguishability >= -1e-15);
    CHECK(r.visibility >= -1e-15);
  }
  CHECK(reports.front().distinguishability == doctest::Approx(0.0));
  CHECK(reports.front().visibility == doctest::Approx(1.0));
  CHECK(reports.back().distinguishability == doctest::Approx(1.0));
  CHECK(reports.back().visibility == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("leak is nondecreasing in the relative tag angle") {
  double prev = -1.0;
  for (int i = 0; i < 40; ++i) {
    const double delta = kPi * i / 39.0;
    const double leak = analyze_tagged_inner(nested(), delta, 0.0).leak_probability;
    CHECK(leak >= prev - 1e-12);
    prev = leak;
  }
}

TEST_CASE("equal tags leave the coarse-grained inner weak value at zero") {
  for (double theta : {0.0, 0.5, 1.1, 2.0}) {
    ScenarioParams p;
    p.theta_b = theta;
    p.theta_c = theta;
    p.with_tags = true;
    Scenario sc = build_scenario(BuiltinScenario::Nested, p);
    WeakValueResult bc = coarse_grained_weak_value({"B", "C"}, sc, "D2");
    CHECK(std::abs(bc.value) < 1e-10);
    WeakValueResult a = scenario_weak_value(sc, "D2", segment_projector(sc, "A"));
    CHECK(std::abs(a.value - Complex(1, 0)) < 1e-10);
  }
}

TEST_CASE("fringe analysis requires the nested scenario") {
  Scenario mz = build_scenario(BuiltinScenario::MachZehnder);
  CHECK_THROWS_AS(analyze_tagged_inner(mz, 0.1, 0.0), InvalidArgumentError);
}

TEST_CASE("empty sweep grids are rejected") {
  CHECK_THROWS_AS(dv_inequality_sweep({}), InvalidArgumentError);
}
