#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "scmode/runner.hpp"
#include "scmode/scenario.hpp"

using namespace scmode;
using namespace scmode::cli;

namespace {

constexpr const char* kSingle = R"(
# a comment
[run]
directive = single
seed = 7

[grid]
half_bins = 16

[fiber]
peak_detuning_ghz = 5
loss_fraction = 0.05
phase_matching = dispersive

[model]
kind = lumped

[seed]
kind = coherent
center_ghz = 3

[chain]
efficiencies = 0.9, 0.95
dark_db = -25
)";

std::vector<std::string> errors_of(std::string_view text) {
  try {
    parse_scenario(text);
  } catch (const ScenarioError& e) {
    return e.errors();
  }
  return {};
}

bool any_contains(const std::vector<std::string>& errors, std::string_view needle) {
  return std::any_of(errors.begin(), errors.end(),
                     [&](const std::string& e) { return e.find(needle) != std::string::npos; });
}

}  // namespace

TEST(Scenario, ParsesSectionsAndDefaults) {
  const auto s = parse_scenario(kSingle);
  EXPECT_EQ(s.run.directive, Directive::Single);
  EXPECT_EQ(s.run.seed, 7u);
  ASSERT_TRUE(s.grid && s.fiber && s.model && s.seed && s.chain);
  EXPECT_EQ(s.grid->half_bins, 16u);
  EXPECT_EQ(s.grid->spacing_ghz, 1.0);
  EXPECT_EQ(*s.fiber->peak_detuning_ghz, 5.0);
  EXPECT_FALSE(s.fiber->pump_power_w.has_value());
  EXPECT_EQ(s.chain->efficiencies, (std::vector<double>{0.9, 0.95}));
  EXPECT_FALSE(s.herald.has_value());
}

TEST(Scenario, SerializeRoundTrips) {
  const auto s = parse_scenario(kSingle);
  const auto text = serialize(s);
  EXPECT_EQ(parse_scenario(text), s);
  EXPECT_EQ(serialize(parse_scenario(text)), text);
}

TEST(Scenario, ShippedScenariosRoundTrip) {
  const auto files = list_scenarios();
  ASSERT_FALSE(files.empty());
  for (const auto& path : files) {
    const auto s = load_scenario(path.string());
    EXPECT_EQ(parse_scenario(serialize(s)), s) << path;
  }
}

TEST(Scenario, UnknownKeySuggestsTheNearestOne) {
  const auto errors = errors_of("[run]\ndirective = herald\n[grid]\nhalf_binz = 4\n[model]\nkind = flat\n[herald]\n");
  ASSERT_FALSE(errors.empty());
  EXPECT_TRUE(any_contains(errors, "unknown key 'half_binz' (nearest valid key: 'half_bins')"));
}

TEST(Scenario, ReportsEveryProblemAtOnce) {
  const auto errors = errors_of(R"(
[run]
directive = single
[grid]
spacing_ghz = -1
[model]
kind = flat
flat_xi = -2
[seed]
[chain]
efficiencies = 0.5, 1.5
[bogus]
)");
  EXPECT_TRUE(any_contains(errors, "[grid] spacing_ghz must be positive"));
  EXPECT_TRUE(any_contains(errors, "flat_xi must be non-negative"));
  EXPECT_TRUE(any_contains(errors, "each efficiency must lie in (0, 1]"));
  EXPECT_TRUE(any_contains(errors, "unknown section [bogus]"));
  EXPECT_GE(errors.size(), 4u);
}

TEST(Scenario, MissingSectionsAndBadEnums) {
  auto errors = errors_of("[run]\ndirective = pump-sweep\n");
  EXPECT_TRUE(any_contains(errors, "requires section [fiber]"));
  EXPECT_TRUE(any_contains(errors, "requires section [sweep]"));
  errors = errors_of("[run]\ndirective = hearld\n");
  EXPECT_TRUE(any_contains(errors, "nearest: 'herald'"));
  errors = errors_of("[run]\ndirective = herald\n[grid]\n[model]\nkind = flatt\n[herald]\n");
  EXPECT_TRUE(any_contains(errors, "flat"));
  errors = errors_of("[run]\ndirective = herald\n[grid]\nhalf_bins = x\n[model]\nkind = flat\n[herald]\n");
  EXPECT_TRUE(any_contains(errors, "half_bins"));
}

TEST(Scenario, DirectiveNamesRoundTrip) {
  for (auto d : {Directive::Single, Directive::PumpSweep, Directive::ModulationFrequencySweep,
                 Directive::Herald, Directive::CalibrateRaman, Directive::CalibrateDetuning,
                 Directive::PhaseMatchSpectrum, Directive::NoiseBudget}) {
    EXPECT_EQ(directive_from(directive_name(d)), d);
  }
  EXPECT_FALSE(directive_from("nope").has_value());
}

TEST(Conversions, UnitsBecomeSi) {
  const auto s = parse_scenario(kSingle);
  const auto g = make_grid(*s.grid);
  EXPECT_NEAR(g.spacing(), 2.0 * std::numbers::pi * 1e9, 1e-3);
  EXPECT_NEAR(g.center(), 2.0 * std::numbers::pi * 193.4e12, 1.0);

  const auto p = make_params(*s.fiber);
  EXPECT_NEAR(std::exp(-p.loss_per_length * p.length), 0.95, 1e-14);
  EXPECT_NEAR(p.pump_peak_power, calibrate_peak_detuning(ghz_to_rad_s(5.0), p), 1e-15);

  const auto m = make_seed_model(*s.seed, 7);
  EXPECT_EQ(m.rng_seed, 7u);
  EXPECT_NEAR(m.center_detuning, ghz_to_rad_s(3.0), 1e-6);
  EXPECT_EQ(m.coherence_control_rate, 40e6);

  const auto c = make_chain(*s.chain);
  EXPECT_NEAR(c.dark_rel, std::pow(10.0, -2.5), 1e-15);
  EXPECT_EQ(c.rin_excess, 0.0);
}

TEST(Overrides, ReplaceSeedAndSegments) {
  const auto s = parse_scenario(kSingle);
  const auto o = apply_overrides(s, {42u, 9u});
  EXPECT_EQ(o.run.seed, 42u);
  EXPECT_EQ(o.fiber->segments, 9u);
  EXPECT_EQ(apply_overrides(s, {}), s);
}

TEST(Runner, SingleRunIsDeterministic) {
  const auto s = parse_scenario(kSingle);
  const auto a = compute(s, "t");
  const auto b = compute(s, "t");
  EXPECT_EQ(a.csv, b.csv);
  EXPECT_EQ(a.summary, b.summary);
  EXPECT_NE(a.csv.find("[dB re true shot noise]"), std::string::npos);
}
