#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "scmode/errors.hpp"
#include "scmode/lo.hpp"

using namespace scmode;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// 1 GHz bins, 64 per branch.
FrequencyGrid ghz_grid() { return FrequencyGrid(kTwoPi * 193.4e12, kTwoPi * 1e9, 64); }

Eigen::VectorXd intensity(const TimeFreqMode& f) { return f.values().cwiseAbs2(); }

}  // namespace

TEST(FwmOutput, BranchPowersFollowGain) {
  const auto g = ghz_grid();
  const double gain = 5.0;
  const auto lo = fwm_output(TimeFreqMode::delta(g, 3), gain);
  EXPECT_NEAR(lo.spectrum.signal_power(), gain, 1e-12);
  EXPECT_NEAR(lo.spectrum.idler_power(), gain - 1.0, 1e-12);
  EXPECT_EQ(lo.seed_kind, SeedKind::Coherent);
  EXPECT_THROW(fwm_output(TimeFreqMode::delta(g, 3), 0.5), std::invalid_argument);
  EXPECT_THROW(fwm_output(TimeFreqMode::delta(g, -3), 2.0), std::invalid_argument);
}

TEST(FwmOutput, NoGainMeansNoIdler) {
  const auto g = ghz_grid();
  const auto lo = fwm_output(TimeFreqMode::delta(g, 3), 1.0);
  EXPECT_EQ(lo.spectrum.idler_power(), 0.0);
  EXPECT_THROW(balance(lo, 1.0), std::invalid_argument);
}

TEST(Balance, EqualizesBranchesAndGivesScMode) {
  const auto g = ghz_grid();
  Eigen::VectorXd phase(64);
  for (int k = 0; k < 64; ++k) phase[k] = 0.01 * k * k;
  const JointSpectrum joint(g, Eigen::VectorXd::Constant(64, 1.0), phase);
  SeedModel m;
  m.kind = SeedKind::FilteredAse;
  m.center_detuning = kTwoPi * 20e9;
  m.ase_bandwidth = kTwoPi * 5e9;
  const auto f0 = synth_seed(m, g, 1).front();
  const double gain = 12.0;
  const auto lo = balance(fwm_output(f0, gain, &joint), gain);
  EXPECT_NEAR(lo.spectrum.signal_power(), lo.spectrum.idler_power(), 1e-12 * gain);
  const auto mode = lo_mode(lo);
  const auto sc = sc_extend(f0, &joint);
  EXPECT_LE((mode.values() - sc.values()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_TRUE(is_self_conjugated(mode, &joint));

  // A second balance keeps attenuating the signal branch.
  const auto twice = balance(lo, gain);
  EXPECT_LT(twice.spectrum.signal_power(), twice.spectrum.idler_power());
}

TEST(LoExcessRin, ConvertsApparentShotLevel) {
  EXPECT_EQ(lo_excess_rin(0.0), 0.0);
  EXPECT_NEAR(lo_excess_rin(3.0), std::pow(10.0, 0.3) - 1.0, 1e-15);
  EXPECT_THROW(lo_excess_rin(-0.1), std::invalid_argument);
}

TEST(SynthSeed, CoherentIsADeltaAtTheSnappedCarrier) {
  const auto g = ghz_grid();
  SeedModel m;
  m.center_detuning = kTwoPi * 10.3e9;
  const auto seeds = synth_seed(m, g, 3);
  ASSERT_EQ(seeds.size(), 3u);
  EXPECT_DOUBLE_EQ(std::abs(seeds[0][g.index(10)]), 1.0);
  EXPECT_EQ(*seed_expected_intensity(m, g), intensity(seeds[2]));
}

TEST(SynthSeed, CarrierOffTheBranchIsAnAliasingError) {
  const auto g = ghz_grid();
  SeedModel m;
  m.center_detuning = -kTwoPi * 10e9;
  EXPECT_THROW(synth_seed(m, g, 1), AliasingError);
  m.center_detuning = kTwoPi * 80e9;
  EXPECT_THROW(synth_seed(m, g, 1), AliasingError);
}

TEST(SynthSeed, SinePhaseModulationGivesBesselSidebands) {
  const auto g = ghz_grid();
  SeedModel m;
  m.kind = SeedKind::NoiseModulated;
  m.center_detuning = kTwoPi * 32e9;
  m.sine_pm_freq = 3e9;
  m.sine_pm_depth = 1.4;
  const auto expected = seed_expected_intensity(m, g);
  ASSERT_TRUE(expected.has_value());
  for (const auto& f : synth_seed(m, g, 4)) {
    EXPECT_LE((intensity(f) - *expected).cwiseAbs().maxCoeff(), 1e-12);
  }
  const double j1 = std::cyl_bessel_j(1.0, 1.4);
  EXPECT_NEAR((*expected)[static_cast<Eigen::Index>(g.index(35))], j1 * j1, 1e-6);
}

TEST(SynthSeed, SamplesAreReproducibleAndIndependent) {
  const auto g = ghz_grid();
  SeedModel m;
  m.kind = SeedKind::NoiseModulated;
  m.center_detuning = kTwoPi * 32e9;
  m.random_pm_depth = 0.8;
  m.random_pm_bandwidth = 300e6;
  m.dither_depth = 0.5;
  m.rng_seed = 99;
  const auto a = synth_seed(m, g, 5);
  const auto b = synth_seed(m, g, 3);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(a[i].values(), b[i].values());
  EXPECT_NE(a[0].values(), a[1].values());
  m.rng_seed = 100;
  EXPECT_NE(synth_seed(m, g, 1)[0].values(), a[0].values());
  for (const auto& f : a) {
    EXPECT_EQ(f.kind(), ModeKind::SignalOnly);
    EXPECT_NEAR(f.amplitude().norm(), 1.0, 1e-12);
  }
  EXPECT_FALSE(seed_expected_intensity(m, g).has_value());
}

TEST(SynthSeed, BroadNoiseModulationAliases) {
  const auto g = ghz_grid();
  SeedModel m;
  m.kind = SeedKind::NoiseModulated;
  m.center_detuning = kTwoPi * 4e9;
  m.sine_pm_freq = 2e9;
  m.sine_pm_depth = 6.0;
  EXPECT_THROW(synth_seed(m, g, 1), AliasingError);
}

TEST(SynthSeed, FilteredAseAveragesToItsEnvelope) {
  const auto g = ghz_grid();
  SeedModel m;
  m.kind = SeedKind::FilteredAse;
  m.center_detuning = kTwoPi * 30e9;
  m.ase_bandwidth = kTwoPi * 8e9;
  const auto expected = *seed_expected_intensity(m, g);
  const auto seeds = synth_seed(m, g, 4000);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(g.size());
  for (const auto& f : seeds) mean += intensity(f);
  mean /= static_cast<double>(seeds.size());
  EXPECT_LE((mean - expected).cwiseAbs().maxCoeff(), 0.1 * expected.maxCoeff());
  const auto i30 = static_cast<Eigen::Index>(g.index(30));
  EXPECT_NEAR(mean[i30] / expected[i30], 1.0, 0.08);
}

TEST(SynthSeed, FlatTopAseOutsideTheBranchAliases) {
  const auto g = ghz_grid();
  SeedModel m;
  m.kind = SeedKind::FilteredAse;
  m.envelope = EnvelopeShape::FlatTop;
  m.center_detuning = kTwoPi * 60e9;
  m.ase_bandwidth = kTwoPi * 20e9;
  EXPECT_THROW(synth_seed(m, g, 1), AliasingError);
  m.center_detuning = kTwoPi * 30e9;
  const auto f = synth_seed(m, g, 1).front();
  EXPECT_EQ(std::abs(f[g.index(45)]), 0.0);
  EXPECT_GT(std::abs(f[g.index(30)]), 0.0);
}

TEST(SeedModel, ValidateRejectsNegativeFields) {
  SeedModel m;
  m.sine_pm_depth = -1.0;
  EXPECT_THROW(m.validate(), std::invalid_argument);
  m = SeedModel{};
  m.random_pm_bandwidth = -1.0;
  EXPECT_THROW(synth_seed(m, ghz_grid(), 1), std::invalid_argument);
}
