#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "scmode/errors.hpp"
#include "scmode/fopa.hpp"

using namespace scmode;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

FopaParams fiber() {
  FopaParams p;
  p.beta2 = -21.7e-27;
  p.beta4 = 0.0;
  p.gamma_nl = 1.3e-3;
  p.length = 1500.0;
  return p;
}

}  // namespace

TEST(Fopa, NoPumpNoGain) {
  const FrequencyGrid g(0.0, kTwoPi * 1e9, 64);
  const auto j = fopa_joint_spectrum(fiber(), g);
  EXPECT_EQ(j.magnitude().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Fopa, PhaseMatchedBinReachesGammaPL) {
  auto p = fiber();
  const double target = kTwoPi * 50e9;
  p.pump_peak_power = calibrate_peak_detuning(target, p);
  const auto t = fopa_pair_transfer(p, target, p.length, p.pump_peak_power);
  EXPECT_NEAR(std::asinh(std::abs(t.nu)), p.gamma_nl * p.pump_peak_power * p.length, 1e-12);
  EXPECT_NEAR(std::norm(t.mu) - std::norm(t.nu), 1.0, 1e-12);
}

TEST(Fopa, BogoliubovNormHoldsAcrossRegimes) {
  auto p = fiber();
  p.pump_peak_power = 0.9;
  for (double ghz : {0.1, 10.0, 50.0, 80.0, 200.0, 600.0}) {
    const auto t = fopa_pair_transfer(p, kTwoPi * ghz * 1e9, p.length, p.pump_peak_power);
    EXPECT_NEAR(std::norm(t.mu) - std::norm(t.nu), 1.0, 1e-9 * std::norm(t.mu)) << ghz;
  }
}

TEST(Fopa, ContinuousAcrossZeroGain) {
  auto p = fiber();
  p.pump_peak_power = 0.8;
  // g^2 = 0 where kappa = +-2 gamma P; solve for the detuning on the kappa = 0 side.
  const double db = -4.0 * p.gamma_nl * p.pump_peak_power;
  const double w = std::sqrt(db / p.beta2);
  const double xi_lo = std::abs(fopa_pair_transfer(p, w * (1 - 1e-9), p.length, p.pump_peak_power).nu);
  const double xi_hi = std::abs(fopa_pair_transfer(p, w * (1 + 1e-9), p.length, p.pump_peak_power).nu);
  const double xi_at = std::abs(fopa_pair_transfer(p, w, p.length, p.pump_peak_power).nu);
  EXPECT_NEAR(xi_lo, xi_at, 1e-7 * xi_at);
  EXPECT_NEAR(xi_hi, xi_at, 1e-7 * xi_at);
  // Strong gain at g -> 0 is linear in length: sinh|xi| = gamma*P*L.
  EXPECT_NEAR(xi_at, p.gamma_nl * p.pump_peak_power * p.length, 1e-6 * xi_at);
}

TEST(Fopa, MagnitudeIsEvenInDetuning) {
  auto p = fiber();
  p.pump_peak_power = 0.7;
  p.beta4 = 1e-55;
  for (double ghz : {3.0, 40.0, 70.0}) {
    const double w = kTwoPi * ghz * 1e9;
    EXPECT_EQ(std::abs(fopa_pair_transfer(p, w, p.length, 0.7).nu),
              std::abs(fopa_pair_transfer(p, -w, p.length, 0.7).nu));
  }
}

TEST(Fopa, PeakLandsOnCalibratedDetuning) {
  auto p = fiber();
  const double target = kTwoPi * 50.62e9;
  p.pump_peak_power = calibrate_peak_detuning(target, p);
  const FrequencyGrid g(0.0, kTwoPi * 1e9, 128);
  const auto j = fopa_joint_spectrum(p, g);
  Eigen::Index peak = 0;
  j.magnitude().maxCoeff(&peak);
  EXPECT_LE(std::abs((peak + 1) * 1e9 - 50.62e9), 1e9);
}

TEST(Fopa, MismatchedRegimeDecaysLikeSinc) {
  auto p = fiber();
  p.pump_peak_power = calibrate_peak_detuning(kTwoPi * 50.62e9, p);
  const auto far = fopa_pair_transfer(p, kTwoPi * 400e9, p.length, p.pump_peak_power);
  EXPECT_LT(std::abs(far.nu), 0.05);
}

TEST(CalibratePeakDetuning, MatchesClosedFormWithoutBeta4) {
  const auto p = fiber();
  const double w = kTwoPi * 50.62e9;
  const double closed = -p.beta2 * w * w / (2.0 * p.gamma_nl);
  EXPECT_NEAR(calibrate_peak_detuning(w, p), closed, 1e-10 * closed);
  EXPECT_EQ(calibrate_peak_detuning(0.0, p), 0.0);
}

TEST(CalibratePeakDetuning, RootSatisfiesPhaseMatchingWithBeta4) {
  auto p = fiber();
  p.beta4 = -2e-55;
  const double w = kTwoPi * 50.62e9;
  const double power = calibrate_peak_detuning(w, p);
  EXPECT_NEAR(linear_phase_mismatch(p, w) + 2.0 * p.gamma_nl * power, 0.0, 1e-10 * 2.0 * p.gamma_nl * power);
}

TEST(CalibratePeakDetuning, ErrorsCarryDiagnostics) {
  auto p = fiber();
  p.beta2 = 21.7e-27;
  EXPECT_THROW(calibrate_peak_detuning(kTwoPi * 50e9, p), std::invalid_argument);
  p.beta2 = -21.7e-27;
  p.beta4 = 1e-47;  // normal fourth order dominates: no root
  try {
    calibrate_peak_detuning(kTwoPi * 50e9, p);
    FAIL() << "expected CalibrationError";
  } catch (const CalibrationError& e) {
    EXPECT_NE(std::string(e.what()).find("kappa"), std::string::npos);
  }
}

TEST(Fopa, OverflowIsARangeError) {
  auto p = fiber();
  p.phase_matching = PhaseMatching::Dispersive;
  p.pump_peak_power = calibrate_peak_detuning(kTwoPi * 50e9, p);
  p.length = 1e9;
  EXPECT_THROW(fopa_pair_transfer(p, kTwoPi * 50e9, p.length, p.pump_peak_power), std::range_error);
}

TEST(FopaParams, ValidateNamesTheField) {
  auto p = fiber();
  p.length = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = fiber();
  p.segments = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = fiber();
  p.raman_n = -1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(PiaGain, KnownValuesAndRoundTrip) {
  EXPECT_EQ(pia_gain_from_xi(0.0), 1.0);
  EXPECT_NEAR(pia_gain_from_xi(2.5328), std::cosh(2 * 2.5328), 1e-9);
  EXPECT_NEAR(pia_gain_from_xi(2.5328), 79.25, 0.01);
  for (double g : {1.5, 10.0, 100.0}) {
    EXPECT_NEAR(pia_gain_from_xi(xi_from_pia_gain(g)), g, 1e-12 * g);
  }
  EXPECT_THROW(xi_from_pia_gain(0.99), std::invalid_argument);
}
