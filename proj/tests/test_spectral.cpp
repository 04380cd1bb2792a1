#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "scmode/spectral.hpp"

using namespace scmode;

namespace {

FrequencyGrid grid_of(std::size_t n) { return FrequencyGrid(1.2e15, 2e9, n); }

TimeFreqMode random_mode(const FrequencyGrid& g, std::mt19937_64& rng, bool signal_only) {
  std::normal_distribution<double> normal;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (signal_only && !g.is_signal(i)) continue;
    v[static_cast<Eigen::Index>(i)] = Complex(normal(rng), normal(rng));
  }
  return TimeFreqMode::normalized(SpectralAmplitude(g, v));
}

}  // namespace

TEST(FrequencyGrid, MinimalGridHasTwoMirroredBins) {
  const auto g = make_grid(100.0, 2.0, 1);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g.offset(0), -1);
  EXPECT_EQ(g.offset(1), 1);
  EXPECT_EQ(g.conj(g.index(1)), g.index(-1));
  EXPECT_DOUBLE_EQ(g.frequency(0), 98.0);
  EXPECT_DOUBLE_EQ(g.frequency(1), 102.0);
}

TEST(FrequencyGrid, ConjugateMapIsAnInvolutionWithoutFixedPoints) {
  for (std::size_t n : {4u, 128u}) {
    const auto g = grid_of(n);
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_EQ(g.conj(g.conj(i)), i);
      EXPECT_NE(g.conj(i), i);
      EXPECT_EQ(g.offset(g.conj(i)), -g.offset(i));
      EXPECT_NE(g.detuning(i), 0.0);
      EXPECT_EQ(g.index(g.offset(i)), i);
    }
  }
}

TEST(FrequencyGrid, RejectsBadInput) {
  EXPECT_THROW(make_grid(0.0, 0.0, 4), std::invalid_argument);
  EXPECT_THROW(make_grid(0.0, -1.0, 4), std::invalid_argument);
  EXPECT_THROW(make_grid(0.0, 1.0, 0), std::invalid_argument);
  EXPECT_THROW(grid_of(4).index(0), std::out_of_range);
  EXPECT_THROW(grid_of(4).index(5), std::out_of_range);
}

TEST(TimeFreqMode, RequiresUnitNormAndBranchSupport) {
  const auto g = grid_of(2);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
  v[3] = 2.0;
  EXPECT_THROW(TimeFreqMode(SpectralAmplitude(g, v), ModeKind::General), std::invalid_argument);
  v[3] = 1.0;
  EXPECT_THROW(TimeFreqMode(SpectralAmplitude(g, v), ModeKind::IdlerOnly), std::invalid_argument);
  EXPECT_NO_THROW(TimeFreqMode(SpectralAmplitude(g, v), ModeKind::SignalOnly));
  EXPECT_THROW(SpectralAmplitude(g, Eigen::VectorXcd::Zero(3)), std::invalid_argument);
}

TEST(ConjugateMode, DeltaMovesToMirrorBinWithConjugatePhase) {
  const auto g = grid_of(4);
  const double theta = 0.7;
  const auto f = TimeFreqMode::delta(g, 3, std::polar(1.0, theta));
  const auto c = conjugate_mode(f);
  EXPECT_EQ(c.kind(), ModeKind::IdlerOnly);
  EXPECT_NEAR(std::arg(c[g.index(-3)]), -theta, 1e-15);
  EXPECT_DOUBLE_EQ(std::abs(c[g.index(-3)]), 1.0);
  EXPECT_EQ(std::abs(c[g.index(3)]), 0.0);
}

TEST(ConjugateMode, RoundTripIsExactOnRandomModes) {
  const auto g = grid_of(32);
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const auto f = random_mode(g, rng, false);
    const auto back = conjugate_mode(conjugate_mode(f));
    EXPECT_LE((back.values() - f.values()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_NEAR(conjugate_mode(f).amplitude().norm(), f.amplitude().norm(), 1e-15);
  }
}

TEST(ScExtend, DeltaBecomesBichromatic) {
  const auto g = grid_of(4);
  const auto sc = sc_extend(TimeFreqMode::delta(g, 2));
  EXPECT_EQ(sc.kind(), ModeKind::SelfConjugated);
  EXPECT_NEAR(std::abs(sc[g.index(2)]), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(std::abs(sc[g.index(-2)]), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_TRUE(is_self_conjugated(sc));
}

TEST(ScExtend, GaussianEnvelopeGivesMirrorSymmetricIntensity) {
  const auto g = grid_of(16);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(32);
  for (int k = 1; k <= 16; ++k) {
    const double x = (k - 6.0) / 3.0;
    v[static_cast<Eigen::Index>(g.index(k))] = std::polar(std::exp(-x * x), 0.3 * k * k);
  }
  const auto sc = sc_extend(TimeFreqMode::normalized(SpectralAmplitude(g, v)));
  for (int k = 1; k <= 16; ++k) {
    EXPECT_NEAR(std::norm(sc[g.index(k)]), std::norm(sc[g.index(-k)]), 1e-15);
  }
  EXPECT_TRUE(is_self_conjugated(sc, nullptr, 1e-12));
}

TEST(ScExtend, ChirpedPhaseIsRemovedBeforeThePredicate) {
  const auto g = grid_of(16);
  Eigen::VectorXd phase(16);
  for (int k = 0; k < 16; ++k) phase[k] = 0.05 * (k + 1) * (k + 1);
  const JointSpectrum joint(g, Eigen::VectorXd::Constant(16, 0.8), phase);
  std::mt19937_64 rng(3);
  const auto f0 = random_mode(g, rng, true);
  const auto sc = sc_extend(f0, &joint);
  EXPECT_TRUE(is_self_conjugated(sc, &joint));
  EXPECT_FALSE(is_self_conjugated(sc));
  EXPECT_NEAR(sc.amplitude().norm(), 1.0, 1e-15);
}

TEST(ScExtend, RejectsIdlerSupport) {
  const auto g = grid_of(4);
  EXPECT_THROW(sc_extend(TimeFreqMode::delta(g, -1)), std::invalid_argument);
  std::mt19937_64 rng(5);
  EXPECT_THROW(sc_extend(random_mode(g, rng, false)), std::invalid_argument);
}

TEST(GramSchmidt, DeltaSeedCompletesWithCanonicalVectors) {
  const auto g = grid_of(4);
  const auto basis = gram_schmidt_complete(TimeFreqMode::delta(g, 1), 3);
  ASSERT_EQ(basis.size(), 3u);
  for (int k = 1; k <= 3; ++k) {
    EXPECT_DOUBLE_EQ(std::abs(basis[static_cast<std::size_t>(k - 1)][g.index(k)]), 1.0);
  }
}

TEST(GramSchmidt, RandomSeedGivesIdentityGramMatrix) {
  const auto g = grid_of(24);
  std::mt19937_64 rng(7);
  const auto f0 = random_mode(g, rng, true);
  const auto basis = gram_schmidt_complete(f0, 24);
  Eigen::MatrixXcd m(48, 24);
  for (std::size_t j = 0; j < basis.size(); ++j) {
    m.col(static_cast<Eigen::Index>(j)) = basis[j].values();
    EXPECT_EQ(basis[j].kind(), ModeKind::SignalOnly);
  }
  const Eigen::MatrixXcd gram = m.adjoint() * m;
  EXPECT_LE((gram - Eigen::MatrixXcd::Identity(24, 24)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(basis[0].values(), f0.values());
}

TEST(GramSchmidt, CountOneReturnsSeedAndBadCountsThrow) {
  const auto g = grid_of(4);
  const auto f0 = TimeFreqMode::delta(g, 2, Complex(0.0, 1.0));
  const auto one = gram_schmidt_complete(f0, 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].values(), f0.values());
  EXPECT_THROW(gram_schmidt_complete(f0, 5), std::invalid_argument);
  EXPECT_THROW(gram_schmidt_complete(f0, 0), std::invalid_argument);
}

TEST(JointSpectrum, ValidatesAndExtendsSymmetrically) {
  const auto g = grid_of(3);
  EXPECT_THROW(JointSpectrum(g, Eigen::VectorXd::Constant(3, -0.1), Eigen::VectorXd::Zero(3)),
               std::invalid_argument);
  EXPECT_THROW(JointSpectrum(g, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2)), std::invalid_argument);
  const JointSpectrum j(g, Eigen::Vector3d(0.1, 0.2, 0.3), Eigen::Vector3d(1.0, 2.0, 3.0));
  for (int k = 1; k <= 3; ++k) {
    EXPECT_EQ(j.magnitude_at(g.index(k)), j.magnitude_at(g.index(-k)));
    EXPECT_EQ(j.phase_at(g.index(k)), j.phase_at(g.index(-k)));
  }
}

TEST(BranchParts, SplitAnScModeIntoNormalizedHalves) {
  const auto g = grid_of(4);
  const auto sc = sc_extend(TimeFreqMode::delta(g, 3));
  const auto s = signal_part(sc);
  const auto i = idler_part(sc);
  ASSERT_TRUE(s && i);
  EXPECT_EQ(s->kind(), ModeKind::SignalOnly);
  EXPECT_EQ(i->kind(), ModeKind::IdlerOnly);
  EXPECT_FALSE(idler_part(TimeFreqMode::delta(g, 1)).has_value());
}
