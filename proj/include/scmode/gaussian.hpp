#pragma once

// Gaussian states over M bosonic modes.
//
// Quadratures are interleaved x_1, p_1, ..., x_M, p_M with x = (a + a^dagger)/sqrt(2),
// so the vacuum covariance is identity/2. A mode function f (length M, unit
// norm) selects a_f = sum_k conj(f_k) a_k and its rotated quadrature
// X_theta = (a_f e^{-i theta} + a_f^dagger e^{i theta}) / sqrt(2).

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "scmode/fopa.hpp"
#include "scmode/spectral.hpp"

namespace scmode {

inline constexpr double kVacuumVariance = 0.5;
inline constexpr double kPhysicalityTolerance = 1e-9;

class GaussianState {
 public:
  /// Validates dimensions and symmetry (to 1e-12 relative).
  GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd cov);

  std::size_t modes() const { return static_cast<std::size_t>(mean_.size() / 2); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& cov() const { return cov_; }

  // In-place kernels behind the value-returning channel functions below.
  void apply_pair_transfer(std::size_t i, std::size_t j, const PairTransfer& t);
  void apply_loss(std::size_t bin, double transmissivity, double n_thermal);
  void apply_phase(std::size_t bin, double angle);

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
};

struct BinPair {
  std::size_t first;
  std::size_t second;
};

GaussianState vacuum(std::size_t modes);
GaussianState vacuum(const FrequencyGrid& grid);

/// a -> mu a + nu b^dagger, b -> mu b + nu a^dagger.
GaussianState pair_bogoliubov(GaussianState state, BinPair pair, const PairTransfer& t);

/// exp(-(xi a^dagger b^dagger - h.c.)) with xi = r e^{i phi}; in the
/// Heisenberg picture a -> cosh(r) a - e^{i phi} sinh(r) b^dagger.
GaussianState two_mode_squeeze(GaussianState state, BinPair pair, double r, double phi);

/// Thermal loss: mean scales by sqrt(t); the bin's covariance block becomes
/// t*cov + (1-t)(n_thermal + 1/2) I.
GaussianState loss_channel(GaussianState state, std::size_t bin, double transmissivity,
                           double n_thermal);

/// a -> e^{i angle} a.
GaussianState phase_shift(GaussianState state, std::size_t bin, double angle);

struct ModeSelector {
  TimeFreqMode mode;
  double phase = 0.0;
};

struct QuadratureStats {
  double mean;
  double variance;
};

/// Real phase-space direction v with X_theta = v . r.
Eigen::VectorXd quadrature_direction(const Eigen::VectorXcd& mode, double theta);

QuadratureStats quadrature_stats(const GaussianState& state, const Eigen::VectorXcd& mode,
                                 double theta);
QuadratureStats mode_quadrature_stats(const GaussianState& state, const ModeSelector& sel);

/// Extremes of Var(X_theta) over theta, from the 2x2 covariance of
/// (X_0, X_pi/2). `min_angle` is the theta attaining the minimum.
struct QuadratureExtrema {
  double min_variance;
  double max_variance;
  double min_angle;
};
QuadratureExtrema quadrature_extrema(const GaussianState& state, const Eigen::VectorXcd& mode);

/// <n> = (Var X + Var P + <X>^2 + <P>^2 - 1) / 2.
double mean_photon_number(const GaussianState& state, const Eigen::VectorXcd& mode);
double marginal_photon_stats(const GaussianState& state, const TimeFreqMode& mode);

struct PhysicalityReport {
  bool physical;
  /// Smallest eigenvalue of cov + (i/2) Omega.
  double min_eigenvalue;
  explicit operator bool() const { return physical; }
};
PhysicalityReport check_physical(const GaussianState& state);

/// Homodyne measurement of X_theta on one mode, prepared once per
/// (state, mode, theta). The measured mode is removed: the conditional state
/// lives on the M-1 retained modes whose mode functions are the columns of
/// `retained_basis()`. The retained basis is the orthonormal completion of
/// the measured mode by canonical bin vectors in bin order, so measuring a
/// single bin leaves the other bins in their original order.
class HomodyneConditioner {
 public:
  HomodyneConditioner(const GaussianState& state, const Eigen::VectorXcd& mode, double theta);

  /// Mean and variance of the outcome distribution.
  double outcome_mean() const { return outcome_mean_; }
  double outcome_variance() const { return outcome_variance_; }

  /// Conditional state for outcome gamma. Covariance is gamma-independent;
  /// mean is affine in gamma.
  GaussianState condition(double gamma) const;
  const Eigen::MatrixXd& conditional_cov() const { return cond_cov_; }
  /// d(conditional mean)/d(gamma).
  const Eigen::VectorXd& gain() const { return gain_; }

  const Eigen::MatrixXcd& retained_basis() const { return basis_; }
  /// Re-expresses a grid mode in the retained basis. Throws
  /// std::invalid_argument if it overlaps the measured mode.
  Eigen::VectorXcd project(const Eigen::VectorXcd& grid_mode) const;

  /// Draws outcomes from the marginal N(outcome_mean, outcome_variance).
  std::vector<double> sample_outcomes(std::size_t count, std::uint64_t seed) const;

 private:
  Eigen::VectorXcd measured_;
  Eigen::MatrixXcd basis_;
  double outcome_mean_;
  double outcome_variance_;
  Eigen::VectorXd base_mean_;
  Eigen::VectorXd gain_;
  Eigen::MatrixXd cond_cov_;
};

struct ConditionalState {
  GaussianState state;
  Eigen::MatrixXcd retained_basis;
};

ConditionalState homodyne_condition(const GaussianState& state, const ModeSelector& sel,
                                    double gamma);

}  // namespace scmode
