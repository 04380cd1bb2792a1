#pragma once

// Frequency grids, spectral amplitudes and time-frequency modes.
//
// The grid is a symmetric discretization around the pump frequency w0 with
// N bins per branch: idler bins at w0 - k*d and signal bins at w0 + k*d for
// k = 1..N. There is no bin at w0 itself. Bins are stored in ascending
// frequency order, so storage index i and its conjugate 2N-1-i sit at mirror
// positions around w0.
//
// Mode convention: a TimeFreqMode with values f_k has annihilation operator
// a_f = sum_k conj(f_k) a_k. Unit 2-norm over bins means a normalized mode.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace scmode {

using Complex = std::complex<double>;

class FrequencyGrid {
 public:
  FrequencyGrid(double center_rad_s, double spacing_rad_s, std::size_t half_bins);

  double center() const { return center_; }
  double spacing() const { return spacing_; }
  std::size_t half_bins() const { return half_bins_; }
  std::size_t size() const { return 2 * half_bins_; }

  /// Signed bin offset k in {-N..-1, 1..N}; negative offsets are idler bins.
  int offset(std::size_t index) const;
  std::size_t index(int offset) const;
  std::size_t signal_index(std::size_t k) const { return half_bins_ + k - 1; }
  std::size_t idler_index(std::size_t k) const { return half_bins_ - k; }
  std::size_t conj(std::size_t index) const { return size() - 1 - index; }
  bool is_signal(std::size_t index) const { return index >= half_bins_; }

  /// Detuning from the pump, rad/s.
  double detuning(std::size_t index) const { return offset(index) * spacing_; }
  double frequency(std::size_t index) const { return center_ + detuning(index); }

  bool operator==(const FrequencyGrid&) const = default;

 private:
  double center_;
  double spacing_;
  std::size_t half_bins_;
};

FrequencyGrid make_grid(double center_rad_s, double spacing_rad_s, std::size_t half_bins);

class SpectralAmplitude {
 public:
  explicit SpectralAmplitude(const FrequencyGrid& grid);
  SpectralAmplitude(const FrequencyGrid& grid, Eigen::VectorXcd values);

  const FrequencyGrid& grid() const { return grid_; }
  const Eigen::VectorXcd& values() const { return values_; }
  Complex operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }

  double norm() const { return values_.norm(); }
  double signal_power() const;
  double idler_power() const;

 private:
  FrequencyGrid grid_;
  Eigen::VectorXcd values_;
};

enum class ModeKind { SignalOnly, IdlerOnly, SelfConjugated, General };

class JointSpectrum;

class TimeFreqMode {
 public:
  /// Requires unit norm (to 1e-12) and, for SignalOnly/IdlerOnly, support on
  /// the corresponding branch only.
  TimeFreqMode(SpectralAmplitude amplitude, ModeKind kind);

  /// Normalizes `amplitude` and infers the narrowest kind that fits.
  static TimeFreqMode normalized(const SpectralAmplitude& amplitude);
  static TimeFreqMode delta(const FrequencyGrid& grid, int offset, Complex phase = 1.0);

  const SpectralAmplitude& amplitude() const { return amplitude_; }
  const FrequencyGrid& grid() const { return amplitude_.grid(); }
  const Eigen::VectorXcd& values() const { return amplitude_.values(); }
  Complex operator[](std::size_t i) const { return amplitude_[i]; }
  ModeKind kind() const { return kind_; }

 private:
  SpectralAmplitude amplitude_;
  ModeKind kind_;
};

/// Per-conjugate-pair squeezing magnitude and phase, stored on the signal
/// branch only; the idler side is the mirror image by construction.
class JointSpectrum {
 public:
  JointSpectrum(const FrequencyGrid& grid, Eigen::VectorXd magnitude, Eigen::VectorXd phase);
  static JointSpectrum flat(const FrequencyGrid& grid, double magnitude, double phase = 0.0);

  const FrequencyGrid& grid() const { return grid_; }
  /// Indexed by k-1 for signal offset k.
  const Eigen::VectorXd& magnitude() const { return magnitude_; }
  const Eigen::VectorXd& phase() const { return phase_; }

  /// Values at any storage index (either branch).
  double magnitude_at(std::size_t index) const;
  double phase_at(std::size_t index) const;

 private:
  FrequencyGrid grid_;
  Eigen::VectorXd magnitude_;
  Eigen::VectorXd phase_;
};

/// g[conj(k)] = conj(f[k]). An involutive isometry.
TimeFreqMode conjugate_mode(const TimeFreqMode& f);

/// (f + conjugate_mode(f)) / sqrt(2), with each bin of the result
/// multiplied by exp(i*phi(w)/2) when a joint spectrum is given. In the
/// a_f = sum conj(f_k) a_k convention this puts exp(-i*phi/2) on the mode
/// operator, which is what makes the result squeezed in its X quadrature.
TimeFreqMode sc_extend(const TimeFreqMode& f_signal, const JointSpectrum* joint = nullptr);

/// Self-conjugation test: after dividing out exp(i*phi/2) (when `joint` is
/// given), every conjugate pair must satisfy f[conj(k)] = conj(f[k]).
bool is_self_conjugated(const TimeFreqMode& f, const JointSpectrum* joint = nullptr,
                        double tolerance = 1e-10);

/// Completes f0 to `count` orthonormal signal-only modes. The completion
/// draws canonical basis vectors in bin order and skips any whose residual
/// after projection has norm below 1e-8.
std::vector<TimeFreqMode> gram_schmidt_complete(const TimeFreqMode& f0, std::size_t count);

/// Signal-branch and idler-branch parts of a mode, each renormalized.
/// Returns nullopt for a branch with no power.
std::optional<TimeFreqMode> signal_part(const TimeFreqMode& f);
std::optional<TimeFreqMode> idler_part(const TimeFreqMode& f);

namespace detail {

/// Orthonormal columns whose leading columns span `leading`, completed from
/// canonical vectors e_i for i in `candidates` (in order) until `count`
/// columns exist. Two rounds of classical Gram-Schmidt per vector.
Eigen::MatrixXcd orthonormal_completion(const Eigen::MatrixXcd& leading,
                                        std::span<const std::size_t> candidates,
                                        std::size_t count);

}  // namespace detail

}  // namespace scmode
