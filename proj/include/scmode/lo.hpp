#pragma once

// Local oscillators synthesized by seeded four-wave mixing, and the seed
// sources that feed them.

#include <cstdint>
#include <optional>
#include <vector>

#include "scmode/spectral.hpp"

namespace scmode {

enum class SeedKind { Coherent, NoiseModulated, FilteredAse };

struct LoRealization {
  /// Unnormalized; carries the relative branch powers.
  SpectralAmplitude spectrum;
  SeedKind seed_kind = SeedKind::Coherent;
  /// Classical intensity noise above true shot noise, linear.
  double excess_rin = 0.0;
};

enum class EnvelopeShape { Gaussian, FlatTop };

struct SeedModel {
  SeedKind kind = SeedKind::Coherent;
  /// Seed carrier detuning from the pump, rad/s. Snapped to the nearest
  /// signal bin.
  double center_detuning = 0.0;

  // Noise-modulated laser. Rates in Hz, depths in radians.
  double coherence_control_rate = 40e6;  // slow dither
  double dither_depth = 0.0;
  double random_pm_bandwidth = 300e6;    // Ornstein-Uhlenbeck corner
  double random_pm_depth = 0.0;          // stationary rms phase
  double sine_pm_freq = 1e9;
  double sine_pm_depth = 0.0;

  // Filtered ASE. Bandwidth is the envelope FWHM (Gaussian) or full width
  // (FlatTop), rad/s.
  EnvelopeShape envelope = EnvelopeShape::Gaussian;
  double ase_bandwidth = 0.0;

  std::uint64_t rng_seed = 1;

  /// Throws std::invalid_argument on negative rates, depths or bandwidths.
  void validate() const;
  bool operator==(const SeedModel&) const = default;
};

/// Signal branch sqrt(G) f0, idler branch sqrt(G-1) conjugate_mode(f0).
/// With a joint spectrum, every bin also carries exp(i*phi/2), the same
/// factor sc_extend applies, so the balanced LO matches the squeezer's
/// self-conjugated modes. Throws std::invalid_argument for G < 1 or a
/// non-signal-only seed.
LoRealization fwm_output(const TimeFreqMode& f0, double gain,
                         const JointSpectrum* joint = nullptr);

/// Attenuates the signal branch power by (G-1)/G. Applying it twice keeps
/// attenuating. Throws std::invalid_argument for G <= 1.
LoRealization balance(const LoRealization& lo, double gain);

/// Unit-norm mode of an LO spectrum; throws std::invalid_argument when the
/// spectrum is zero.
TimeFreqMode lo_mode(const LoRealization& lo);

/// 10^(dB/10) - 1. Throws std::invalid_argument for negative input.
double lo_excess_rin(double apparent_shot_db_above_true);

/// Draws `count` seed modes, each unit norm and signal-only. Sample i uses
/// its own generator seeded with seed_seq{low32(rng_seed), high32(rng_seed), i},
/// so any subset of a batch can be regenerated independently.
///
/// NoiseModulated samples a unit-amplitude field exp(i*phase(t)) over the
/// window T = 2*pi/spacing on 2*half_bins points, with phase = OU process +
/// sine (random start phase) + dither sine (random start phase), and
/// takes its DFT onto bins centered on the carrier. FilteredAse draws
/// independent complex Gaussian bins scaled by sqrt(envelope).
///
/// Throws AliasingError when more than 1% of the expected power falls
/// outside the signal branch; the remainder is truncated.
std::vector<TimeFreqMode> synth_seed(const SeedModel& model, const FrequencyGrid& grid,
                                     std::size_t count);

/// Expected normalized intensity per bin where it has a closed form:
/// Coherent (a delta), FilteredAse (normalized envelope), and
/// NoiseModulated with only the sine stage (Bessel sidebands J_n(m)^2).
std::optional<Eigen::VectorXd> seed_expected_intensity(const SeedModel& model,
                                                       const FrequencyGrid& grid);

}  // namespace scmode
