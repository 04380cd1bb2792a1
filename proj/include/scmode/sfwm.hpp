#pragma once

// Spontaneous four-wave mixing: lumped and distributed propagation of a
// Gaussian state, plus closed forms for self-conjugated and heralded squeezing.

#include <variant>

#include "scmode/fopa.hpp"
#include "scmode/gaussian.hpp"
#include "scmode/spectral.hpp"

namespace scmode {

/// Applies two_mode_squeeze(r = |xi_k|, phi = phi_k) to every conjugate pair.
/// Disjoint pairs commute, so the order is irrelevant.
GaussianState apply_sfwm_lumped(GaussianState state, const JointSpectrum& joint);

/// Same, visiting the pairs in the given order of signal offsets 1..N.
GaussianState apply_sfwm_lumped(GaussianState state, const JointSpectrum& joint,
                                std::span<const std::size_t> pair_order);

/// (1/2) sum_k |f_k|^2 exp(-2|xi_k|): the X variance of a self-conjugated
/// mode after lumped SFWM on vacuum. Throws std::invalid_argument when `f` is
/// not self-conjugated with respect to the joint spectrum's phase.
double sc_variance_closed_form(const TimeFreqMode& f, const JointSpectrum& joint);

struct HeraldParams {
  /// d<X_signal>/d(gamma) for an X-quadrature outcome gamma on the idler.
  double slope;
  /// Squeezing parameter of the heralded state, -1/2 ln cosh(2r).
  double r_heralded;
  /// Heralded X variance, 1/(2 cosh 2r).
  double variance;
};

/// Heralding on a flat-xi two-mode squeezed pair. The slope is the
/// regression coefficient Cov(x_s, x_i)/Var(x_i) = -tanh(2r).
HeraldParams heralded_params(double r);

/// Split-step propagation through the fiber: per segment, a half-step of
/// thermal loss (t = exp(-alpha dz/2), n = raman_n) on every bin, the exact
/// per-pair Bogoliubov transfer of the segment at the midpoint pump power,
/// and another loss half-step. The pump decays only by linear loss.
/// Throws InternalConsistencyError if the output is unphysical.
GaussianState apply_sfwm_distributed(GaussianState state, const FopaParams& params,
                                     const FrequencyGrid& grid);

struct Lumped {};
struct Distributed {
  FopaParams params;
};
using SqueezeModel = std::variant<Lumped, Distributed>;

struct SqueezeRun {
  /// Lossless reference spectrum; its phase defines the self-conjugated modes.
  JointSpectrum joint;
  SqueezeModel model;
  GaussianState output;
};

SqueezeRun run_lumped(const JointSpectrum& joint);
SqueezeRun run_distributed(const FopaParams& params, const FrequencyGrid& grid);

/// Squeezing and antisqueezing in dB relative to vacuum, both reported as
/// positive numbers for a squeezed state.
struct SqueezingDb {
  double squeeze_db;
  double antisqueeze_db;
};
SqueezingDb squeezing_db(const GaussianState& state, const TimeFreqMode& mode);

struct RamanTargets {
  double squeeze_db = 10.3;
  double antisqueeze_db = 22.0;
  /// Fraction of power lost over the fiber.
  double loss_total = 0.072;
};

struct RamanCalibrationOptions {
  double length = 1500.0;
  double gamma_nl = 1.3e-3;
  std::size_t half_bins = 32;
  std::size_t segments = 64;
  double tolerance_db = 1e-6;
};

struct RamanCalibration {
  double raman_n;
  /// Fiber configuration at the solution (broadband phase matching).
  FopaParams params;
  SqueezingDb achieved;
};

/// Finds the Raman reservoir occupation that, with the pump tuned so the
/// distributed broadband model reaches the antisqueezing target, yields the
/// squeezing target. Bisection on raman_n outside, false position on pump
/// power inside. Throws CalibrationError when the squeezing target is
/// unreachable.
RamanCalibration calibrate_raman(const RamanTargets& targets,
                                 const RamanCalibrationOptions& options = {});

/// Squeezing of the bichromatic self-conjugated mode at signal offset 1
/// after distributed propagation from vacuum.
SqueezingDb distributed_squeezing(const FopaParams& params, const FrequencyGrid& grid);

}  // namespace scmode
