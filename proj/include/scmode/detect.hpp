#pragma once

// Balanced homodyne detection, the loss/noise budget between the squeezer and
// the spectrum analyzer, heralding, and pump-power sweeps.
//
// Levels are linear noise powers relative to TRUE shot noise (the vacuum
// variance 1/2 at the detector). The apparent shot level seen with the signal
// blocked is 1 + rin_excess.

#include <cstdint>
#include <vector>

#include "scmode/fopa.hpp"
#include "scmode/gaussian.hpp"
#include "scmode/lo.hpp"
#include "scmode/spectral.hpp"

namespace scmode {

struct DetectionChain {
  /// Transmissivities in optical order, each in (0, 1].
  std::vector<double> efficiencies;
  /// Electronic dark noise relative to true shot noise.
  double dark_rel = 0.0;
  /// LO classical intensity noise left after common-mode rejection.
  double rin_excess = 0.0;
  /// Informational; rin_excess is already the post-rejection figure.
  double cmrr_db = 0.0;

  void validate() const;
  bool operator==(const DetectionChain&) const = default;
};

double chain_efficiency(const DetectionChain& chain);

struct MeasuredLevel {
  double squeezed_rel_true_shot;
  double antisqueezed_rel_true_shot;
  double apparent_shot_rel_true_shot;
  double dark_rel_true_shot;

  double squeezed_db() const;
  double antisqueezed_db() const;
  /// Squeezing as it would be read against the apparent shot level.
  double squeezed_db_re_apparent() const;
};

double to_db(double linear);
double from_db(double db);

/// Level of one quadrature with internal variance v after the chain:
/// [eta*v + (1-eta)/2] / (1/2) + dark + rin.
double chain_level(double v_internal, const DetectionChain& chain, double extra_rin = 0.0);

MeasuredLevel measured_level(double v_squeezed, double v_antisqueezed,
                             const DetectionChain& chain);
/// Takes the antisqueezed quadrature to be the pure-state partner 1/(4v).
MeasuredLevel measured_level(double v_internal, const DetectionChain& chain);

/// Inverts chain_level: the internal variance that would produce `level`.
/// Throws std::domain_error when the level lies below what the chain can
/// deliver for any v > 0.
double infer_internal_variance(double level_rel_true_shot, const DetectionChain& chain,
                               double extra_rin = 0.0);

/// Re-budgets a measured level: adds excess RIN and replaces one dark level
/// with another.
double rebudget_level(double level, double added_rin, double dark_before, double dark_after);

/// Homodyne level at LO angle theta (squeezed field) and theta + pi/2
/// (antisqueezed field). The chain acts as loss channels on every bin in
/// order. The LO's own excess_rin adds to the chain's.
MeasuredLevel bhd_measure(const GaussianState& state, const LoRealization& lo, double theta,
                          const DetectionChain& chain);

/// Same, at the minimizing and maximizing angles.
struct BhdScan {
  MeasuredLevel level;
  double min_angle;
};
BhdScan bhd_scan(const GaussianState& state, const LoRealization& lo,
                 const DetectionChain& chain);

struct HeraldOptions {
  /// Pre-loss on every idler bin ahead of the heralding detector.
  double herald_efficiency = 1.0;
  double idler_theta = 0.0;
  double signal_theta = 0.0;
  /// Monte-Carlo draws of the herald outcome for the photon-number check.
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
};

struct HeraldPoint {
  double gamma;
  double signal_mean;
  double signal_variance;
};

struct HeraldResult {
  std::vector<HeraldPoint> points;
  /// Least-squares fit of signal_mean against gamma.
  double slope;
  double intercept;
  double variance;
  /// Largest |variance(gamma) - variance| over the sampled outcomes.
  double variance_spread;
  /// Mean photon number of the signal mode averaged over outcomes drawn
  /// from the herald marginal, with its standard error, and the
  /// unconditioned value it should reproduce.
  double mc_photons;
  double mc_photons_stderr;
  double marginal_photons;
};

/// Conditions on the idler-mode quadrature for every gamma and records the
/// signal-mode statistics. Throws std::invalid_argument when the two modes
/// overlap.
HeraldResult herald_pipeline(const GaussianState& state, const TimeFreqMode& idler_mode,
                             const TimeFreqMode& signal_mode, std::span<const double> gammas,
                             const HeraldOptions& options = {});

struct SweepRow {
  double pump_power;
  /// Internal squeezing/antisqueezing of the SC mode, dB re vacuum.
  double internal_squeeze_db;
  double internal_antisqueeze_db;
  /// After the chain, dB re true shot noise.
  double measured_squeeze_db;
  double measured_antisqueeze_db;
};

/// Distributed model per pump power; the LO is the balanced FWM mode of
/// `lo_seed` carrying the lossless spectrum's phase. Points are independent
/// and are evaluated concurrently; rows come back in input order.
std::vector<SweepRow> sweep_pump(std::span<const double> powers, const FopaParams& params,
                                 const FrequencyGrid& grid, const DetectionChain& chain,
                                 const TimeFreqMode& lo_seed, double lo_excess_rin = 0.0);

}  // namespace scmode
