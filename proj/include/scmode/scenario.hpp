#pragma once

// Scenario files: INI text describing one simulation run.
//
// Physical quantities are kept in the units written in the file (GHz, MHz,
// dB, W, m); conversion to the library's SI/rad-per-second units happens in
// the accessors below and in the runner.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "scmode/detect.hpp"
#include "scmode/fopa.hpp"
#include "scmode/lo.hpp"
#include "scmode/spectral.hpp"

namespace scmode::cli {

enum class Directive {
  Single,
  PumpSweep,
  ModulationFrequencySweep,
  Herald,
  CalibrateRaman,
  CalibrateDetuning,
  PhaseMatchSpectrum,
  NoiseBudget,
};

enum class ModelKind { Flat, Lumped, Distributed };

struct GridSection {
  double center_thz = 193.4;
  double spacing_ghz = 1.0;
  std::size_t half_bins = 64;
  bool operator==(const GridSection&) const = default;
};

struct FiberSection {
  double beta2 = -21.7e-27;
  double beta4 = 0.0;
  double gamma = 1.3e-3;
  std::optional<double> pump_power_w;
  /// Solve the pump power that phase-matches this detuning instead.
  std::optional<double> peak_detuning_ghz;
  double length_m = 1500.0;
  /// Fraction of power lost over the whole length.
  double loss_fraction = 0.0;
  double raman_n = 0.0;
  std::size_t segments = 64;
  PhaseMatching phase_matching = PhaseMatching::Dispersive;
  bool operator==(const FiberSection&) const = default;
};

struct ModelSection {
  ModelKind kind = ModelKind::Lumped;
  double flat_xi = 0.0;
  double flat_phase = 0.0;
  bool operator==(const ModelSection&) const = default;
};

struct SeedSection {
  SeedKind kind = SeedKind::Coherent;
  double center_ghz = 1.0;
  double coherence_control_mhz = 40.0;
  double dither_depth_rad = 0.0;
  double random_pm_bandwidth_mhz = 300.0;
  double random_pm_depth_rad = 0.0;
  double sine_pm_ghz = 1.0;
  double sine_pm_depth_rad = 0.0;
  EnvelopeShape envelope = EnvelopeShape::Gaussian;
  double ase_bandwidth_ghz = 0.0;
  std::size_t samples = 1;
  bool operator==(const SeedSection&) const = default;
};

struct LoSection {
  double gain = 2.0;
  /// Apparent shot level above true shot noise caused by the LO.
  double apparent_shot_db = 0.0;
  bool operator==(const LoSection&) const = default;
};

struct ChainSection {
  std::vector<double> efficiencies;
  std::optional<double> dark_db;
  double residual_rin_db = 0.0;
  double cmrr_db = 0.0;
  bool operator==(const ChainSection&) const = default;
};

struct SweepSection {
  std::vector<double> pump_powers_w;
  std::vector<double> sine_freqs_ghz;
  bool operator==(const SweepSection&) const = default;
};

struct HeraldSection {
  std::vector<double> gammas{-3.0, -1.0, 0.0, 1.0, 3.0};
  std::size_t samples = 100000;
  double efficiency = 1.0;
  bool operator==(const HeraldSection&) const = default;
};

struct CalibrationSection {
  double target_detuning_ghz = 50.62;
  double target_squeeze_db = 10.3;
  double target_antisqueeze_db = 22.0;
  double loss_fraction = 0.072;
  std::size_t half_bins = 32;
  bool operator==(const CalibrationSection&) const = default;
};

struct BudgetSection {
  /// Measured squeezed level, dB re true shot noise.
  double baseline_level_db = -7.50;
  std::vector<double> baseline_efficiencies;
  std::optional<double> baseline_dark_db;
  double baseline_apparent_shot_db = 0.0;
  /// Internal squeezing estimate to push forward through the baseline chain.
  std::optional<double> internal_estimate_db;
  bool operator==(const BudgetSection&) const = default;
};

struct RunSection {
  Directive directive = Directive::Single;
  std::uint64_t seed = 1;
  std::string output;
  std::string description;
  bool operator==(const RunSection&) const = default;
};

struct Scenario {
  RunSection run;
  std::optional<GridSection> grid;
  std::optional<FiberSection> fiber;
  std::optional<ModelSection> model;
  std::optional<SeedSection> seed;
  std::optional<LoSection> lo;
  std::optional<ChainSection> chain;
  std::optional<SweepSection> sweep;
  std::optional<HeraldSection> herald;
  std::optional<CalibrationSection> calibration;
  std::optional<BudgetSection> budget;
  bool operator==(const Scenario&) const = default;
};

/// Carries every problem found, not only the first.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

/// Parses and validates. Throws ScenarioError.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);

/// Structural and range checks; returns the list of problems.
std::vector<std::string> validate(const Scenario& scenario);

/// INI text that parses back to an equal Scenario.
std::string serialize(const Scenario& scenario);

std::string_view directive_name(Directive d);
std::optional<Directive> directive_from(std::string_view name);

// Conversions to library types.
FrequencyGrid make_grid(const GridSection& grid);
FopaParams make_params(const FiberSection& fiber);
SeedModel make_seed_model(const SeedSection& seed, std::uint64_t rng_seed);
DetectionChain make_chain(const ChainSection& chain);

double ghz_to_rad_s(double ghz);

}  // namespace scmode::cli
