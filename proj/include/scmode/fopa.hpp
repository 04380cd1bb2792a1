#pragma once

// Fiber optical parametric amplifier model: phase matching, the per-pair
// Bogoliubov transfer of a fiber section, and the joint spectrum it implies.
//
// With detuning W from the pump, linear mismatch db(W) = beta2*W^2 + beta4*W^4/12,
// total mismatch kappa = db + 2*gamma*P and gain coefficient
// g^2 = (gamma*P)^2 - (kappa/2)^2, a section of length L maps
//
//   a_s -> mu * a_s + nu * a_i^dagger
//   mu = e^{i*lambda*L} (C + i*kappa/2 * S),   nu = e^{i*lambda*L} i*gamma*P * S
//
// where C = cosh(gL), S = sinh(gL)/g (continued to cos/sin for imaginary g
// and to a series at g -> 0) and lambda = gamma*P - db/2.

#include <complex>
#include <cstddef>

#include "scmode/spectral.hpp"

namespace scmode {

enum class PhaseMatching {
  /// Dispersion-limited phase matching from beta2/beta4.
  Dispersive,
  /// Ideal broadband phase matching: kappa = 0 and a real joint spectrum
  /// xi = gamma*P*L at every detuning.
  Broadband,
};

struct FopaParams {
  double beta2 = -21.7e-27;       // s^2/m
  double beta4 = 0.0;             // s^4/m
  double gamma_nl = 1.3e-3;       // 1/(W m)
  double pump_peak_power = 0.0;   // W
  double length = 1500.0;         // m
  double loss_per_length = 0.0;   // 1/m, power attenuation
  double raman_n = 0.0;           // reservoir mean photon number
  std::size_t segments = 64;
  PhaseMatching phase_matching = PhaseMatching::Dispersive;

  /// Throws std::invalid_argument naming the violated field.
  void validate() const;
  bool operator==(const FopaParams&) const = default;
};

/// Bogoliubov coefficients of one conjugate pair; |mu|^2 - |nu|^2 = 1.
struct PairTransfer {
  std::complex<double> mu{1.0, 0.0};
  std::complex<double> nu{0.0, 0.0};
};

double linear_phase_mismatch(const FopaParams& params, double detuning_rad_s);

/// Transfer of a section of `length` metres at constant pump `power`.
PairTransfer fopa_pair_transfer(const FopaParams& params, double detuning_rad_s, double length,
                                double power);

/// Lossless joint spectrum over the full fiber: |xi| = asinh|nu| and
/// phi = arg(-mu*nu), the phase of the two-mode squeezed vacuum the section
/// produces from vacuum. Throws std::range_error on overflow.
JointSpectrum fopa_joint_spectrum(const FopaParams& params, const FrequencyGrid& grid);

/// Pump peak power that puts perfect phase matching (kappa = 0) at the target
/// detuning, found by bisection to 1e-12 relative. Throws CalibrationError
/// when no root is bracketed.
double calibrate_peak_detuning(double target_detuning_rad_s, const FopaParams& params);

/// G = 2 sinh^2|xi| + 1.
double pia_gain_from_xi(double xi_magnitude);
double xi_from_pia_gain(double gain);

}  // namespace scmode
