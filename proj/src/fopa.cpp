#include "scmode/fopa.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "scmode/errors.hpp"

namespace scmode {

namespace {

// Below this |g^2 L^2| the hyperbolic functions are replaced by their series;
// the first dropped term is below 1e-12 relative.
constexpr double kSeriesThreshold = 1e-3;

struct GainFunctions {
  double cosh_term;   // cosh(gL)
  double sinh_over_g; // sinh(gL)/g
};

GainFunctions gain_functions(double g2, double length) {
  const double x = g2 * length * length;
  if (std::abs(x) < kSeriesThreshold) {
    return {1.0 + x / 2.0 + x * x / 24.0 + x * x * x / 720.0,
            length * (1.0 + x / 6.0 + x * x / 120.0 + x * x * x / 5040.0)};
  }
  if (g2 > 0.0) {
    const double g = std::sqrt(g2);
    return {std::cosh(g * length), std::sinh(g * length) / g};
  }
  const double h = std::sqrt(-g2);
  return {std::cos(h * length), std::sin(h * length) / h};
}

}  // namespace

void FopaParams::validate() const {
  auto fail = [](const char* what) {
    throw std::invalid_argument(std::string("fopa params: ") + what);
  };
  if (!(length > 0.0) || !std::isfinite(length)) fail("length must be positive");
  if (!(pump_peak_power >= 0.0) || !std::isfinite(pump_peak_power)) {
    fail("pump_peak_power must be non-negative");
  }
  if (segments < 1) fail("segments must be at least 1");
  if (!(raman_n >= 0.0)) fail("raman_n must be non-negative");
  if (!(loss_per_length >= 0.0)) fail("loss_per_length must be non-negative");
  if (!std::isfinite(beta2) || !std::isfinite(beta4) || !std::isfinite(gamma_nl)) {
    fail("dispersion and nonlinearity must be finite");
  }
}

double linear_phase_mismatch(const FopaParams& params, double detuning) {
  const double w2 = detuning * detuning;
  return params.beta2 * w2 + params.beta4 * w2 * w2 / 12.0;
}

PairTransfer fopa_pair_transfer(const FopaParams& params, double detuning, double length,
                                double power) {
  const double gp = params.gamma_nl * power;
  if (params.phase_matching == PhaseMatching::Broadband) {
    const double r = gp * length;
    return {{std::cosh(r), 0.0}, {-std::sinh(r), 0.0}};
  }
  const double db = linear_phase_mismatch(params, detuning);
  const double kappa = db + 2.0 * gp;
  const double g2 = gp * gp - 0.25 * kappa * kappa;
  const auto [c, s] = gain_functions(g2, length);
  const double lambda = gp - 0.5 * db;
  const std::complex<double> frame = std::polar(1.0, lambda * length);
  PairTransfer t{frame * std::complex<double>(c, 0.5 * kappa * s),
                 frame * std::complex<double>(0.0, gp * s)};
  if (!std::isfinite(std::abs(t.mu)) || !std::isfinite(std::abs(t.nu))) {
    throw std::range_error("fopa: parametric gain overflows double precision");
  }
  return t;
}

JointSpectrum fopa_joint_spectrum(const FopaParams& params, const FrequencyGrid& grid) {
  params.validate();
  const auto n = static_cast<Eigen::Index>(grid.half_bins());
  Eigen::VectorXd magnitude(n);
  Eigen::VectorXd phase(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double detuning = static_cast<double>(k + 1) * grid.spacing();
    const auto t = fopa_pair_transfer(params, detuning, params.length, params.pump_peak_power);
    const double nu = std::abs(t.nu);
    magnitude[k] = std::asinh(nu);
    phase[k] = nu > 0.0 ? std::arg(-t.mu * t.nu) : 0.0;
    if (!std::isfinite(magnitude[k])) {
      throw std::range_error("fopa: joint spectrum magnitude overflows");
    }
  }
  return JointSpectrum(grid, std::move(magnitude), std::move(phase));
}

double calibrate_peak_detuning(double target, const FopaParams& params) {
  if (params.phase_matching == PhaseMatching::Broadband) {
    throw std::invalid_argument("calibrate_peak_detuning: broadband phase matching has no peak");
  }
  if (!(params.gamma_nl > 0.0)) {
    throw std::invalid_argument("calibrate_peak_detuning: gamma_nl must be positive");
  }
  if (target == 0.0) return 0.0;
  if (!(params.beta2 < 0.0)) {
    throw std::invalid_argument("calibrate_peak_detuning: anomalous dispersion (beta2 < 0) required");
  }
  const double db = linear_phase_mismatch(params, target);
  auto kappa = [&](double p) { return db + 2.0 * params.gamma_nl * p; };

  double lo = 0.0;
  double hi = 1.0;
  constexpr double kMaxPower = 1e9;
  while (kappa(lo) * kappa(hi) > 0.0) {
    if (hi >= kMaxPower) {
      std::ostringstream msg;
      msg << "calibrate_peak_detuning: no root in [" << lo << ", " << hi
          << "] W; kappa = " << kappa(lo) << ", " << kappa(hi) << " 1/m";
      throw CalibrationError(msg.str());
    }
    hi *= 2.0;
  }
  if (kappa(lo) == 0.0) return lo;
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    const double k = kappa(mid);
    if (k == 0.0) return mid;
    if ((k < 0.0) == (kappa(lo) < 0.0)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double pia_gain_from_xi(double xi) {
  if (!(xi >= 0.0)) throw std::invalid_argument("pia_gain_from_xi: |xi| must be non-negative");
  const double s = std::sinh(xi);
  return 2.0 * s * s + 1.0;
}

double xi_from_pia_gain(double gain) {
  if (!(gain >= 1.0)) throw std::invalid_argument("xi_from_pia_gain: gain must be at least 1");
  return std::asinh(std::sqrt(0.5 * (gain - 1.0)));
}

}  // namespace scmode
