#include "scmode/sfwm.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "scmode/errors.hpp"

namespace scmode {

namespace {

void require_grid(const GaussianState& state, const FrequencyGrid& grid, const char* op) {
  if (state.modes() != grid.size()) {
    throw std::invalid_argument(std::string(op) + ": state and grid sizes differ");
  }
}

double to_db(double ratio) { return 10.0 * std::log10(ratio); }

}  // namespace

GaussianState apply_sfwm_lumped(GaussianState state, const JointSpectrum& joint) {
  std::vector<std::size_t> order(joint.grid().half_bins());
  std::iota(order.begin(), order.end(), std::size_t{1});
  return apply_sfwm_lumped(std::move(state), joint, order);
}

GaussianState apply_sfwm_lumped(GaussianState state, const JointSpectrum& joint,
                                std::span<const std::size_t> pair_order) {
  const auto& grid = joint.grid();
  require_grid(state, grid, "apply_sfwm_lumped");
  for (std::size_t k : pair_order) {
    const double r = joint.magnitude()[static_cast<Eigen::Index>(k - 1)];
    const double phi = joint.phase()[static_cast<Eigen::Index>(k - 1)];
    state = two_mode_squeeze(std::move(state), {grid.signal_index(k), grid.idler_index(k)}, r, phi);
  }
  return state;
}

double sc_variance_closed_form(const TimeFreqMode& f, const JointSpectrum& joint) {
  if (!(f.grid() == joint.grid())) {
    throw std::invalid_argument("sc_variance_closed_form: grid mismatch");
  }
  if (!is_self_conjugated(f, &joint, 1e-9)) {
    throw std::invalid_argument("sc_variance_closed_form: mode is not self-conjugated");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < f.grid().size(); ++i) {
    sum += std::norm(f[i]) * std::exp(-2.0 * joint.magnitude_at(i));
  }
  return kVacuumVariance * sum;
}

HeraldParams heralded_params(double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("heralded_params: r must be non-negative");
  const double c2 = std::cosh(2.0 * r);
  return {-std::tanh(2.0 * r), -0.5 * std::log(c2), 0.5 / c2};
}

namespace {

GaussianState propagate(GaussianState state, const FopaParams& params, const FrequencyGrid& grid) {
  const auto segments = params.segments;
  const double dz = params.length / static_cast<double>(segments);
  const double alpha = params.loss_per_length;
  const double t_half = std::exp(-0.5 * alpha * dz);
  const bool dispersive = params.phase_matching == PhaseMatching::Dispersive;
  const std::size_t m = grid.size();
  const std::size_t n = grid.half_bins();

  std::vector<double> mismatch(n);
  for (std::size_t k = 1; k <= n; ++k) {
    mismatch[k - 1] = linear_phase_mismatch(params, static_cast<double>(k) * grid.spacing());
  }

  auto half_loss = [&] {
    if (t_half == 1.0) return;
    for (std::size_t b = 0; b < m; ++b) state.apply_loss(b, t_half, params.raman_n);
  };

  // Accumulated nonlinear pump phase gamma * int P dz.
  double pump_phase = 0.0;
  for (std::size_t s = 0; s < segments; ++s) {
    const double z0 = static_cast<double>(s) * dz;
    const double power = params.pump_peak_power * std::exp(-alpha * (z0 + 0.5 * dz));
    half_loss();
    if (power > 0.0) {
      for (std::size_t k = 1; k <= n; ++k) {
        auto t = fopa_pair_transfer(params, static_cast<double>(k) * grid.spacing(), dz, power);
        if (dispersive) {
          t.nu *= std::polar(1.0, 2.0 * pump_phase - mismatch[k - 1] * z0);
        }
        state.apply_pair_transfer(grid.signal_index(k), grid.idler_index(k), t);
      }
    }
    half_loss();
    pump_phase += params.gamma_nl * power * dz;
  }
  return state;
}

SqueezingDb squeezing_unchecked(const FopaParams& params, const FrequencyGrid& grid) {
  FopaParams lossless = params;
  lossless.loss_per_length = 0.0;
  const auto joint = fopa_joint_spectrum(lossless, grid);
  const auto mode = sc_extend(TimeFreqMode::delta(grid, 1), &joint);
  return squeezing_db(propagate(vacuum(grid), params, grid), mode);
}

// Illinois false position on a bracket with f(lo) < 0 < f(hi).
template <class F>
double solve_bracketed(F f, double lo, double hi, double f_lo, double f_hi, double f_tol) {
  int side = 0;
  for (int iter = 0; iter < 200; ++iter) {
    const double x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
    const double fx = f(x);
    if (std::abs(fx) <= f_tol || hi - lo <= 1e-14 * hi) return x;
    if (fx < 0.0) {
      lo = x;
      f_lo = fx;
      if (side == -1) f_hi *= 0.5;
      side = -1;
    } else {
      hi = x;
      f_hi = fx;
      if (side == 1) f_lo *= 0.5;
      side = 1;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

GaussianState apply_sfwm_distributed(GaussianState state, const FopaParams& params,
                                     const FrequencyGrid& grid) {
  params.validate();
  require_grid(state, grid, "apply_sfwm_distributed");
  state = propagate(std::move(state), params, grid);
  const auto report = check_physical(state);
  if (!report) {
    std::ostringstream msg;
    msg << "apply_sfwm_distributed: output is unphysical (min eigenvalue "
        << report.min_eigenvalue << ")";
    throw InternalConsistencyError(msg.str());
  }
  return state;
}

SqueezeRun run_lumped(const JointSpectrum& joint) {
  return {joint, Lumped{}, apply_sfwm_lumped(vacuum(joint.grid()), joint)};
}

SqueezeRun run_distributed(const FopaParams& params, const FrequencyGrid& grid) {
  FopaParams lossless = params;
  lossless.loss_per_length = 0.0;
  lossless.raman_n = 0.0;
  return {fopa_joint_spectrum(lossless, grid), Distributed{params},
          apply_sfwm_distributed(vacuum(grid), params, grid)};
}

SqueezingDb squeezing_db(const GaussianState& state, const TimeFreqMode& mode) {
  const auto e = quadrature_extrema(state, mode.values());
  return {-to_db(e.min_variance / kVacuumVariance), to_db(e.max_variance / kVacuumVariance)};
}

SqueezingDb distributed_squeezing(const FopaParams& params, const FrequencyGrid& grid) {
  FopaParams lossless = params;
  lossless.loss_per_length = 0.0;
  const auto joint = fopa_joint_spectrum(lossless, grid);
  const auto mode = sc_extend(TimeFreqMode::delta(grid, 1), &joint);
  return squeezing_db(apply_sfwm_distributed(vacuum(grid), params, grid), mode);
}

RamanCalibration calibrate_raman(const RamanTargets& targets,
                                 const RamanCalibrationOptions& options) {
  if (!(targets.loss_total >= 0.0 && targets.loss_total < 1.0)) {
    throw std::invalid_argument("calibrate_raman: loss_total must lie in [0, 1)");
  }
  if (!(targets.antisqueeze_db > 0.0) || !(targets.squeeze_db > 0.0)) {
    throw std::invalid_argument("calibrate_raman: targets must be positive dB figures");
  }
  const FrequencyGrid grid(0.0, 1.0, options.half_bins);
  FopaParams params;
  params.phase_matching = PhaseMatching::Broadband;
  params.gamma_nl = options.gamma_nl;
  params.length = options.length;
  params.segments = options.segments;
  params.loss_per_length = -std::log1p(-targets.loss_total) / options.length;

  auto forward = [&](double raman_n, double power) {
    params.raman_n = raman_n;
    params.pump_peak_power = power;
    return squeezing_unchecked(params, grid);
  };

  // Inner: pump power giving the antisqueezing target at this raman_n.
  const double power_hi = 12.0 / (options.gamma_nl * options.length);
  auto tune_pump = [&](double raman_n) {
    auto miss = [&](double power) { return forward(raman_n, power).antisqueeze_db - targets.antisqueeze_db; };
    const double f_hi = miss(power_hi);
    if (f_hi < 0.0) {
      std::ostringstream msg;
      msg << "calibrate_raman: antisqueezing target " << targets.antisqueeze_db
          << " dB not reached at pump " << power_hi << " W";
      throw CalibrationError(msg.str());
    }
    const double power = solve_bracketed(miss, 0.0, power_hi, -targets.antisqueeze_db, f_hi, 1e-10);
    return std::pair{power, forward(raman_n, power)};
  };

  auto excess = [&](double raman_n) {
    auto [power, sq] = tune_pump(raman_n);
    return std::tuple{sq.squeeze_db - targets.squeeze_db, power, sq};
  };

  auto [g0, p0, s0] = excess(0.0);
  auto finish = [&](double raman_n, double power, SqueezingDb achieved) {
    params.raman_n = raman_n;
    params.pump_peak_power = power;
    (void)apply_sfwm_distributed(vacuum(grid), params, grid);
    return RamanCalibration{raman_n, params, achieved};
  };
  if (std::abs(g0) <= options.tolerance_db) return finish(0.0, p0, s0);
  if (g0 < 0.0) {
    std::ostringstream msg;
    msg << "calibrate_raman: squeezing target " << targets.squeeze_db
        << " dB unreachable; raman_n = 0 already gives " << s0.squeeze_db << " dB";
    throw CalibrationError(msg.str());
  }

  double lo = 0.0;
  double hi = 1.0;
  constexpr double kMaxRaman = 1e6;
  for (;;) {
    auto [g, p, s] = excess(hi);
    if (std::abs(g) <= options.tolerance_db) return finish(hi, p, s);
    if (g < 0.0) break;
    lo = hi;
    hi *= 2.0;
    if (hi > kMaxRaman) {
      std::ostringstream msg;
      msg << "calibrate_raman: no root in raman_n bracket [0, " << kMaxRaman
          << "]; squeezing excess at upper end " << g << " dB";
      throw CalibrationError(msg.str());
    }
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    auto [g, p, s] = excess(mid);
    if (std::abs(g) <= options.tolerance_db || hi - lo <= 1e-15 * hi) return finish(mid, p, s);
    if (g > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw CalibrationError("calibrate_raman: bisection did not converge");
}

}  // namespace scmode
