#include "scmode/detect.hpp"

#include <cmath>
#include <future>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "scmode/sfwm.hpp"

namespace scmode {

namespace {

GaussianState through_chain(GaussianState state, const DetectionChain& chain) {
  for (double t : chain.efficiencies) {
    if (t == 1.0) continue;
    for (std::size_t b = 0; b < state.modes(); ++b) state.apply_loss(b, t, 0.0);
  }
  return state;
}

double level_from_variance(double v, const DetectionChain& chain, double extra_rin) {
  return v / kVacuumVariance + chain.dark_rel + chain.rin_excess + extra_rin;
}

MeasuredLevel make_level(double sq, double anti, const DetectionChain& chain, double extra_rin) {
  return {sq, anti, 1.0 + chain.rin_excess + extra_rin, chain.dark_rel};
}

}  // namespace

void DetectionChain::validate() const {
  for (std::size_t i = 0; i < efficiencies.size(); ++i) {
    const double t = efficiencies[i];
    if (!(t > 0.0 && t <= 1.0)) {
      std::ostringstream msg;
      msg << "detection chain: efficiency[" << i << "] = " << t << " is outside (0, 1]";
      throw std::invalid_argument(msg.str());
    }
  }
  if (!(dark_rel >= 0.0)) throw std::invalid_argument("detection chain: dark_rel must be >= 0");
  if (!(rin_excess >= 0.0)) throw std::invalid_argument("detection chain: rin_excess must be >= 0");
}

double chain_efficiency(const DetectionChain& chain) {
  chain.validate();
  double eta = 1.0;
  for (double t : chain.efficiencies) eta *= t;
  return eta;
}

double to_db(double linear) { return 10.0 * std::log10(linear); }
double from_db(double db) { return std::pow(10.0, db / 10.0); }

double MeasuredLevel::squeezed_db() const { return to_db(squeezed_rel_true_shot); }
double MeasuredLevel::antisqueezed_db() const { return to_db(antisqueezed_rel_true_shot); }
double MeasuredLevel::squeezed_db_re_apparent() const {
  return to_db(squeezed_rel_true_shot / apparent_shot_rel_true_shot);
}

double chain_level(double v_internal, const DetectionChain& chain, double extra_rin) {
  const double eta = chain_efficiency(chain);
  const double v = eta * v_internal + (1.0 - eta) * kVacuumVariance;
  return level_from_variance(v, chain, extra_rin);
}

MeasuredLevel measured_level(double v_squeezed, double v_antisqueezed,
                             const DetectionChain& chain) {
  if (!(v_squeezed > 0.0) || !(v_antisqueezed > 0.0)) {
    throw std::invalid_argument("measured_level: variances must be positive");
  }
  return make_level(chain_level(v_squeezed, chain), chain_level(v_antisqueezed, chain), chain, 0.0);
}

MeasuredLevel measured_level(double v_internal, const DetectionChain& chain) {
  if (!(v_internal > 0.0)) throw std::invalid_argument("measured_level: variance must be positive");
  return measured_level(v_internal, 0.25 / v_internal, chain);
}

double infer_internal_variance(double level, const DetectionChain& chain, double extra_rin) {
  const double eta = chain_efficiency(chain);
  const double optical = (level - chain.dark_rel - chain.rin_excess - extra_rin) * kVacuumVariance;
  const double v = (optical - (1.0 - eta) * kVacuumVariance) / eta;
  if (!(v > 0.0)) {
    std::ostringstream msg;
    msg << "infer_internal_variance: level " << level
        << " is below the chain's floor for any internal state";
    throw std::domain_error(msg.str());
  }
  return v;
}

double rebudget_level(double level, double added_rin, double dark_before, double dark_after) {
  return level + added_rin + (dark_after - dark_before);
}

MeasuredLevel bhd_measure(const GaussianState& state, const LoRealization& lo, double theta,
                          const DetectionChain& chain) {
  chain.validate();
  const auto mode = lo_mode(lo);
  if (mode.grid().size() != state.modes()) {
    throw std::invalid_argument("bhd_measure: LO and state grids differ");
  }
  const auto detected = through_chain(state, chain);
  const double sq = quadrature_stats(detected, mode.values(), theta).variance;
  const double anti =
      quadrature_stats(detected, mode.values(), theta + 0.5 * std::numbers::pi).variance;
  return make_level(level_from_variance(sq, chain, lo.excess_rin),
                    level_from_variance(anti, chain, lo.excess_rin), chain, lo.excess_rin);
}

BhdScan bhd_scan(const GaussianState& state, const LoRealization& lo,
                 const DetectionChain& chain) {
  chain.validate();
  const auto mode = lo_mode(lo);
  if (mode.grid().size() != state.modes()) {
    throw std::invalid_argument("bhd_scan: LO and state grids differ");
  }
  const auto e = quadrature_extrema(through_chain(state, chain), mode.values());
  return {make_level(level_from_variance(e.min_variance, chain, lo.excess_rin),
                     level_from_variance(e.max_variance, chain, lo.excess_rin), chain,
                     lo.excess_rin),
          e.min_angle};
}

HeraldResult herald_pipeline(const GaussianState& state, const TimeFreqMode& idler_mode,
                             const TimeFreqMode& signal_mode, std::span<const double> gammas,
                             const HeraldOptions& options) {
  const auto& grid = idler_mode.grid();
  if (!(signal_mode.grid() == grid) || grid.size() != state.modes()) {
    throw std::invalid_argument("herald_pipeline: modes and state must share one grid");
  }
  const double overlap = std::abs(idler_mode.values().dot(signal_mode.values()));
  if (overlap > 1e-12) {
    std::ostringstream msg;
    msg << "herald_pipeline: idler and signal modes overlap (|<i|s>| = " << overlap << ")";
    throw std::invalid_argument(msg.str());
  }
  const double eta = options.herald_efficiency;
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("herald_pipeline: herald_efficiency must lie in (0, 1]");
  }

  GaussianState s = state;
  if (eta < 1.0) {
    for (std::size_t k = 1; k <= grid.half_bins(); ++k) s.apply_loss(grid.idler_index(k), eta, 0.0);
  }
  const HomodyneConditioner hc(s, idler_mode.values(), options.idler_theta);
  const Eigen::VectorXcd g = hc.project(signal_mode.values());
  const Eigen::VectorXd dir_x = quadrature_direction(g, options.signal_theta);
  const Eigen::VectorXd dir_p =
      quadrature_direction(g, options.signal_theta + 0.5 * std::numbers::pi);

  HeraldResult out{};
  out.variance = dir_x.dot(hc.conditional_cov() * dir_x);
  out.points.reserve(gammas.size());
  for (double gamma : gammas) {
    const auto stats = quadrature_stats(hc.condition(gamma), g, options.signal_theta);
    out.points.push_back({gamma, stats.mean, stats.variance});
    out.variance_spread = std::max(out.variance_spread, std::abs(stats.variance - out.variance));
  }

  // Least squares, falling back to the analytic gain with fewer than two
  // distinct outcomes.
  const double gain_x = dir_x.dot(hc.gain());
  const auto base = hc.condition(0.0);
  const double base_x = dir_x.dot(base.mean());
  out.slope = gain_x;
  out.intercept = base_x;
  if (out.points.size() >= 2) {
    double mg = 0.0, mm = 0.0;
    for (const auto& p : out.points) {
      mg += p.gamma;
      mm += p.signal_mean;
    }
    mg /= static_cast<double>(out.points.size());
    mm /= static_cast<double>(out.points.size());
    double sgg = 0.0, sgm = 0.0;
    for (const auto& p : out.points) {
      sgg += (p.gamma - mg) * (p.gamma - mg);
      sgm += (p.gamma - mg) * (p.signal_mean - mm);
    }
    if (sgg > 0.0) {
      out.slope = sgm / sgg;
      out.intercept = mm - out.slope * mg;
    }
  }

  // Photon number of the signal mode, averaged over herald outcomes.
  const double var_p = dir_p.dot(hc.conditional_cov() * dir_p);
  const double gain_p = dir_p.dot(hc.gain());
  const double base_p = dir_p.dot(base.mean());
  const auto draws = hc.sample_outcomes(options.samples, options.seed);
  double sum = 0.0, sum2 = 0.0;
  for (double gamma : draws) {
    const double mx = base_x + gain_x * gamma;
    const double mp = base_p + gain_p * gamma;
    const double n = 0.5 * (out.variance + var_p + mx * mx + mp * mp - 1.0);
    sum += n;
    sum2 += n * n;
  }
  const auto count = static_cast<double>(draws.size());
  if (count > 0) {
    out.mc_photons = sum / count;
    const double var = count > 1 ? (sum2 - count * out.mc_photons * out.mc_photons) / (count - 1) : 0.0;
    out.mc_photons_stderr = std::sqrt(std::max(var, 0.0) / count);
  }
  out.marginal_photons = mean_photon_number(s, signal_mode.values());
  return out;
}

std::vector<SweepRow> sweep_pump(std::span<const double> powers, const FopaParams& params,
                                 const FrequencyGrid& grid, const DetectionChain& chain,
                                 const TimeFreqMode& lo_seed, double lo_excess_rin) {
  if (powers.empty()) throw std::invalid_argument("sweep_pump: no pump powers given");
  chain.validate();
  auto point = [&](double power) {
    FopaParams p = params;
    p.pump_peak_power = power;
    const auto run = run_distributed(p, grid);
    const auto mode = sc_extend(lo_seed, &run.joint);
    const auto internal = squeezing_db(run.output, mode);
    const LoRealization lo{mode.amplitude(), SeedKind::Coherent, lo_excess_rin};
    const auto scan = bhd_scan(run.output, lo, chain);
    return SweepRow{power, internal.squeeze_db, internal.antisqueeze_db,
                    scan.level.squeezed_db(), scan.level.antisqueezed_db()};
  };
  std::vector<std::future<SweepRow>> jobs;
  jobs.reserve(powers.size());
  for (double power : powers) jobs.push_back(std::async(std::launch::async, point, power));
  std::vector<SweepRow> rows;
  rows.reserve(powers.size());
  for (auto& job : jobs) rows.push_back(job.get());
  return rows;
}

}  // namespace scmode
