#include "scmode/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include <fmt/format.h>

#include "scmode/detect.hpp"
#include "scmode/errors.hpp"
#include "scmode/gaussian.hpp"
#include "scmode/lo.hpp"
#include "scmode/sfwm.hpp"

namespace scmode::cli {

namespace {

constexpr const char* kDb = "[dB re true shot noise]";

std::string num(double v) { return fmt::format("{:.10g}", v); }

double level_db(double variance) { return to_db(variance / kVacuumVariance); }

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : width_(header.size()) { line(header); }
  void row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw std::logic_error("csv: row width differs from header");
    line(cells);
  }
  std::string str() && { return std::move(text_); }

 private:
  void line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += cells[i];
    }
    text_ += '\n';
  }
  std::size_t width_;
  std::string text_;
};

class Summary {
 public:
  Summary(std::string_view name, const Scenario& s) {
    add("scenario", name);
    add("directive", directive_name(s.run.directive));
    add("seed", std::to_string(s.run.seed));
    if (!s.run.description.empty()) add("description", s.run.description);
  }
  void add(std::string_view key, std::string_view value) { text_ += fmt::format("{}: {}\n", key, value); }
  void add(std::string_view key, double value, std::string_view unit = "") {
    text_ += fmt::format("{}: {}{}{}\n", key, num(value), unit.empty() ? "" : " ", unit);
  }
  std::string str() && { return std::move(text_); }

 private:
  std::string text_;
};

struct Prepared {
  FrequencyGrid grid;
  /// Lossless reference spectrum; defines the self-conjugated phase.
  JointSpectrum joint;
  GaussianState state;
};

Prepared prepare(const Scenario& s) {
  const auto grid = make_grid(*s.grid);
  switch (s.model->kind) {
    case ModelKind::Flat: {
      auto joint = JointSpectrum::flat(grid, s.model->flat_xi, s.model->flat_phase);
      auto state = apply_sfwm_lumped(vacuum(grid), joint);
      return {grid, std::move(joint), std::move(state)};
    }
    case ModelKind::Lumped: {
      auto params = make_params(*s.fiber);
      params.loss_per_length = 0.0;
      params.raman_n = 0.0;
      auto joint = fopa_joint_spectrum(params, grid);
      auto state = apply_sfwm_lumped(vacuum(grid), joint);
      return {grid, std::move(joint), std::move(state)};
    }
    case ModelKind::Distributed: {
      auto run = run_distributed(make_params(*s.fiber), grid);
      return {grid, std::move(run.joint), std::move(run.output)};
    }
  }
  throw std::logic_error("unknown model kind");
}

double lo_rin(const Scenario& s) { return s.lo ? lo_excess_rin(s.lo->apparent_shot_db) : 0.0; }
double lo_gain(const Scenario& s) { return s.lo ? s.lo->gain : 2.0; }

LoRealization make_lo(const TimeFreqMode& seed, const Scenario& s, const JointSpectrum& joint) {
  const double g = lo_gain(s);
  auto lo = balance(fwm_output(seed, g, &joint), g);
  lo.seed_kind = s.seed ? s.seed->kind : SeedKind::Coherent;
  lo.excess_rin = lo_rin(s);
  return lo;
}

std::vector<TimeFreqMode> seeds_for(const Scenario& s, const FrequencyGrid& grid) {
  if (!s.seed) return {TimeFreqMode::delta(grid, 1)};
  return synth_seed(make_seed_model(*s.seed, s.run.seed), grid, s.seed->samples);
}

Artifacts run_single(const Scenario& s, std::string_view name) {
  const auto p = prepare(s);
  const auto chain = make_chain(*s.chain);
  const auto seeds = seeds_for(s, p.grid);
  const bool closed_form = s.model->kind != ModelKind::Distributed;

  Csv csv({"realization [1]", fmt::format("internal_squeezing {}", kDb),
           fmt::format("internal_antisqueezing {}", kDb), fmt::format("closed_form_squeezing {}", kDb),
           fmt::format("measured_squeezing {}", kDb), fmt::format("measured_antisqueezing {}", kDb),
           fmt::format("apparent_shot {}", kDb), "lo_angle [rad]"});
  double lo_sq = INFINITY, hi_sq = -INFINITY, sum_sq = 0.0, lo_int = INFINITY, hi_int = -INFINITY;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto lo = make_lo(seeds[i], s, p.joint);
    const auto mode = lo_mode(lo);
    const auto internal = quadrature_extrema(p.state, mode.values());
    const auto scan = bhd_scan(p.state, lo, chain);
    const double measured = scan.level.squeezed_db();
    std::string closed;
    if (closed_form) closed = num(level_db(sc_variance_closed_form(mode, p.joint)));
    csv.row({std::to_string(i), num(level_db(internal.min_variance)), num(level_db(internal.max_variance)),
             closed, num(measured), num(scan.level.antisqueezed_db()),
             num(to_db(scan.level.apparent_shot_rel_true_shot)), num(scan.min_angle)});
    lo_sq = std::min(lo_sq, measured);
    hi_sq = std::max(hi_sq, measured);
    sum_sq += measured;
    lo_int = std::min(lo_int, level_db(internal.min_variance));
    hi_int = std::max(hi_int, level_db(internal.min_variance));
  }
  Summary sum(name, s);
  sum.add("realizations", std::to_string(seeds.size()));
  sum.add("chain_efficiency", chain_efficiency(chain));
  sum.add("mean_measured_squeezing", sum_sq / static_cast<double>(seeds.size()), kDb);
  sum.add("best_measured_squeezing", lo_sq, kDb);
  sum.add("worst_measured_squeezing", hi_sq, kDb);
  sum.add("internal_squeezing_spread_across_realizations", hi_int - lo_int, "dB");
  return {std::move(csv).str(), std::move(sum).str()};
}

Artifacts run_pump_sweep(const Scenario& s, std::string_view name) {
  const auto grid = make_grid(*s.grid);
  auto fiber = *s.fiber;
  fiber.pump_power_w = 0.0;
  fiber.peak_detuning_ghz.reset();
  const auto params = make_params(fiber);
  const auto chain = make_chain(*s.chain);
  const auto seed = seeds_for(s, grid).front();
  const auto rows = sweep_pump(s.sweep->pump_powers_w, params, grid, chain, seed, lo_rin(s));

  Csv csv({"pump_power [W]", fmt::format("internal_squeezing {}", kDb),
           fmt::format("internal_antisqueezing {}", kDb), fmt::format("measured_squeezing {}", kDb),
           fmt::format("measured_antisqueezing {}", kDb)});
  std::size_t best = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    csv.row({num(r.pump_power), num(-r.internal_squeeze_db), num(r.internal_antisqueeze_db),
             num(r.measured_squeeze_db), num(r.measured_antisqueeze_db)});
    if (r.measured_squeeze_db < rows[best].measured_squeeze_db) best = i;
  }
  Summary sum(name, s);
  sum.add("points", std::to_string(rows.size()));
  sum.add("raman_n", params.raman_n);
  sum.add("fiber_loss_fraction", fiber.loss_fraction);
  sum.add("chain_efficiency", chain_efficiency(chain));
  sum.add("best_measured_squeezing", rows[best].measured_squeeze_db, kDb);
  sum.add("best_pump_power", rows[best].pump_power, "W");
  sum.add("antisqueezing_at_best", rows[best].measured_antisqueeze_db, kDb);
  sum.add("internal_squeezing_at_best", -rows[best].internal_squeeze_db, kDb);
  sum.add("interior_maximum", best > 0 && best + 1 < rows.size() ? "yes" : "no");
  return {std::move(csv).str(), std::move(sum).str()};
}

Artifacts run_modulation_sweep(const Scenario& s, std::string_view name) {
  const auto p = prepare(s);
  const auto chain = make_chain(*s.chain);
  Csv csv({"sine_freq [GHz]", fmt::format("mean_measured_squeezing {}", kDb), "std_measured_squeezing [dB]",
           fmt::format("mean_internal_squeezing {}", kDb), fmt::format("apparent_shot {}", kDb)});
  Summary sum(name, s);
  double lo = INFINITY, hi = -INFINITY;
  for (double f : s.sweep->sine_freqs_ghz) {
    auto seed = *s.seed;
    seed.sine_pm_ghz = f;
    const auto seeds = synth_seed(make_seed_model(seed, s.run.seed), p.grid, seed.samples);
    double m = 0.0, m2 = 0.0, internal = 0.0, shot = 0.0;
    for (const auto& f0 : seeds) {
      const auto lo_r = make_lo(f0, s, p.joint);
      const auto scan = bhd_scan(p.state, lo_r, chain);
      const double v = scan.level.squeezed_db();
      m += v;
      m2 += v * v;
      internal += level_db(quadrature_extrema(p.state, lo_mode(lo_r).values()).min_variance);
      shot = to_db(scan.level.apparent_shot_rel_true_shot);
    }
    const auto n = static_cast<double>(seeds.size());
    m /= n;
    const double sd = n > 1 ? std::sqrt(std::max(0.0, (m2 - n * m * m) / (n - 1))) : 0.0;
    csv.row({num(f), num(m), num(sd), num(internal / n), num(shot)});
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  sum.add("points", std::to_string(s.sweep->sine_freqs_ghz.size()));
  sum.add("realizations_per_point", std::to_string(s.seed->samples));
  sum.add("best_mean_measured_squeezing", lo, kDb);
  sum.add("worst_mean_measured_squeezing", hi, kDb);
  sum.add("variation_across_frequencies", hi - lo, "dB");
  return {std::move(csv).str(), std::move(sum).str()};
}

struct HeraldModes {
  TimeFreqMode sc;
  TimeFreqMode signal;
  TimeFreqMode idler;
};

HeraldModes herald_modes(const TimeFreqMode& seed, const JointSpectrum& joint) {
  auto sc = sc_extend(seed, &joint);
  auto signal = *signal_part(sc);
  auto idler = *idler_part(sc);
  return {std::move(sc), std::move(signal), std::move(idler)};
}

Artifacts run_herald(const Scenario& s, std::string_view name) {
  const auto p = prepare(s);
  const auto seed = seeds_for(s, p.grid).front();
  const auto modes = herald_modes(seed, p.joint);
  HeraldOptions opt;
  opt.herald_efficiency = s.herald->efficiency;
  opt.samples = s.herald->samples;
  opt.seed = s.run.seed;
  const auto h = herald_pipeline(p.state, modes.idler, modes.signal, s.herald->gammas, opt);

  Csv csv({"gamma [vacuum units]", "signal_mean [vacuum units]", "signal_variance [vacuum units]",
           fmt::format("heralded_level {}", kDb)});
  for (const auto& pt : h.points) {
    csv.row({num(pt.gamma), num(pt.signal_mean), num(pt.signal_variance), num(level_db(pt.signal_variance))});
  }

  // Weighted squeezing parameter seen by the mode; exact for a flat spectrum.
  double r = 0.0;
  for (std::size_t i = 0; i < p.grid.size(); ++i) r += std::norm(modes.sc[i]) * p.joint.magnitude_at(i);
  const auto direct = quadrature_extrema(p.state, modes.sc.values());
  const auto closed = heralded_params(r);

  Summary sum(name, s);
  sum.add("r", r);
  sum.add("slope", h.slope);
  sum.add("slope_regression_closed_form", closed.slope);
  sum.add("slope_minus_tanh_r", -std::tanh(r));
  sum.add("intercept", h.intercept);
  sum.add("heralded_variance", h.variance, "[vacuum units]");
  sum.add("heralded_variance_closed_form", closed.variance, "[vacuum units]");
  sum.add("variance_spread_over_gamma", h.variance_spread);
  sum.add("direct_sc_squeezing", level_db(direct.min_variance), kDb);
  sum.add("heralded_squeezing", level_db(h.variance), kDb);
  sum.add("herald_gap", level_db(h.variance) - level_db(direct.min_variance), "dB");
  sum.add("mc_mean_photons", h.mc_photons);
  sum.add("mc_mean_photons_stderr", h.mc_photons_stderr);
  sum.add("marginal_mean_photons", h.marginal_photons);
  sum.add("thermal_check_sigma",
          h.mc_photons_stderr > 0.0 ? (h.mc_photons - h.marginal_photons) / h.mc_photons_stderr : 0.0);
  return {std::move(csv).str(), std::move(sum).str()};
}

Artifacts run_calibrate_raman(const Scenario& s, std::string_view name) {
  const auto& c = *s.calibration;
  RamanTargets targets{c.target_squeeze_db, c.target_antisqueeze_db, c.loss_fraction};
  RamanCalibrationOptions opt;
  opt.half_bins = c.half_bins;
  if (s.fiber) {
    opt.length = s.fiber->length_m;
    opt.gamma_nl = s.fiber->gamma;
    opt.segments = s.fiber->segments;
  }
  const auto cal = calibrate_raman(targets, opt);
  const FrequencyGrid grid(0.0, 1.0, opt.half_bins);

  Csv csv({"raman_n [photons]", "pump_power [W]", fmt::format("squeezing {}", kDb),
           fmt::format("antisqueezing {}", kDb)});
  for (double scale : {0.0, 1.0, 2.0}) {
    auto params = cal.params;
    params.raman_n = scale * cal.raman_n;
    const auto sq = distributed_squeezing(params, grid);
    csv.row({num(params.raman_n), num(params.pump_peak_power), num(-sq.squeeze_db), num(sq.antisqueeze_db)});
  }
  auto doubled = cal.params;
  doubled.segments *= 2;
  const auto fine = distributed_squeezing(doubled, grid);

  Summary sum(name, s);
  sum.add("raman_n", cal.raman_n, "photons");
  sum.add("pump_power", cal.params.pump_peak_power, "W");
  sum.add("gain_length", cal.params.gamma_nl * cal.params.pump_peak_power * cal.params.length);
  sum.add("achieved_squeezing", -cal.achieved.squeeze_db, kDb);
  sum.add("achieved_antisqueezing", cal.achieved.antisqueeze_db, kDb);
  sum.add("segments", std::to_string(cal.params.segments));
  sum.add("squeezing_change_on_segment_doubling", std::abs(fine.squeeze_db - cal.achieved.squeeze_db), "dB");
  sum.add("antisqueezing_change_on_segment_doubling",
          std::abs(fine.antisqueeze_db - cal.achieved.antisqueeze_db), "dB");
  return {std::move(csv).str(), std::move(sum).str()};
}

Artifacts run_calibrate_detuning(const Scenario& s, std::string_view name) {
  const auto grid = make_grid(*s.grid);
  auto fiber = *s.fiber;
  fiber.pump_power_w = 0.0;
  fiber.peak_detuning_ghz.reset();
  auto params = make_params(fiber);
  params.loss_per_length = 0.0;
  params.raman_n = 0.0;
  const double target = ghz_to_rad_s(s.calibration->target_detuning_ghz);
  params.pump_peak_power = calibrate_peak_detuning(target, params);
  const double closed = -linear_phase_mismatch(params, target) / (2.0 * params.gamma_nl);
  const auto joint = fopa_joint_spectrum(params, grid);

  Csv csv({"detuning [GHz]", "xi_magnitude [1]", "xi_phase [rad]", "pia_gain [1]"});
  Eigen::Index peak = 0;
  for (Eigen::Index k = 0; k < joint.magnitude().size(); ++k) {
    const double det = static_cast<double>(k + 1) * s.grid->spacing_ghz;
    csv.row({num(det), num(joint.magnitude()[k]), num(joint.phase()[k]), num(pia_gain_from_xi(joint.magnitude()[k]))});
    if (joint.magnitude()[k] > joint.magnitude()[peak]) peak = k;
  }
  const double peak_ghz = static_cast<double>(peak + 1) * s.grid->spacing_ghz;

  Summary sum(name, s);
  sum.add("target_detuning", s.calibration->target_detuning_ghz, "GHz");
  sum.add("pump_power", params.pump_peak_power, "W");
  if (params.beta4 == 0.0) {
    sum.add("pump_power_closed_form", closed, "W");
    sum.add("relative_difference", std::abs(params.pump_peak_power - closed) / closed);
  }
  sum.add("peak_bin_detuning", peak_ghz, "GHz");
  sum.add("peak_offset_in_bins", std::abs(peak_ghz - s.calibration->target_detuning_ghz) / s.grid->spacing_ghz);
  sum.add("peak_xi_magnitude", joint.magnitude()[peak]);
  return {std::move(csv).str(), std::move(sum).str()};
}

Artifacts run_phase_match_spectrum(const Scenario& s, std::string_view name) {
  const auto p = prepare(s);
  const double spacing_ghz = s.grid->spacing_ghz;
  Csv csv({"detuning [GHz]", "xi_magnitude [1]", "xi_phase [rad]", "pia_gain [1]",
           fmt::format("sc_squeezing {}", kDb), fmt::format("heralded_squeezing {}", kDb)});
  const std::vector<double> no_gamma{0.0};
  HeraldOptions opt;
  opt.samples = 0;
  const auto n = static_cast<int>(p.grid.half_bins());
  Eigen::Index peak = 0;
  for (int k = 1; k <= n; ++k) {
    const auto modes = herald_modes(TimeFreqMode::delta(p.grid, k), p.joint);
    const double sc = level_db(quadrature_extrema(p.state, modes.sc.values()).min_variance);
    const double her = level_db(herald_pipeline(p.state, modes.idler, modes.signal, no_gamma, opt).variance);
    const double xi = p.joint.magnitude()[k - 1];
    csv.row({num(k * spacing_ghz), num(xi), num(p.joint.phase()[k - 1]), num(pia_gain_from_xi(xi)), num(sc),
             num(her)});
    if (xi > p.joint.magnitude()[peak]) peak = k - 1;
  }
  Summary sum(name, s);
  sum.add("peak_detuning", static_cast<double>(peak + 1) * spacing_ghz, "GHz");
  sum.add("peak_xi_magnitude", p.joint.magnitude()[peak]);
  sum.add("peak_pia_gain", pia_gain_from_xi(p.joint.magnitude()[peak]));
  if (s.seed) {
    const auto seed = seeds_for(s, p.grid).front();
    const auto modes = herald_modes(seed, p.joint);
    const double sc = level_db(quadrature_extrema(p.state, modes.sc.values()).min_variance);
    const double her = level_db(herald_pipeline(p.state, modes.idler, modes.signal, no_gamma, opt).variance);
    sum.add("seed_mode_sc_squeezing", sc, kDb);
    sum.add("seed_mode_sc_squeezing_closed_form", level_db(sc_variance_closed_form(modes.sc, p.joint)), kDb);
    sum.add("seed_mode_heralded_squeezing", her, kDb);
  }
  return {std::move(csv).str(), std::move(sum).str()};
}

Artifacts run_noise_budget(const Scenario& s, std::string_view name) {
  const auto& b = *s.budget;
  DetectionChain baseline;
  baseline.efficiencies = b.baseline_efficiencies;
  baseline.dark_rel = b.baseline_dark_db ? from_db(*b.baseline_dark_db) : 0.0;
  baseline.rin_excess = lo_excess_rin(b.baseline_apparent_shot_db);
  const auto chain = make_chain(*s.chain);
  const double extra = lo_rin(s);

  const double level0 = from_db(b.baseline_level_db);
  const double added_rin = chain.rin_excess + extra - baseline.rin_excess;
  const double additive = rebudget_level(level0, added_rin, baseline.dark_rel, chain.dark_rel);
  const double v_internal = infer_internal_variance(level0, baseline);
  const double through = chain_level(v_internal, chain, extra);

  Csv csv({"quantity", "linear [re true shot noise]", fmt::format("level {}", kDb)});
  auto row = [&](std::string_view q, double lin) { csv.row({std::string(q), num(lin), num(to_db(lin))}); };
  row("baseline_level", level0);
  row("baseline_dark", baseline.dark_rel);
  row("dark", chain.dark_rel);
  row("added_rin", added_rin);
  row("predicted_level_additive", additive);
  row("inferred_internal_variance", v_internal / kVacuumVariance);
  row("predicted_level_through_chain", through);

  Summary sum(name, s);
  sum.add("baseline_chain_efficiency", chain_efficiency(baseline));
  sum.add("chain_efficiency", chain_efficiency(chain));
  sum.add("excess_rin", chain.rin_excess + extra);
  sum.add("predicted_level_additive", to_db(additive), kDb);
  sum.add("predicted_level_through_chain", to_db(through), kDb);
  sum.add("inferred_internal_squeezing", level_db(v_internal), kDb);
  if (b.internal_estimate_db) {
    const double v_est = kVacuumVariance * from_db(-*b.internal_estimate_db);
    const double forward = chain_level(v_est, baseline);
    row("internal_estimate", v_est / kVacuumVariance);
    row("internal_estimate_forward_level", forward);
    sum.add("internal_estimate_forward_level", to_db(forward), kDb);
  }
  return {std::move(csv).str(), std::move(sum).str()};
}

}  // namespace

Scenario apply_overrides(Scenario s, const Overrides& o) {
  if (o.seed) s.run.seed = *o.seed;
  if (o.segments) {
    if (!s.fiber && s.run.directive == Directive::CalibrateRaman) s.fiber.emplace();
    if (s.fiber) s.fiber->segments = *o.segments;
  }
  if (auto errors = validate(s); !errors.empty()) throw ScenarioError(std::move(errors));
  return s;
}

Artifacts compute(const Scenario& s, std::string_view name) {
  if (auto errors = validate(s); !errors.empty()) throw ScenarioError(std::move(errors));
  switch (s.run.directive) {
    case Directive::Single: return run_single(s, name);
    case Directive::PumpSweep: return run_pump_sweep(s, name);
    case Directive::ModulationFrequencySweep: return run_modulation_sweep(s, name);
    case Directive::Herald: return run_herald(s, name);
    case Directive::CalibrateRaman: return run_calibrate_raman(s, name);
    case Directive::CalibrateDetuning: return run_calibrate_detuning(s, name);
    case Directive::PhaseMatchSpectrum: return run_phase_match_spectrum(s, name);
    case Directive::NoiseBudget: return run_noise_budget(s, name);
  }
  throw std::logic_error("unknown directive");
}

Written run_to_disk(const Scenario& s, std::string_view name, const std::filesystem::path& out_dir) {
  auto artifacts = compute(s, name);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path csv_path =
      out_dir / (s.run.output.empty() ? std::string(name) + ".csv" : s.run.output);
  if (csv_path.has_parent_path()) std::filesystem::create_directories(csv_path.parent_path());
  auto summary_path = csv_path;
  summary_path.replace_extension(".summary.txt");
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  };
  write(csv_path, artifacts.csv);
  write(summary_path, artifacts.summary);
  return {csv_path, summary_path, std::move(artifacts)};
}

std::vector<std::filesystem::path> list_scenarios(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  if (!std::filesystem::is_directory(dir)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".scenario") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace scmode::cli
