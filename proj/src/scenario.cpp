#include "scmode/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace scmode::cli {

namespace pt = boost::property_tree;

namespace {

template <class E>
using Names = std::vector<std::pair<std::string_view, E>>;

const Names<Directive>& directive_names() {
  static const Names<Directive> names{
      {"single", Directive::Single},
      {"pump-sweep", Directive::PumpSweep},
      {"modulation-frequency-sweep", Directive::ModulationFrequencySweep},
      {"herald", Directive::Herald},
      {"calibrate-raman", Directive::CalibrateRaman},
      {"calibrate-detuning", Directive::CalibrateDetuning},
      {"phase-match-spectrum", Directive::PhaseMatchSpectrum},
      {"noise-budget", Directive::NoiseBudget},
  };
  return names;
}

const Names<ModelKind> kModelNames{
    {"flat", ModelKind::Flat}, {"lumped", ModelKind::Lumped}, {"distributed", ModelKind::Distributed}};
const Names<PhaseMatching> kPhaseMatchingNames{{"dispersive", PhaseMatching::Dispersive},
                                               {"broadband", PhaseMatching::Broadband}};
const Names<SeedKind> kSeedNames{{"coherent", SeedKind::Coherent},
                                 {"noise-modulated", SeedKind::NoiseModulated},
                                 {"filtered-ase", SeedKind::FilteredAse}};
const Names<EnvelopeShape> kEnvelopeNames{{"gaussian", EnvelopeShape::Gaussian},
                                          {"flat-top", EnvelopeShape::FlatTop}};

template <class E>
std::string_view name_of(const Names<E>& names, E value) {
  for (const auto& [n, v] : names) {
    if (v == value) return n;
  }
  return "?";
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::string nearest(std::string_view word, const std::vector<std::string_view>& candidates) {
  std::string_view best;
  std::size_t best_d = std::string_view::npos;
  for (auto c : candidates) {
    const auto d = edit_distance(word, c);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return std::string(best);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

template <class Int>
std::optional<Int> to_integer(std::string_view s) {
  s = trim(s);
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Reads typed keys from one INI section, recording every problem and
// remembering which keys were consumed so the rest can be reported.
class SectionReader {
 public:
  SectionReader(std::string_view section, const pt::ptree& node, std::vector<std::string>& errors)
      : section_(section), node_(node), errors_(errors) {}

  ~SectionReader() {
    for (const auto& [key, child] : node_) {
      if (std::find(known_.begin(), known_.end(), key) != known_.end()) continue;
      errors_.push_back(fmt::format("[{}] unknown key '{}' (nearest valid key: '{}')", section_, key,
                                    nearest(key, known_)));
    }
  }
  SectionReader(const SectionReader&) = delete;
  SectionReader& operator=(const SectionReader&) = delete;

  void real(std::string_view key, double& out) {
    if (auto raw = raw_value(key)) {
      if (auto v = to_double(*raw)) {
        out = *v;
      } else {
        bad(key, *raw, "a finite number");
      }
    }
  }

  void real(std::string_view key, std::optional<double>& out) {
    if (raw_value(key)) {
      double v{};
      real(key, v);
      out = v;
    }
  }

  void count(std::string_view key, std::size_t& out) {
    if (auto raw = raw_value(key)) {
      if (auto v = to_integer<std::size_t>(*raw)) {
        out = *v;
      } else {
        bad(key, *raw, "a non-negative integer");
      }
    }
  }

  void u64(std::string_view key, std::uint64_t& out) {
    if (auto raw = raw_value(key)) {
      if (auto v = to_integer<std::uint64_t>(*raw)) {
        out = *v;
      } else {
        bad(key, *raw, "an unsigned 64-bit integer");
      }
    }
  }

  void list(std::string_view key, std::vector<double>& out) {
    auto raw = raw_value(key);
    if (!raw) return;
    std::vector<double> values;
    std::string_view rest = *raw;
    bool ok = !trim(rest).empty();
    while (ok) {
      const auto comma = rest.find(',');
      if (auto v = to_double(rest.substr(0, comma))) {
        values.push_back(*v);
      } else {
        ok = false;
      }
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (ok) {
      out = std::move(values);
    } else {
      bad(key, *raw, "a comma-separated list of numbers");
    }
  }

  void text(std::string_view key, std::string& out) {
    if (auto raw = raw_value(key)) out = std::string(trim(*raw));
  }

  template <class E>
  void choice(std::string_view key, E& out, const Names<E>& names) {
    auto raw = raw_value(key);
    if (!raw) return;
    const auto v = trim(*raw);
    for (const auto& [n, e] : names) {
      if (n == v) {
        out = e;
        return;
      }
    }
    std::string options;
    for (const auto& [n, e] : names) options += (options.empty() ? "" : "|") + std::string(n);
    errors_.push_back(fmt::format("[{}] {} = '{}' is not one of {}", section_, key, v, options));
  }

 private:
  std::optional<std::string> raw_value(std::string_view key) {
    known_.push_back(key);
    if (auto child = node_.get_child_optional(pt::ptree::path_type(std::string(key), '\0'))) {
      return child->data();
    }
    return std::nullopt;
  }

  void bad(std::string_view key, std::string_view raw, std::string_view expected) {
    errors_.push_back(fmt::format("[{}] {} = '{}' is not {}", section_, key, trim(raw), expected));
  }

  std::string_view section_;
  const pt::ptree& node_;
  std::vector<std::string>& errors_;
  std::vector<std::string_view> known_;
};

template <class Section, class Fill>
std::optional<Section> read_section(const pt::ptree& root, std::string_view name,
                                    std::vector<std::string>& errors, Fill fill) {
  auto node = root.get_child_optional(pt::ptree::path_type(std::string(name), '\0'));
  if (!node) return std::nullopt;
  Section s;
  SectionReader r(name, *node, errors);
  fill(r, s);
  return s;
}

const std::vector<std::string_view> kSections{"run",   "grid",   "fiber",  "model",       "seed",  "lo",
                                              "chain", "sweep", "herald", "calibration", "budget"};

std::string fmt_real(double v) { return fmt::format("{}", v); }

std::string fmt_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += fmt_real(values[i]);
  }
  return out;
}

void check(std::vector<std::string>& errors, bool ok, std::string message) {
  if (!ok) errors.push_back(std::move(message));
}

void check_efficiencies(std::vector<std::string>& errors, std::string_view where,
                        const std::vector<double>& effs) {
  for (std::size_t i = 0; i < effs.size(); ++i) {
    check(errors, effs[i] > 0.0 && effs[i] <= 1.0,
          fmt::format("{}[{}] = {}: each efficiency must lie in (0, 1]", where, i, effs[i]));
  }
}

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> errors)
    : std::runtime_error([&] {
        std::string msg = "invalid scenario:";
        for (const auto& e : errors) msg += "\n  " + e;
        return msg;
      }()),
      errors_(std::move(errors)) {}

std::string_view directive_name(Directive d) { return name_of(directive_names(), d); }

std::optional<Directive> directive_from(std::string_view name) {
  for (const auto& [n, d] : directive_names()) {
    if (n == name) return d;
  }
  return std::nullopt;
}

Scenario parse_scenario(std::string_view text) {
  // The INI reader only knows ';' comments and drops empty sections. Blank
  // out '#' lines (keeping line numbers) and remember every section header.
  std::string cleaned;
  cleaned.reserve(text.size());
  std::vector<std::string> headers;
  for (std::size_t pos = 0; pos < text.size();) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const auto line = text.substr(pos, end - pos);
    const auto first = line.find_first_not_of(" \t\r");
    const auto last = line.find_last_not_of(" \t\r");
    if (first != std::string_view::npos && line[first] == '[' && line[last] == ']' && last > first) {
      headers.emplace_back(line.substr(first + 1, last - first - 1));
    }
    if (first == std::string_view::npos || line[first] != '#') cleaned.append(line);
    cleaned.push_back('\n');
    pos = end + 1;
  }
  pt::ptree root;
  try {
    std::istringstream in{cleaned};
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ScenarioError({fmt::format("line {}: {}", e.line(), e.message())});
  }
  for (const auto& h : headers) {
    if (root.find(h) == root.not_found()) root.push_back({h, pt::ptree()});
  }

  std::vector<std::string> errors;
  for (const auto& [name, node] : root) {
    if (node.empty() && !node.data().empty()) {
      errors.push_back(fmt::format("key '{}' appears outside any section", name));
      continue;
    }
    if (std::find(kSections.begin(), kSections.end(), name) == kSections.end()) {
      errors.push_back(
          fmt::format("unknown section [{}] (nearest valid section: [{}])", name, nearest(name, kSections)));
    }
  }

  Scenario s;
  bool have_directive = false;
  if (auto run = read_section<RunSection>(root, "run", errors, [&](SectionReader& r, RunSection& x) {
        std::string directive;
        r.text("directive", directive);
        if (directive.empty()) {
          errors.push_back("[run] directive is required");
        } else if (auto d = directive_from(directive)) {
          x.directive = *d;
          have_directive = true;
        } else {
          std::vector<std::string_view> names;
          for (const auto& [n, v] : directive_names()) names.push_back(n);
          errors.push_back(fmt::format("[run] directive = '{}' is unknown (nearest: '{}')", directive,
                                       nearest(directive, names)));
        }
        r.u64("seed", x.seed);
        r.text("output", x.output);
        r.text("description", x.description);
      })) {
    s.run = *run;
  } else {
    errors.push_back("missing required section [run]");
  }

  s.grid = read_section<GridSection>(root, "grid", errors, [](SectionReader& r, GridSection& x) {
    r.real("center_thz", x.center_thz);
    r.real("spacing_ghz", x.spacing_ghz);
    r.count("half_bins", x.half_bins);
  });
  s.fiber = read_section<FiberSection>(root, "fiber", errors, [](SectionReader& r, FiberSection& x) {
    r.real("beta2", x.beta2);
    r.real("beta4", x.beta4);
    r.real("gamma", x.gamma);
    r.real("pump_power_w", x.pump_power_w);
    r.real("peak_detuning_ghz", x.peak_detuning_ghz);
    r.real("length_m", x.length_m);
    r.real("loss_fraction", x.loss_fraction);
    r.real("raman_n", x.raman_n);
    r.count("segments", x.segments);
    r.choice("phase_matching", x.phase_matching, kPhaseMatchingNames);
  });
  s.model = read_section<ModelSection>(root, "model", errors, [](SectionReader& r, ModelSection& x) {
    r.choice("kind", x.kind, kModelNames);
    r.real("flat_xi", x.flat_xi);
    r.real("flat_phase", x.flat_phase);
  });
  s.seed = read_section<SeedSection>(root, "seed", errors, [](SectionReader& r, SeedSection& x) {
    r.choice("kind", x.kind, kSeedNames);
    r.real("center_ghz", x.center_ghz);
    r.real("coherence_control_mhz", x.coherence_control_mhz);
    r.real("dither_depth_rad", x.dither_depth_rad);
    r.real("random_pm_bandwidth_mhz", x.random_pm_bandwidth_mhz);
    r.real("random_pm_depth_rad", x.random_pm_depth_rad);
    r.real("sine_pm_ghz", x.sine_pm_ghz);
    r.real("sine_pm_depth_rad", x.sine_pm_depth_rad);
    r.choice("envelope", x.envelope, kEnvelopeNames);
    r.real("ase_bandwidth_ghz", x.ase_bandwidth_ghz);
    r.count("samples", x.samples);
  });
  s.lo = read_section<LoSection>(root, "lo", errors, [](SectionReader& r, LoSection& x) {
    r.real("gain", x.gain);
    r.real("apparent_shot_db", x.apparent_shot_db);
  });
  s.chain = read_section<ChainSection>(root, "chain", errors, [](SectionReader& r, ChainSection& x) {
    r.list("efficiencies", x.efficiencies);
    r.real("dark_db", x.dark_db);
    r.real("residual_rin_db", x.residual_rin_db);
    r.real("cmrr_db", x.cmrr_db);
  });
  s.sweep = read_section<SweepSection>(root, "sweep", errors, [](SectionReader& r, SweepSection& x) {
    r.list("pump_powers_w", x.pump_powers_w);
    r.list("sine_freqs_ghz", x.sine_freqs_ghz);
  });
  s.herald = read_section<HeraldSection>(root, "herald", errors, [](SectionReader& r, HeraldSection& x) {
    r.list("gammas", x.gammas);
    r.count("samples", x.samples);
    r.real("efficiency", x.efficiency);
  });
  s.calibration = read_section<CalibrationSection>(
      root, "calibration", errors, [](SectionReader& r, CalibrationSection& x) {
        r.real("target_detuning_ghz", x.target_detuning_ghz);
        r.real("target_squeeze_db", x.target_squeeze_db);
        r.real("target_antisqueeze_db", x.target_antisqueeze_db);
        r.real("loss_fraction", x.loss_fraction);
        r.count("half_bins", x.half_bins);
      });
  s.budget = read_section<BudgetSection>(root, "budget", errors, [](SectionReader& r, BudgetSection& x) {
    r.real("baseline_level_db", x.baseline_level_db);
    r.list("baseline_efficiencies", x.baseline_efficiencies);
    r.real("baseline_dark_db", x.baseline_dark_db);
    r.real("baseline_apparent_shot_db", x.baseline_apparent_shot_db);
    r.real("internal_estimate_db", x.internal_estimate_db);
  });

  // Range and cross-section checks only make sense once the directive is
  // known; report them alongside any syntax problems.
  if (have_directive) {
    for (auto& e : validate(s)) {
      if (std::find(errors.begin(), errors.end(), e) == errors.end()) errors.push_back(std::move(e));
    }
  }
  if (!errors.empty()) throw ScenarioError(std::move(errors));
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open scenario file '{}'", path));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

std::vector<std::string> validate(const Scenario& s) {
  std::vector<std::string> errors;
  const auto d = s.run.directive;
  const auto name = directive_name(d);
  auto require = [&](bool present, std::string_view section) {
    check(errors, present, fmt::format("directive {} requires section [{}]", name, section));
  };

  const bool needs_grid = d != Directive::CalibrateRaman && d != Directive::NoiseBudget;
  if (needs_grid) require(s.grid.has_value(), "grid");
  switch (d) {
    case Directive::Single:
      require(s.model.has_value(), "model");
      require(s.seed.has_value(), "seed");
      require(s.chain.has_value(), "chain");
      break;
    case Directive::PumpSweep:
      require(s.fiber.has_value(), "fiber");
      require(s.seed.has_value(), "seed");
      require(s.chain.has_value(), "chain");
      require(s.sweep.has_value(), "sweep");
      if (s.sweep) {
        check(errors, !s.sweep->pump_powers_w.empty(), "[sweep] pump_powers_w must not be empty");
      }
      break;
    case Directive::ModulationFrequencySweep:
      require(s.model.has_value(), "model");
      require(s.seed.has_value(), "seed");
      require(s.chain.has_value(), "chain");
      require(s.sweep.has_value(), "sweep");
      if (s.sweep) {
        check(errors, !s.sweep->sine_freqs_ghz.empty(), "[sweep] sine_freqs_ghz must not be empty");
      }
      if (s.seed) {
        check(errors, s.seed->kind == SeedKind::NoiseModulated,
              "modulation-frequency-sweep needs [seed] kind = noise-modulated");
      }
      break;
    case Directive::Herald:
      require(s.model.has_value(), "model");
      require(s.herald.has_value(), "herald");
      break;
    case Directive::CalibrateRaman:
      require(s.calibration.has_value(), "calibration");
      break;
    case Directive::CalibrateDetuning:
      require(s.fiber.has_value(), "fiber");
      require(s.calibration.has_value(), "calibration");
      break;
    case Directive::PhaseMatchSpectrum:
      require(s.model.has_value(), "model");
      break;
    case Directive::NoiseBudget:
      require(s.budget.has_value(), "budget");
      require(s.chain.has_value(), "chain");
      break;
  }

  if (s.grid) {
    check(errors, s.grid->spacing_ghz > 0.0, "[grid] spacing_ghz must be positive");
    check(errors, s.grid->half_bins >= 1, "[grid] half_bins must be at least 1");
  }
  if (s.model) {
    check(errors, s.model->flat_xi >= 0.0, "[model] flat_xi must be non-negative");
    if (s.model->kind != ModelKind::Flat) {
      check(errors, s.fiber.has_value(),
            fmt::format("[model] kind = {} requires section [fiber]", name_of(kModelNames, s.model->kind)));
    }
  }
  if (s.fiber) {
    const auto& f = *s.fiber;
    check(errors, f.length_m > 0.0, "[fiber] length_m must be positive");
    check(errors, f.loss_fraction >= 0.0 && f.loss_fraction < 1.0, "[fiber] loss_fraction must lie in [0, 1)");
    check(errors, f.raman_n >= 0.0, "[fiber] raman_n must be non-negative");
    check(errors, f.segments >= 1, "[fiber] segments must be at least 1");
    check(errors, !(f.pump_power_w && f.peak_detuning_ghz),
          "[fiber] give either pump_power_w or peak_detuning_ghz, not both");
    if (f.pump_power_w) check(errors, *f.pump_power_w >= 0.0, "[fiber] pump_power_w must be non-negative");
    const bool power_from_sweep = d == Directive::PumpSweep || d == Directive::CalibrateDetuning;
    const bool model_uses_fiber = s.model && s.model->kind != ModelKind::Flat;
    if (!power_from_sweep && model_uses_fiber) {
      check(errors, f.pump_power_w || f.peak_detuning_ghz,
            "[fiber] needs pump_power_w or peak_detuning_ghz");
    }
  }
  if (s.seed) {
    const auto& x = *s.seed;
    for (auto [v, key] : {std::pair{x.coherence_control_mhz, "coherence_control_mhz"},
                          {x.dither_depth_rad, "dither_depth_rad"},
                          {x.random_pm_bandwidth_mhz, "random_pm_bandwidth_mhz"},
                          {x.random_pm_depth_rad, "random_pm_depth_rad"},
                          {x.sine_pm_ghz, "sine_pm_ghz"},
                          {x.sine_pm_depth_rad, "sine_pm_depth_rad"},
                          {x.ase_bandwidth_ghz, "ase_bandwidth_ghz"}}) {
      check(errors, v >= 0.0, fmt::format("[seed] {} must be non-negative", key));
    }
    check(errors, x.center_ghz > 0.0, "[seed] center_ghz must be positive (a signal-branch detuning)");
    check(errors, x.samples >= 1, "[seed] samples must be at least 1");
    if (x.kind == SeedKind::FilteredAse) {
      check(errors, x.ase_bandwidth_ghz > 0.0, "[seed] filtered-ase needs ase_bandwidth_ghz > 0");
    }
  }
  if (s.lo) {
    check(errors, s.lo->gain > 1.0, "[lo] gain must exceed 1 for a balanced LO");
    check(errors, s.lo->apparent_shot_db >= 0.0, "[lo] apparent_shot_db must be >= 0");
  }
  if (s.chain) {
    check_efficiencies(errors, "[chain] efficiencies", s.chain->efficiencies);
    check(errors, s.chain->residual_rin_db >= 0.0, "[chain] residual_rin_db must be >= 0");
  }
  if (s.herald) {
    check(errors, !s.herald->gammas.empty(), "[herald] gammas must not be empty");
    check(errors, s.herald->efficiency > 0.0 && s.herald->efficiency <= 1.0,
          "[herald] efficiency must lie in (0, 1]");
  }
  if (s.calibration) {
    const auto& c = *s.calibration;
    check(errors, c.target_squeeze_db > 0.0, "[calibration] target_squeeze_db must be positive");
    check(errors, c.target_antisqueeze_db > 0.0, "[calibration] target_antisqueeze_db must be positive");
    check(errors, c.loss_fraction >= 0.0 && c.loss_fraction < 1.0,
          "[calibration] loss_fraction must lie in [0, 1)");
    check(errors, c.half_bins >= 1, "[calibration] half_bins must be at least 1");
    check(errors, c.target_detuning_ghz >= 0.0, "[calibration] target_detuning_ghz must be >= 0");
  }
  if (s.budget) {
    check_efficiencies(errors, "[budget] baseline_efficiencies", s.budget->baseline_efficiencies);
    check(errors, s.budget->baseline_apparent_shot_db >= 0.0, "[budget] baseline_apparent_shot_db must be >= 0");
  }
  return errors;
}

std::string serialize(const Scenario& s) {
  std::string out;
  auto section = [&](std::string_view name) { out += fmt::format("{}[{}]\n", out.empty() ? "" : "\n", name); };
  auto kv = [&](std::string_view key, const std::string& value) { out += fmt::format("{} = {}\n", key, value); };
  auto opt = [&](std::string_view key, const std::optional<double>& v) {
    if (v) kv(key, fmt_real(*v));
  };

  section("run");
  kv("directive", std::string(directive_name(s.run.directive)));
  kv("seed", std::to_string(s.run.seed));
  if (!s.run.output.empty()) kv("output", s.run.output);
  if (!s.run.description.empty()) kv("description", s.run.description);

  if (s.grid) {
    section("grid");
    kv("center_thz", fmt_real(s.grid->center_thz));
    kv("spacing_ghz", fmt_real(s.grid->spacing_ghz));
    kv("half_bins", std::to_string(s.grid->half_bins));
  }
  if (s.fiber) {
    const auto& f = *s.fiber;
    section("fiber");
    kv("beta2", fmt_real(f.beta2));
    kv("beta4", fmt_real(f.beta4));
    kv("gamma", fmt_real(f.gamma));
    opt("pump_power_w", f.pump_power_w);
    opt("peak_detuning_ghz", f.peak_detuning_ghz);
    kv("length_m", fmt_real(f.length_m));
    kv("loss_fraction", fmt_real(f.loss_fraction));
    kv("raman_n", fmt_real(f.raman_n));
    kv("segments", std::to_string(f.segments));
    kv("phase_matching", std::string(name_of(kPhaseMatchingNames, f.phase_matching)));
  }
  if (s.model) {
    section("model");
    kv("kind", std::string(name_of(kModelNames, s.model->kind)));
    kv("flat_xi", fmt_real(s.model->flat_xi));
    kv("flat_phase", fmt_real(s.model->flat_phase));
  }
  if (s.seed) {
    const auto& x = *s.seed;
    section("seed");
    kv("kind", std::string(name_of(kSeedNames, x.kind)));
    kv("center_ghz", fmt_real(x.center_ghz));
    kv("coherence_control_mhz", fmt_real(x.coherence_control_mhz));
    kv("dither_depth_rad", fmt_real(x.dither_depth_rad));
    kv("random_pm_bandwidth_mhz", fmt_real(x.random_pm_bandwidth_mhz));
    kv("random_pm_depth_rad", fmt_real(x.random_pm_depth_rad));
    kv("sine_pm_ghz", fmt_real(x.sine_pm_ghz));
    kv("sine_pm_depth_rad", fmt_real(x.sine_pm_depth_rad));
    kv("envelope", std::string(name_of(kEnvelopeNames, x.envelope)));
    kv("ase_bandwidth_ghz", fmt_real(x.ase_bandwidth_ghz));
    kv("samples", std::to_string(x.samples));
  }
  if (s.lo) {
    section("lo");
    kv("gain", fmt_real(s.lo->gain));
    kv("apparent_shot_db", fmt_real(s.lo->apparent_shot_db));
  }
  if (s.chain) {
    section("chain");
    if (!s.chain->efficiencies.empty()) kv("efficiencies", fmt_list(s.chain->efficiencies));
    opt("dark_db", s.chain->dark_db);
    kv("residual_rin_db", fmt_real(s.chain->residual_rin_db));
    kv("cmrr_db", fmt_real(s.chain->cmrr_db));
  }
  if (s.sweep) {
    section("sweep");
    if (!s.sweep->pump_powers_w.empty()) kv("pump_powers_w", fmt_list(s.sweep->pump_powers_w));
    if (!s.sweep->sine_freqs_ghz.empty()) kv("sine_freqs_ghz", fmt_list(s.sweep->sine_freqs_ghz));
  }
  if (s.herald) {
    section("herald");
    kv("gammas", fmt_list(s.herald->gammas));
    kv("samples", std::to_string(s.herald->samples));
    kv("efficiency", fmt_real(s.herald->efficiency));
  }
  if (s.calibration) {
    const auto& c = *s.calibration;
    section("calibration");
    kv("target_detuning_ghz", fmt_real(c.target_detuning_ghz));
    kv("target_squeeze_db", fmt_real(c.target_squeeze_db));
    kv("target_antisqueeze_db", fmt_real(c.target_antisqueeze_db));
    kv("loss_fraction", fmt_real(c.loss_fraction));
    kv("half_bins", std::to_string(c.half_bins));
  }
  if (s.budget) {
    const auto& b = *s.budget;
    section("budget");
    kv("baseline_level_db", fmt_real(b.baseline_level_db));
    if (!b.baseline_efficiencies.empty()) kv("baseline_efficiencies", fmt_list(b.baseline_efficiencies));
    opt("baseline_dark_db", b.baseline_dark_db);
    kv("baseline_apparent_shot_db", fmt_real(b.baseline_apparent_shot_db));
    opt("internal_estimate_db", b.internal_estimate_db);
  }
  return out;
}

double ghz_to_rad_s(double ghz) { return 2.0 * std::numbers::pi * ghz * 1e9; }

FrequencyGrid make_grid(const GridSection& g) {
  return FrequencyGrid(2.0 * std::numbers::pi * g.center_thz * 1e12, ghz_to_rad_s(g.spacing_ghz),
                       g.half_bins);
}

FopaParams make_params(const FiberSection& f) {
  FopaParams p;
  p.beta2 = f.beta2;
  p.beta4 = f.beta4;
  p.gamma_nl = f.gamma;
  p.length = f.length_m;
  p.loss_per_length = -std::log1p(-f.loss_fraction) / f.length_m;
  p.raman_n = f.raman_n;
  p.segments = f.segments;
  p.phase_matching = f.phase_matching;
  if (f.pump_power_w) {
    p.pump_peak_power = *f.pump_power_w;
  } else if (f.peak_detuning_ghz) {
    p.pump_peak_power = calibrate_peak_detuning(ghz_to_rad_s(*f.peak_detuning_ghz), p);
  }
  p.validate();
  return p;
}

SeedModel make_seed_model(const SeedSection& x, std::uint64_t rng_seed) {
  SeedModel m;
  m.kind = x.kind;
  m.center_detuning = ghz_to_rad_s(x.center_ghz);
  m.coherence_control_rate = x.coherence_control_mhz * 1e6;
  m.dither_depth = x.dither_depth_rad;
  m.random_pm_bandwidth = x.random_pm_bandwidth_mhz * 1e6;
  m.random_pm_depth = x.random_pm_depth_rad;
  m.sine_pm_freq = x.sine_pm_ghz * 1e9;
  m.sine_pm_depth = x.sine_pm_depth_rad;
  m.envelope = x.envelope;
  m.ase_bandwidth = ghz_to_rad_s(x.ase_bandwidth_ghz);
  m.rng_seed = rng_seed;
  return m;
}

DetectionChain make_chain(const ChainSection& c) {
  DetectionChain chain;
  chain.efficiencies = c.efficiencies;
  chain.dark_rel = c.dark_db ? from_db(*c.dark_db) : 0.0;
  chain.rin_excess = lo_excess_rin(c.residual_rin_db);
  chain.cmrr_db = c.cmrr_db;
  return chain;
}

}  // namespace scmode::cli
