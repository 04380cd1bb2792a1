// scmode: run, validate and list squeezing scenarios.
//
// Exit codes: 0 success, 1 other failure, 2 invalid scenario, 3 calibration
// failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "scmode/errors.hpp"
#include "scmode/runner.hpp"
#include "scmode/scenario.hpp"

namespace {

enum Exit { kOk = 0, kFailure = 1, kInvalid = 2, kCalibration = 3 };

int report_invalid(const scmode::cli::ScenarioError& e) {
  std::cerr << "error: invalid scenario\n";
  for (const auto& msg : e.errors()) std::cerr << "  " << msg << '\n';
  return kInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  namespace sc = scmode::cli;
  CLI::App app{"Multimode squeezed-light simulations driven by scenario files"};
  app.require_subcommand(1);

  std::string file;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> segments;
  std::string out_dir = ".";

  auto* run = app.add_subcommand("run", "Run a scenario and write its CSV and summary");
  run->add_option("file", file, "Scenario file")->required();
  run->add_option("--seed", seed, "Override the scenario's rng seed");
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--segments", segments, "Override the split-step segment count")
      ->check(CLI::PositiveNumber);

  auto* check = app.add_subcommand("validate", "Parse and validate a scenario");
  check->add_option("file", file, "Scenario file")->required();

  auto* list = app.add_subcommand("list-scenarios", "List the shipped scenarios");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& path : sc::list_scenarios()) std::cout << path.stem().string() << '\t' << path.string() << '\n';
      return kOk;
    }
    const auto scenario = sc::load_scenario(file);
    if (check->parsed()) {
      std::cout << file << ": ok (" << sc::directive_name(scenario.run.directive) << ")\n";
      return kOk;
    }
    const auto effective = sc::apply_overrides(scenario, {seed, segments});
    const auto stem = std::filesystem::path(file).stem().string();
    const auto written = sc::run_to_disk(effective, stem, out_dir);
    std::cout << written.artifacts.summary;
    std::cout << "csv: " << written.csv.string() << '\n';
    std::cout << "summary: " << written.summary.string() << '\n';
    return kOk;
  } catch (const sc::ScenarioError& e) {
    return report_invalid(e);
  } catch (const scmode::CalibrationError& e) {
    std::cerr << "calibration failed: " << e.what() << '\n';
    return kCalibration;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
