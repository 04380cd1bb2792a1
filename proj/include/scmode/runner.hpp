#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "scmode/scenario.hpp"

namespace scmode::cli {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> segments;
};

Scenario apply_overrides(Scenario scenario, const Overrides& overrides);

/// CSV text (header row with units, then data) and the summary block.
struct Artifacts {
  std::string csv;
  std::string summary;
};

/// Runs the scenario's directive. Pure: no files are touched, and the result
/// depends only on the scenario (including its seed).
Artifacts compute(const Scenario& scenario, std::string_view name = "scenario");

struct Written {
  std::filesystem::path csv;
  std::filesystem::path summary;
  Artifacts artifacts;
};

/// compute() plus writing `<output>` (default `<name>.csv`) and
/// `<output stem>.summary.txt` under `out_dir`.
Written run_to_disk(const Scenario& scenario, std::string_view name,
                    const std::filesystem::path& out_dir);

/// Scenario files shipped with the project, sorted by name.
std::vector<std::filesystem::path> list_scenarios(
    const std::filesystem::path& dir = SCMODE_SCENARIO_DIR);

}  // namespace scmode::cli
