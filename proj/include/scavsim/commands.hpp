#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "scavsim/scenario.hpp"

namespace scavsim::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kDataError = 3,
  kRuntimeError = 4,
};

/// Maps exceptions thrown by `body` to exit codes, printing a categorized message to `err`.
int guarded(std::ostream& err, const std::function<int()>& body);

/// Known preset names: "toronto-like", "grid4".
const std::vector<std::string>& preset_names();

struct GeneratedScenario {
  NetworkGraph net;
  ODMatrix od;
  ScenarioFile file;  // paths point at nodes.csv, links.csv and od.csv in the target dir
};

/// Builds a preset in memory. Throws ConfigError for an unknown preset.
GeneratedScenario make_preset(const std::string& preset, std::uint64_t seed,
                              const std::filesystem::path& dir);

/// Writes nodes.csv, links.csv, od.csv and scenario.txt into `dir`.
void write_generated(const GeneratedScenario& g, const std::filesystem::path& dir);

struct GenerateOptions {
  std::string preset = "toronto-like";
  std::filesystem::path out;
  std::uint64_t seed = 1;
};

struct RunOptions {
  std::filesystem::path scenario;
  std::vector<std::uint64_t> seeds;  // empty: the scenario's own seed
  std::optional<std::size_t> days;
  std::optional<std::filesystem::path> out;
  bool emit_events = false;
  std::size_t parallel = 1;
};

/// Output directory: --out, else the scenario's output key, else
/// $SCAVSIM_OUTPUT_ROOT/<name>, else ./runs/<name>.
std::filesystem::path resolve_output(const RunOptions& opts, const ScenarioFile& file);

/// Runs the horizon for one seed and writes horizon.csv, population.csv,
/// day_<d>_travelers.csv and, when asked, day_<d>_events.csv. `log` receives
/// the per-day table.
HorizonResult run_to_directory(const Scenario& scenario, const std::filesystem::path& dir,
                               bool emit_events, std::ostream& log);

int cmd_generate(const GenerateOptions& opts, std::ostream& out, std::ostream& err);
int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_report(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err);
int cmd_validate(const std::filesystem::path& scenario, std::ostream& out, std::ostream& err);

}  // namespace scavsim::cli
