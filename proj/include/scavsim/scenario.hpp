#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "scavsim/daytoday.hpp"

namespace scavsim {

/// Parsed scenario file. Relative paths are resolved against the file's directory.
///
/// Keys (all optional unless noted):
///   name, seed, output
///   network.nodes, network.links          file-based network, or
///   grid.rows, grid.cols, grid.spacing, grid.speed, grid.jam_capacity,
///   grid.centroid_fraction, grid.seed      generated grid (exactly one of the two)
///   demand.od (required), demand.interval_length, demand.draw (exact|poisson),
///   demand.ratio_values, demand.ratio_weights, demand.epsilon_scale
///   choice.asc_cav, choice.beta_dt, choice.beta_ratio
///   horizon.max_days, horizon.lambda, horizon.kappa, horizon.fleet_initial,
///   horizon.fleet_min, horizon.fleet_max, horizon.day1_scav_count,
///   horizon.day1_selection (lowest_utility|random), horizon.initial_wait_guess
///   sim.speed_floor, sim.cycle_length, sim.dwell, sim.count_empty_movement
struct ScenarioFile {
  std::filesystem::path base_dir;
  std::string name = "scenario";
  std::optional<std::filesystem::path> nodes;
  std::optional<std::filesystem::path> links;
  std::optional<GridSpec> grid;
  std::uint64_t grid_seed = 1;
  std::optional<std::filesystem::path> od;
  double interval_length = 300.0;
  PopulationConfig population;
  ChoiceParams choice;
  HorizonConfig horizon;
  DayConfig day;
  std::uint64_t seed = 1;
  std::optional<std::filesystem::path> output;
};

/// Collects every problem with keys and values into `issues`.
ScenarioFile parse_scenario(std::istream& in, const std::filesystem::path& base_dir,
                            std::vector<Issue>& issues, std::string_view source = "scenario");

/// Throws ConfigError when the file is absent or any key is invalid.
ScenarioFile load_scenario_file(const std::filesystem::path& path);

/// Writes every key, paths relative to `base_dir` where possible.
void write_scenario(std::ostream& out, const ScenarioFile& file);

/// Loads the network and OD data. Missing or malformed data files raise DataError.
Scenario build_scenario(const ScenarioFile& file);

/// Runs every parser and invariant check without simulating.
std::vector<Issue> validate_scenario(const std::filesystem::path& path);

}  // namespace scavsim
