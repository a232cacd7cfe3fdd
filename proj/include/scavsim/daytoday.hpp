#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "scavsim/demand.hpp"
#include "scavsim/network.hpp"
#include "scavsim/simulate.hpp"

namespace scavsim {

enum class Day1Selection {
  LowestUtility,  // the day1_scav_count travelers with the lowest U_CAV ride SCAV
  Random,         // a seeded uniform draw of day1_scav_count travelers
};

struct HorizonConfig {
  std::size_t max_days = 7;
  double lambda = 0.5;   // weight of the newest experience
  double kappa = 0.248;  // vehicles per SCAV trip of the previous day
  std::size_t fleet_initial = 200;
  std::size_t fleet_min = 1;
  std::size_t fleet_max = 300;
  std::size_t day1_scav_count = 0;
  Day1Selection day1_selection = Day1Selection::LowestUtility;
  double initial_wait_guess = 5.0;  // min added to free-flow time for the first T_SCAV

  void validate() const;
};

struct Scenario {
  NetworkGraph net;
  ODMatrix od;
  PopulationConfig population;
  ChoiceParams choice;
  HorizonConfig horizon;
  DayConfig day;
  std::uint64_t seed = 1;
};

struct HorizonResult {
  std::vector<DayResult> days;
  std::optional<std::size_t> converged_at;  // 1-based day index
  std::vector<Traveler> population;         // as synthesized, initial perceptions
};

/// T_CAV starts at the free-flow shortest-path time, T_SCAV that plus the wait guess.
void initialize_perceptions(std::span<Traveler> travelers, const NetworkGraph& net,
                            double initial_wait_guess);

/// Exponential smoothing toward the day's experience. The unchosen mode moves
/// toward the mean experienced time of that mode among same-origin travelers,
/// falling back to the all-origin mean, then to the old perception.
void update_perceptions(std::span<Traveler> travelers, const DayResult& result, double lambda);

/// clamp(round_half_up(kappa * prev_scav_demand), fleet_min, fleet_max)
std::size_t update_fleet(std::size_t prev_scav_demand, const HorizonConfig& cfg);

/// True iff the last two (demand_cav, demand_scav) entries are equal.
bool check_convergence(std::span<const std::pair<std::size_t, std::size_t>> history);

using DayCallback = std::function<void(std::size_t day, const DayResult&)>;

/// Day 1 uses the exogenous split and fleet_initial; later days re-choose modes
/// on updated perceptions and size the fleet from the previous day's SCAV demand.
/// Stops at convergence or after max_days; an empty population stops after day 1.
HorizonResult run_horizon(const Scenario& scenario, const DayCallback& on_day = {});

/// day,demand_cav,demand_scav,fleet_size,total_travel_time_vehmin,total_cav_utility,
/// normalized_cav_utility,mean_scav_wait
void write_horizon_table(std::ostream& out, std::span<const DayResult> days);

}  // namespace scavsim
