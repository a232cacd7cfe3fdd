#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "scavsim/common.hpp"
#include "scavsim/demand.hpp"
#include "scavsim/dispatch.hpp"
#include "scavsim/network.hpp"

namespace scavsim {

struct DayConfig {
  double speed_floor = kDefaultSpeedFloor;
  Tick cycle_length = dispatch::kDefaultCycleLength;
  Tick dwell = 0;  // s spent at a node after any boarding or alighting
  bool count_empty_movement = true;  // empty SCAV seconds enter total travel time
  bool check_occupancy = false;      // recount link occupancy after every step
  ChoiceParams choice;

  void validate() const;
};

struct TravelerRecord {
  TravelerId id = 0;
  Mode mode = Mode::CAV;
  NodeIndex origin = 0;
  NodeIndex destination = 0;
  Tick departure = 0;            // departure (CAV) or request submission (SCAV)
  Tick board = 0;                // equals departure for CAV trips
  Tick arrival = 0;
  std::optional<VehicleId> vehicle;
  double wait_min = 0.0;
  double in_vehicle_min = 0.0;
  double total_min = 0.0;
};

struct DayResult {
  std::size_t demand_cav = 0;
  std::size_t demand_scav = 0;
  std::size_t fleet_size = 0;
  double total_travel_time = 0.0;  // veh·min on links
  double total_cav_utility = 0.0;  // sum of U_CAV over CAV choosers at their perceptions
  double mean_scav_wait = 0.0;     // min
  Tick end_time = 0;               // first clock value with an empty network
  std::vector<TravelerRecord> travelers;  // ascending id
  std::vector<dispatch::Event> events;
  dispatch::AuditReport audit;
};

struct TravelerTimes {
  double wait = 0.0;
  double in_vehicle = 0.0;
  double total = 0.0;
};

/// Minutes for one traveler of a finished day; throws std::out_of_range when absent.
TravelerTimes traveler_times(const DayResult& result, TravelerId id);

/// One simulated day on a 1 s clock. Each step runs: departures due now, the
/// dispatch cycle when clock % cycle_length == 0, then vehicle advancement in
/// vehicle order (SCAVs by id, then private CAVs). Link traversal times are
/// frozen at entry from the occupancy at the start of the step. After depot
/// matching, each stranded depot draws the nearest idle vehicle (lowest id on
/// ties), which leaves at once.
class DayEngine {
 public:
  DayEngine(const NetworkGraph& net, std::span<const Traveler> travelers, std::size_t fleet_size,
            const DayConfig& config);

  /// Advances one second; returns the dispatcher events emitted during it.
  /// Throws SimulationError when waiting requests can never be served.
  std::span<const dispatch::Event> step();

  bool finished() const;
  Tick clock() const { return clock_; }

  std::span<const std::uint32_t> occupancy() const { return occupancy_; }
  /// Per-link count of vehicles whose current location is that link.
  std::vector<std::uint32_t> count_vehicles_on_links() const;
  std::size_t active_cavs() const { return active_cavs_.size(); }
  const dispatch::Dispatcher& dispatcher() const { return dispatcher_; }

  DayResult result() const;

 private:
  struct CavTrip {
    std::size_t traveler = 0;  // position in travelers_
    NodeIndex destination = 0;
    LinkIndex link = 0;
    double remaining = 0.0;
    Tick entered_at = 0;
    Tick arrival = 0;
  };

  double enter_link(LinkIndex link, double carry);
  LinkIndex next_link(NodeIndex from, NodeIndex to) const;
  void depart_scav(dispatch::ScavVehicle& v, double carry);
  void reposition_idle();
  void advance_scavs();
  void advance_cavs();
  void check_deadlock() const;

  const NetworkGraph& net_;
  std::span<const Traveler> travelers_;
  DayConfig config_;
  dispatch::Dispatcher dispatcher_;
  Tick clock_ = 0;

  std::vector<std::uint32_t> occupancy_;
  std::vector<std::uint32_t> snapshot_;
  std::vector<double> costs_;

  std::vector<std::size_t> departures_;  // positions in travelers_ by (time, id)
  std::size_t next_departure_ = 0;
  std::vector<CavTrip> cav_trips_;
  std::vector<std::size_t> active_cavs_;
  std::vector<std::optional<std::size_t>> cav_trip_of_;  // per traveler position
  std::size_t cavs_done_ = 0;
  std::size_t scav_demand_ = 0;
  std::int64_t vehicle_seconds_ = 0;
};

DayResult run_day(const NetworkGraph& net, std::span<const Traveler> travelers,
                  std::size_t fleet_size, const DayConfig& config);

/// traveler_id,origin_id,destination_id,mode,departure_s,board_s,arrival_s,vehicle,
/// wait_min,in_vehicle_min,total_min
void write_traveler_table(std::ostream& out, const DayResult& result, const NetworkGraph& net);

}  // namespace scavsim
