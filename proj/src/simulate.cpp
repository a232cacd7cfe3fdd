#include "scavsim/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace scavsim {

namespace {

// Remaining link time at or below this counts as arrived.
constexpr double kArrivalSlack = 1e-9;
// Relative margin under which two repositioning distances count as equal.
constexpr double kTieTolerance = 1e-9;

}  // namespace

void DayConfig::validate() const {
  if (!(speed_floor > 0.0 && speed_floor <= 1.0)) throw ConfigError("speed floor must lie in (0, 1]");
  if (cycle_length <= 0) throw ConfigError("dispatch cycle length must be positive");
  if (dwell < 0) throw ConfigError("dwell time must be non-negative");
}

DayEngine::DayEngine(const NetworkGraph& net, std::span<const Traveler> travelers,
                     std::size_t fleet_size, const DayConfig& config)
    : net_(net),
      travelers_(travelers),
      config_(config),
      dispatcher_(net, dispatch::round_robin_depots(net, fleet_size), config.cycle_length),
      occupancy_(net.link_count(), 0),
      snapshot_(net.link_count(), 0),
      costs_(net.link_count(), 0.0),
      cav_trip_of_(travelers.size()) {
  config_.validate();
  departures_.resize(travelers.size());
  std::iota(departures_.begin(), departures_.end(), 0);
  std::sort(departures_.begin(), departures_.end(), [&](std::size_t a, std::size_t b) {
    const auto& ta = travelers[a];
    const auto& tb = travelers[b];
    return ta.departure_time != tb.departure_time ? ta.departure_time < tb.departure_time
                                                  : ta.id < tb.id;
  });
  for (const auto& t : travelers) {
    if (t.departure_time < 0) throw ConfigError(fmt::format("traveler {} departs before t=0", t.id));
    if (t.chosen_mode == Mode::SCAV) ++scav_demand_;
  }
  if (scav_demand_ > 0 && fleet_size == 0) {
    throw SimulationError(fmt::format(
        "{} SCAV trips requested but the fleet is empty; the day cannot terminate", scav_demand_));
  }
}

double DayEngine::enter_link(LinkIndex link, double carry) {
  ++occupancy_[link];
  return costs_[link] - carry;
}

LinkIndex DayEngine::next_link(NodeIndex from, NodeIndex to) const {
  const auto route = shortest_path(net_, from, to, costs_);
  if (route.links.empty()) throw SimulationError("routing requested to the current node");
  return route.links.front();
}

void DayEngine::depart_scav(dispatch::ScavVehicle& v, double carry) {
  const auto here = v.node();
  const auto link = next_link(here, *v.next_stop);
  v.location = dispatch::OnLink{link, enter_link(link, carry), clock_};
}

std::span<const dispatch::Event> DayEngine::step() {
  const Tick t = clock_;
  const auto first_event = dispatcher_.log().size();
  snapshot_ = occupancy_;
  for (LinkIndex l = 0; l < net_.link_count(); ++l) {
    costs_[l] = link_travel_time(net_.link(l), snapshot_[l], config_.speed_floor);
  }

  // (1) departures due now
  while (next_departure_ < departures_.size() &&
         travelers_[departures_[next_departure_]].departure_time <= t) {
    const auto pos = departures_[next_departure_++];
    const auto& traveler = travelers_[pos];
    if (traveler.chosen_mode == Mode::SCAV) {
      dispatcher_.submit_request(traveler, t);
      continue;
    }
    CavTrip trip;
    trip.traveler = pos;
    trip.destination = traveler.destination;
    if (traveler.origin == traveler.destination) {
      trip.arrival = t;
      ++cavs_done_;
    } else {
      trip.link = next_link(traveler.origin, traveler.destination);
      trip.remaining = enter_link(trip.link, 0.0);
      trip.entered_at = t;
      active_cavs_.push_back(cav_trips_.size());
    }
    cav_trip_of_[pos] = cav_trips_.size();
    cav_trips_.push_back(trip);
  }

  // (2) depot matching on the cycle grid
  if (t % config_.cycle_length == 0) {
    const auto assignments = dispatcher_.run_dispatch_cycle(t);
    std::optional<VehicleId> last;
    for (const auto& a : assignments) {
      if (last == a.vehicle) continue;
      last = a.vehicle;
      auto& v = dispatcher_.vehicle(a.vehicle);
      if (config_.dwell > 0) {
        std::get<dispatch::AtNode>(v.location).hold_until = t + config_.dwell;
      } else {
        depart_scav(v, 0.0);
      }
    }
    reposition_idle();
  }

  // (3) movement
  advance_scavs();
  advance_cavs();

  if (config_.check_occupancy && count_vehicles_on_links() != occupancy_) {
    throw SimulationError(fmt::format("link occupancy bookkeeping diverged at t={}", t));
  }
  ++clock_;
  if (!finished()) check_deadlock();
  return dispatcher_.log().subspan(first_event);
}

void DayEngine::reposition_idle() {
  for (const auto target : dispatcher_.stranded_depots()) {
    const auto dist = distances_to(net_, target, costs_);
    std::optional<VehicleId> pick;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& v : dispatcher_.fleet()) {
      if (v.state != dispatch::VehicleState::IdleAtDepot) continue;
      const double d = dist[v.node()];
      if (!pick || d < best - kTieTolerance * best) {
        pick = v.id;
        best = d;
      }
    }
    if (!pick || !std::isfinite(best)) continue;
    dispatcher_.reposition(*pick, target, clock_);
    depart_scav(dispatcher_.vehicle(*pick), 0.0);
  }
}

void DayEngine::advance_scavs() {
  const Tick t = clock_;
  for (VehicleId id = 0; id < dispatcher_.fleet().size(); ++id) {
    auto& v = dispatcher_.vehicle(id);
    if (auto* at = std::get_if<dispatch::AtNode>(&v.location)) {
      if (v.state != dispatch::VehicleState::IdleAtDepot && at->hold_until <= t) {
        depart_scav(v, 0.0);
      }
      continue;
    }
    auto& on = std::get<dispatch::OnLink>(v.location);
    if (on.entered_at >= t) continue;
    on.remaining -= 1.0;
    if (config_.count_empty_movement || !v.onboard.empty()) ++vehicle_seconds_;
    if (on.remaining > kArrivalSlack) continue;

    const double carry = std::max(0.0, -on.remaining);
    const auto link = on.link;
    --occupancy_[link];
    const auto outcome = dispatcher_.on_vehicle_arrival(id, net_.link(link).to, t);
    if (outcome.parked) continue;
    const bool stopped = !outcome.alighted.empty() || !outcome.boarded.empty();
    if (stopped && config_.dwell > 0) {
      std::get<dispatch::AtNode>(v.location).hold_until = t + config_.dwell;
    } else {
      depart_scav(v, carry);
    }
  }
}

void DayEngine::advance_cavs() {
  const Tick t = clock_;
  std::size_t kept = 0;
  for (const auto index : active_cavs_) {
    auto& trip = cav_trips_[index];
    if (trip.entered_at < t) {
      trip.remaining -= 1.0;
      ++vehicle_seconds_;
      if (trip.remaining <= kArrivalSlack) {
        const double carry = std::max(0.0, -trip.remaining);
        --occupancy_[trip.link];
        const auto node = net_.link(trip.link).to;
        if (node == trip.destination) {
          trip.arrival = t;
          ++cavs_done_;
          continue;
        }
        trip.link = next_link(node, trip.destination);
        trip.remaining = enter_link(trip.link, carry);
        trip.entered_at = t;
      }
    }
    active_cavs_[kept++] = index;
  }
  active_cavs_.resize(kept);
}

bool DayEngine::finished() const {
  if (next_departure_ < departures_.size() || !active_cavs_.empty()) return false;
  if (dispatcher_.completed_count() != scav_demand_) return false;
  return std::all_of(dispatcher_.fleet().begin(), dispatcher_.fleet().end(), [](const auto& v) {
    return v.state == dispatch::VehicleState::IdleAtDepot;
  });
}

void DayEngine::check_deadlock() const {
  if (next_departure_ < departures_.size() || !active_cavs_.empty()) return;
  if (dispatcher_.waiting_count() == 0) return;
  for (const auto& v : dispatcher_.fleet()) {
    if (v.state != dispatch::VehicleState::IdleAtDepot) return;
    // An idle vehicle standing on a non-empty queue is matched at the next cycle.
    if (!dispatcher_.queue(v.node()).empty()) return;
  }
  // Stranded depots get a repositioned vehicle, unless none can reach them.
  for (const auto target : dispatcher_.stranded_depots()) {
    const auto dist = distances_to(net_, target, costs_);
    for (const auto& v : dispatcher_.fleet()) {
      if (std::isfinite(dist[v.node()])) return;
    }
  }
  std::size_t stranded_nodes = 0;
  for (NodeIndex n = 0; n < net_.node_count(); ++n) {
    if (!dispatcher_.queue(n).empty()) ++stranded_nodes;
  }
  throw SimulationError(fmt::format(
      "{} SCAV requests at {} intersections can never be served: no vehicle can reach them (t={})",
      dispatcher_.waiting_count(), stranded_nodes, clock_));
}

std::vector<std::uint32_t> DayEngine::count_vehicles_on_links() const {
  std::vector<std::uint32_t> counts(net_.link_count(), 0);
  for (const auto& v : dispatcher_.fleet()) {
    if (const auto* on = std::get_if<dispatch::OnLink>(&v.location)) ++counts[on->link];
  }
  for (const auto index : active_cavs_) ++counts[cav_trips_[index].link];
  return counts;
}

DayResult DayEngine::result() const {
  if (!finished()) throw SimulationError("day result requested before the network emptied");
  DayResult r;
  r.fleet_size = dispatcher_.fleet().size();
  r.total_travel_time = static_cast<double>(vehicle_seconds_) / 60.0;
  r.end_time = clock_;
  r.events.assign(dispatcher_.log().begin(), dispatcher_.log().end());
  r.audit = dispatch::audit_log(r.events);

  std::vector<std::optional<dispatch::RequestIndex>> request_of(travelers_.size());
  {
    // Requests were submitted in departure order.
    dispatch::RequestIndex ri = 0;
    for (const auto pos : departures_) {
      if (travelers_[pos].chosen_mode == Mode::SCAV) request_of[pos] = ri++;
    }
  }

  double wait_sum = 0.0;
  r.travelers.reserve(travelers_.size());
  for (std::size_t pos = 0; pos < travelers_.size(); ++pos) {
    const auto& t = travelers_[pos];
    TravelerRecord rec;
    rec.id = t.id;
    rec.mode = t.chosen_mode;
    rec.origin = t.origin;
    rec.destination = t.destination;
    if (t.chosen_mode == Mode::CAV) {
      ++r.demand_cav;
      const auto& trip = cav_trips_[*cav_trip_of_[pos]];
      rec.departure = t.departure_time;
      rec.board = t.departure_time;
      rec.arrival = trip.arrival;
      r.total_cav_utility += utility_cav(t.perceived_t_cav, t.perceived_t_scav, t.ratio, t.epsilon,
                                         config_.choice);
    } else {
      ++r.demand_scav;
      const auto& req = dispatcher_.requests()[*request_of[pos]];
      rec.departure = req.submit_time;
      rec.board = *req.board_time;
      rec.arrival = *req.alight_time;
      rec.vehicle = req.vehicle;
    }
    rec.wait_min = static_cast<double>(rec.board - rec.departure) / 60.0;
    rec.in_vehicle_min = static_cast<double>(rec.arrival - rec.board) / 60.0;
    rec.total_min = static_cast<double>(rec.arrival - rec.departure) / 60.0;
    if (rec.mode == Mode::SCAV) wait_sum += rec.wait_min;
    r.travelers.push_back(rec);
  }
  if (r.demand_scav > 0) r.mean_scav_wait = wait_sum / static_cast<double>(r.demand_scav);
  std::sort(r.travelers.begin(), r.travelers.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  return r;
}

DayResult run_day(const NetworkGraph& net, std::span<const Traveler> travelers,
                  std::size_t fleet_size, const DayConfig& config) {
  DayEngine engine(net, travelers, fleet_size, config);
  while (!engine.finished()) engine.step();
  return engine.result();
}

TravelerTimes traveler_times(const DayResult& result, TravelerId id) {
  const auto it = std::lower_bound(result.travelers.begin(), result.travelers.end(), id,
                                   [](const auto& rec, TravelerId v) { return rec.id < v; });
  if (it == result.travelers.end() || it->id != id) {
    throw std::out_of_range(fmt::format("traveler {} is not part of this day", id));
  }
  return {it->wait_min, it->in_vehicle_min, it->total_min};
}

void write_traveler_table(std::ostream& out, const DayResult& result, const NetworkGraph& net) {
  out << "traveler_id,origin_id,destination_id,mode,departure_s,board_s,arrival_s,vehicle,"
         "wait_min,in_vehicle_min,total_min\n";
  for (const auto& r : result.travelers) {
    out << fmt::format("{},{},{},{},{},{},{},{},{:.4f},{:.4f},{:.4f}\n", r.id,
                       net.node(r.origin).id, net.node(r.destination).id, to_string(r.mode),
                       r.departure, r.board, r.arrival,
                       r.vehicle ? static_cast<std::int64_t>(*r.vehicle) : -1, r.wait_min,
                       r.in_vehicle_min, r.total_min);
  }
}

}  // namespace scavsim
