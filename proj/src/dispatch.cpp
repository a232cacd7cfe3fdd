#include "scavsim/dispatch.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include <fmt/format.h>

namespace scavsim::dispatch {

const char* to_string(VehicleState s) {
  switch (s) {
    case VehicleState::IdleAtDepot: return "idle";
    case VehicleState::Serving: return "serving";
    case VehicleState::ReturningToDepot: return "returning";
    case VehicleState::Repositioning: return "repositioning";
  }
  return "?";
}

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::Submit: return "submit";
    case EventKind::Assign: return "assign";
    case EventKind::Board: return "board";
    case EventKind::Alight: return "alight";
    case EventKind::Return: return "return";
    case EventKind::Idle: return "idle";
    case EventKind::Reposition: return "reposition";
  }
  return "?";
}

Dispatcher::Dispatcher(const NetworkGraph& net, std::span<const NodeIndex> depots,
                       Tick cycle_length)
    : net_(&net), cycle_length_(cycle_length), queues_(net.node_count()), homed_(net.node_count(), false) {
  if (cycle_length <= 0) throw ConfigError("dispatch cycle length must be positive");
  fleet_.reserve(depots.size());
  for (const auto depot : depots) {
    if (depot >= net.node_count() || !net.node(depot).has_depot) {
      throw ConfigError("vehicle home must be a depot intersection");
    }
    ScavVehicle v;
    v.id = static_cast<VehicleId>(fleet_.size());
    v.depot = depot;
    v.location = AtNode{depot, 0};
    fleet_.push_back(std::move(v));
    homed_[depot] = true;
  }
}

RequestIndex Dispatcher::submit_request(const Traveler& traveler, Tick t) {
  if (traveler.origin >= net_->node_count() || !net_->node(traveler.origin).has_depot) {
    throw ConfigError(fmt::format("traveler {} requests a ride from a node without a depot",
                                  traveler.id));
  }
  const auto index = static_cast<RequestIndex>(requests_.size());
  Request r;
  r.traveler = traveler.id;
  r.origin = traveler.origin;
  r.destination = traveler.destination;
  r.submit_time = t;
  requests_.push_back(r);
  // The engine submits in clock order, so appending keeps the queue FIFO.
  queues_[traveler.origin].push_back(index);
  ++waiting_;
  log_.push_back({EventKind::Submit, t, std::nullopt, traveler.id, traveler.origin});
  return index;
}

void Dispatcher::board(ScavVehicle& v, RequestIndex ri, NodeIndex node, Tick t) {
  auto& r = requests_[ri];
  r.status = RequestStatus::Assigned;
  r.assign_time = t;
  r.vehicle = v.id;
  log_.push_back({EventKind::Assign, t, v.id, r.traveler, node});
  r.status = RequestStatus::OnBoard;
  r.board_time = t;
  v.onboard.push_back(ri);
  log_.push_back({EventKind::Board, t, v.id, r.traveler, node});
  --waiting_;
}

void Dispatcher::set_next_stop(ScavVehicle& v, NodeIndex node, Tick t) {
  if (v.onboard.empty() && v.state == VehicleState::Repositioning && v.next_stop != node) return;
  if (!v.onboard.empty()) {
    v.state = VehicleState::Serving;
    v.next_stop = requests_[v.onboard.front()].destination;
  } else if (node == v.depot) {
    v.state = VehicleState::IdleAtDepot;
    v.next_stop.reset();
    log_.push_back({EventKind::Idle, t, v.id, std::nullopt, node});
  } else {
    if (v.state != VehicleState::ReturningToDepot) {
      log_.push_back({EventKind::Return, t, v.id, std::nullopt, node});
    }
    v.state = VehicleState::ReturningToDepot;
    v.next_stop = v.depot;
  }
}

std::vector<Assignment> Dispatcher::run_dispatch_cycle(Tick t) {
  if (t % cycle_length_ != 0) {
    throw SimulationError(fmt::format("dispatch cycle at t={} is off the {} s grid", t, cycle_length_));
  }
  std::vector<Assignment> out;
  for (const auto node : net_->centroids()) {
    auto& q = queues_[node];
    for (auto& v : fleet_) {
      if (q.empty()) break;
      const bool available = v.state == VehicleState::IdleAtDepot ||
                             v.state == VehicleState::ReturningToDepot;
      if (!available || !v.at_node() || v.node() != node) continue;
      while (!q.empty() && v.onboard.size() < kVehicleCapacity) {
        const auto ri = q.front();
        q.pop_front();
        board(v, ri, node, t);
        out.push_back({v.id, ri});
      }
      if (!v.onboard.empty()) set_next_stop(v, node, t);
    }
  }
  return out;
}

ArrivalOutcome Dispatcher::on_vehicle_arrival(VehicleId id, NodeIndex node, Tick t) {
  auto& v = fleet_.at(id);
  v.location = AtNode{node, t};
  ArrivalOutcome outcome;

  while (!v.onboard.empty() && requests_[v.onboard.front()].destination == node) {
    const auto ri = v.onboard.front();
    v.onboard.erase(v.onboard.begin());
    auto& r = requests_[ri];
    r.status = RequestStatus::Completed;
    r.alight_time = t;
    ++completed_;
    log_.push_back({EventKind::Alight, t, v.id, r.traveler, node});
    outcome.alighted.push_back(ri);
  }

  auto& q = queues_[node];
  while (!q.empty() && v.onboard.size() < kVehicleCapacity) {
    const auto ri = q.front();
    q.pop_front();
    board(v, ri, node, t);
    outcome.boarded.push_back(ri);
  }

  set_next_stop(v, node, t);
  outcome.parked = v.state == VehicleState::IdleAtDepot;
  return outcome;
}

std::vector<NodeIndex> Dispatcher::stranded_depots() const {
  std::vector<NodeIndex> out;
  for (const auto node : net_->centroids()) {
    if (queues_[node].empty() || homed_[node]) continue;
    const bool targeted = std::any_of(fleet_.begin(), fleet_.end(), [&](const ScavVehicle& v) {
      return v.state == VehicleState::Repositioning && v.next_stop == node;
    });
    if (!targeted) out.push_back(node);
  }
  return out;
}

void Dispatcher::reposition(VehicleId id, NodeIndex target, Tick t) {
  auto& v = fleet_.at(id);
  if (v.state != VehicleState::IdleAtDepot || !v.at_node()) {
    throw SimulationError(fmt::format("vehicle {} is not idle and cannot reposition", id));
  }
  v.state = VehicleState::Repositioning;
  v.next_stop = target;
  log_.push_back({EventKind::Reposition, t, v.id, std::nullopt, v.node()});
}

std::vector<NodeIndex> round_robin_depots(const NetworkGraph& net, std::size_t fleet_size) {
  const auto depots = net.centroids();
  std::vector<NodeIndex> out;
  if (fleet_size == 0) return out;
  if (depots.empty()) throw ConfigError("network has no depots for the SCAV fleet");
  out.reserve(fleet_size);
  for (std::size_t i = 0; i < fleet_size; ++i) out.push_back(depots[i % depots.size()]);
  return out;
}

AuditReport audit_log(std::span<const Event> log, std::size_t capacity) {
  AuditReport report;
  report.events_checked = log.size();
  auto flag = [&](std::string rule, std::vector<std::size_t> events, std::string detail) {
    report.violations.push_back({std::move(rule), std::move(events), std::move(detail)});
  };

  struct Onboard {
    std::deque<std::pair<TravelerId, std::size_t>> riders;  // (request, board event)
  };
  std::map<VehicleId, Onboard> vehicles;
  // Per origin: submits in log order and the count of boardings already matched.
  std::map<NodeIndex, std::vector<std::pair<TravelerId, std::size_t>>> submits;
  std::map<NodeIndex, std::size_t> boarded_at;
  std::unordered_map<TravelerId, std::size_t> submit_event;
  std::unordered_map<TravelerId, NodeIndex> origin_of;
  std::unordered_map<TravelerId, bool> alighted;

  Tick last_time = log.empty() ? 0 : log.front().time;
  for (std::size_t i = 0; i < log.size(); ++i) {
    const auto& e = log[i];
    if (e.time < last_time) flag("order", {i}, fmt::format("event time {} after {}", e.time, last_time));
    last_time = std::max(last_time, e.time);

    const bool needs_request = e.kind == EventKind::Submit || e.kind == EventKind::Assign ||
                               e.kind == EventKind::Board || e.kind == EventKind::Alight;
    if (needs_request && !e.request) {
      flag("order", {i}, "event without request id");
      continue;
    }
    if (e.kind != EventKind::Submit && !e.vehicle) {
      flag("order", {i}, "vehicle event without vehicle id");
      continue;
    }
    switch (e.kind) {
      case EventKind::Submit: {
        if (!submit_event.emplace(*e.request, i).second) {
          flag("order", {submit_event[*e.request], i}, fmt::format("request {} submitted twice", *e.request));
          break;
        }
        submits[e.node].emplace_back(*e.request, i);
        origin_of[*e.request] = e.node;
        alighted[*e.request] = false;
        break;
      }
      case EventKind::Assign:
        if (!submit_event.contains(*e.request)) {
          flag("order", {i}, fmt::format("request {} assigned before submission", *e.request));
        }
        break;
      case EventKind::Board: {
        const auto it = origin_of.find(*e.request);
        if (it == origin_of.end()) {
          flag("order", {i}, fmt::format("request {} boarded before submission", *e.request));
          break;
        }
        if (it->second != e.node) {
          flag("fcfs", {i}, fmt::format("request {} boarded away from its origin", *e.request));
        }
        auto& seq = submits[it->second];
        auto& k = boarded_at[it->second];
        if (k >= seq.size() || seq[k].first != *e.request) {
          std::vector<std::size_t> ev{i};
          if (k < seq.size()) ev.insert(ev.begin(), seq[k].second);
          flag("fcfs", std::move(ev),
               fmt::format("request {} boarded ahead of earlier request {}", *e.request,
                           k < seq.size() ? static_cast<std::int64_t>(seq[k].first) : -1));
        }
        ++k;
        auto& riders = vehicles[*e.vehicle].riders;
        riders.emplace_back(*e.request, i);
        if (riders.size() > capacity) {
          flag("capacity", {i},
               fmt::format("vehicle {} carries {} passengers", *e.vehicle, riders.size()));
        }
        break;
      }
      case EventKind::Alight: {
        auto& riders = vehicles[*e.vehicle].riders;
        const auto pos = std::find_if(riders.begin(), riders.end(),
                                      [&](const auto& p) { return p.first == *e.request; });
        if (pos == riders.end()) {
          flag("fifo", {i}, fmt::format("request {} alights from vehicle {} without boarding it",
                                        *e.request, *e.vehicle));
          break;
        }
        if (pos != riders.begin()) {
          flag("fifo", {riders.front().second, pos->second, i},
               fmt::format("request {} alights before earlier-boarded request {}", *e.request,
                           riders.front().first));
        }
        riders.erase(pos);
        alighted[*e.request] = true;
        break;
      }
      case EventKind::Return:
      case EventKind::Idle:
      case EventKind::Reposition:
        if (!vehicles[*e.vehicle].riders.empty()) {
          flag("fifo", {i}, fmt::format("vehicle {} heads to depot with passengers", *e.vehicle));
        }
        break;
    }
  }
  for (const auto& [request, done] : alighted) {
    if (!done) flag("completion", {submit_event[request]}, fmt::format("request {} never completed", request));
  }
  std::sort(report.violations.begin(), report.violations.end(), [](const auto& a, const auto& b) {
    return a.events < b.events;
  });
  return report;
}

void write_event_log(std::ostream& out, std::span<const Event> log, const NetworkGraph& net) {
  out << "time,kind,vehicle,request,node\n";
  for (const auto& e : log) {
    out << fmt::format("{},{},{},{},{}\n", e.time, to_string(e.kind),
                       e.vehicle ? static_cast<std::int64_t>(*e.vehicle) : -1,
                       e.request ? static_cast<std::int64_t>(*e.request) : -1, net.node(e.node).id);
  }
}

}  // namespace scavsim::dispatch
