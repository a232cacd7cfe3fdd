#pragma once

#include <deque>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "scavsim/common.hpp"
#include "scavsim/demand.hpp"
#include "scavsim/network.hpp"

namespace scavsim::dispatch {

inline constexpr std::size_t kVehicleCapacity = 4;
inline constexpr Tick kDefaultCycleLength = 60;

using RequestIndex = std::uint32_t;

enum class RequestStatus { Waiting, Assigned, OnBoard, Completed };

struct Request {
  TravelerId traveler = 0;
  NodeIndex origin = 0;
  NodeIndex destination = 0;
  Tick submit_time = 0;
  RequestStatus status = RequestStatus::Waiting;
  std::optional<Tick> assign_time;
  std::optional<Tick> board_time;
  std::optional<Tick> alight_time;
  std::optional<VehicleId> vehicle;
};

enum class VehicleState {
  IdleAtDepot,
  Serving,
  ReturningToDepot,
  Repositioning,  // empty, bound for a depot that is no vehicle's home
};
const char* to_string(VehicleState s);

/// Standing at an intersection; may not leave before `hold_until` (dwell).
struct AtNode {
  NodeIndex node = 0;
  Tick hold_until = 0;
};

/// Traversing a link; `remaining` seconds were frozen at entry.
struct OnLink {
  LinkIndex link = 0;
  double remaining = 0.0;
  Tick entered_at = 0;
};

struct ScavVehicle {
  VehicleId id = 0;
  NodeIndex depot = 0;
  std::vector<RequestIndex> onboard;  // boarding order
  VehicleState state = VehicleState::IdleAtDepot;
  std::variant<AtNode, OnLink> location;
  std::optional<NodeIndex> next_stop;

  bool at_node() const { return std::holds_alternative<AtNode>(location); }
  NodeIndex node() const { return std::get<AtNode>(location).node; }
};

enum class EventKind { Submit, Assign, Board, Alight, Return, Idle, Reposition };
const char* to_string(EventKind k);

/// Log record. `request` carries the traveler id of the request.
struct Event {
  EventKind kind = EventKind::Submit;
  Tick time = 0;
  std::optional<VehicleId> vehicle;
  std::optional<TravelerId> request;
  NodeIndex node = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

struct Assignment {
  VehicleId vehicle;
  RequestIndex request;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct ArrivalOutcome {
  std::vector<RequestIndex> alighted;
  std::vector<RequestIndex> boarded;
  bool parked = false;  // vehicle is now IdleAtDepot
};

/// Central request table plus fleet registry. Vehicles move under the control
/// of the simulation engine; every boarding and alighting goes through here.
class Dispatcher {
 public:
  /// One vehicle per entry of `depots`; vehicle i starts IdleAtDepot at depots[i].
  Dispatcher(const NetworkGraph& net, std::span<const NodeIndex> depots,
             Tick cycle_length = kDefaultCycleLength);

  /// Appends a Waiting request to the origin's queue. Throws ConfigError when
  /// the origin has no depot.
  RequestIndex submit_request(const Traveler& traveler, Tick t);

  /// Depot matching: at every depot, queued requests board idle vehicles there
  /// in FIFO order, lowest vehicle id first, four per vehicle. Loaded vehicles
  /// become Serving with next_stop set; the caller moves them off the node.
  std::vector<Assignment> run_dispatch_cycle(Tick t);

  /// Vehicle `v` has reached `node`. Drops the leading onboard passengers whose
  /// destination is `node` (strict FIFO), boards waiting requests while seats
  /// remain, then sets the next stop or parks at the home depot.
  ArrivalOutcome on_vehicle_arrival(VehicleId v, NodeIndex node, Tick t);

  /// Depots, ascending, with waiting requests that no vehicle calls home and no
  /// vehicle is already repositioning toward.
  std::vector<NodeIndex> stranded_depots() const;

  /// Sends an idle vehicle empty toward `target`; en-route pickups still apply.
  void reposition(VehicleId v, NodeIndex target, Tick t);

  ScavVehicle& vehicle(VehicleId v) { return fleet_.at(v); }
  const ScavVehicle& vehicle(VehicleId v) const { return fleet_.at(v); }
  std::span<const ScavVehicle> fleet() const { return fleet_; }
  std::span<const Request> requests() const { return requests_; }
  const std::deque<RequestIndex>& queue(NodeIndex node) const { return queues_.at(node); }
  std::span<const Event> log() const { return log_; }
  Tick cycle_length() const { return cycle_length_; }

  std::size_t waiting_count() const { return waiting_; }
  std::size_t completed_count() const { return completed_; }

 private:
  void board(ScavVehicle& v, RequestIndex r, NodeIndex node, Tick t);
  void set_next_stop(ScavVehicle& v, NodeIndex node, Tick t);

  const NetworkGraph* net_;
  Tick cycle_length_;
  std::vector<ScavVehicle> fleet_;
  std::vector<Request> requests_;
  std::vector<std::deque<RequestIndex>> queues_;
  std::vector<Event> log_;
  std::vector<bool> homed_;  // per node: some vehicle's depot
  std::size_t waiting_ = 0;
  std::size_t completed_ = 0;
};

/// Round-robin over depots in centroid id order.
std::vector<NodeIndex> round_robin_depots(const NetworkGraph& net, std::size_t fleet_size);

struct Violation {
  std::string rule;  // "capacity", "fcfs", "fifo", "completion", "order"
  std::vector<std::size_t> events;  // offending positions in the log
  std::string detail;
};

struct AuditReport {
  std::vector<Violation> violations;
  std::size_t events_checked = 0;

  bool ok() const { return violations.empty(); }
};

/// Replays a log and checks capacity, per-origin FCFS boarding, per-vehicle
/// FIFO alighting and completion of every submitted request.
AuditReport audit_log(std::span<const Event> log, std::size_t capacity = kVehicleCapacity);

/// Header `time,kind,vehicle,request,node`; absent fields are written as -1.
void write_event_log(std::ostream& out, std::span<const Event> log, const NetworkGraph& net);

}  // namespace scavsim::dispatch
