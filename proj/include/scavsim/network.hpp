#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <unordered_map>
#include <vector>

#include "scavsim/common.hpp"

namespace scavsim {

struct Intersection {
  NodeId id = 0;
  double x = 0.0;  // meters, reporting only
  double y = 0.0;
  bool has_depot = false;  // true iff the node is a demand centroid

  friend bool operator==(const Intersection&, const Intersection&) = default;
};

struct Link {
  LinkId id = 0;
  NodeIndex from = 0;
  NodeIndex to = 0;
  double length = 0.0;           // m
  double free_flow_speed = 0.0;  // m/s
  double jam_capacity = 1.0;     // vehicles

  double free_flow_time() const { return length / free_flow_speed; }

  friend bool operator==(const Link&, const Link&) = default;
};

/// Immutable directed road graph. Intersections and links are stored sorted by
/// id, so index order and id order coincide.
class NetworkGraph {
 public:
  /// Links refer to intersections by external id in `raw_links` (from, to).
  struct RawLink {
    LinkId id;
    NodeId from;
    NodeId to;
    double length;
    double free_flow_speed;
    double jam_capacity;
  };

  /// Validates every invariant; throws DataError listing all violations.
  NetworkGraph(std::vector<Intersection> intersections, std::vector<RawLink> links);

  std::span<const Intersection> intersections() const { return intersections_; }
  std::span<const Link> links() const { return links_; }
  /// Depot/centroid node indices in ascending id order.
  std::span<const NodeIndex> centroids() const { return centroids_; }

  std::size_t node_count() const { return intersections_.size(); }
  std::size_t link_count() const { return links_.size(); }

  const Intersection& node(NodeIndex i) const { return intersections_[i]; }
  const Link& link(LinkIndex i) const { return links_[i]; }

  std::optional<NodeIndex> find_node(NodeId id) const;
  NodeIndex index_of(NodeId id) const;  // throws DataError when absent

  std::span<const LinkIndex> out_links(NodeIndex n) const { return out_[n]; }
  std::span<const LinkIndex> in_links(NodeIndex n) const { return in_[n]; }

  friend bool operator==(const NetworkGraph& a, const NetworkGraph& b) {
    return a.intersections_ == b.intersections_ && a.links_ == b.links_;
  }

 private:
  std::vector<Intersection> intersections_;
  std::vector<Link> links_;
  std::vector<NodeIndex> centroids_;
  std::unordered_map<NodeId, NodeIndex> index_;
  std::vector<std::vector<LinkIndex>> out_;
  std::vector<std::vector<LinkIndex>> in_;
};

/// Reads the node table (id,x,y,is_centroid) and link table
/// (id,from,to,length_m,speed_mps,jam_capacity). Throws DataError with row numbers.
NetworkGraph parse_network(std::istream& nodes, std::istream& links);

/// Same checks, but collects every problem instead of throwing.
std::optional<NetworkGraph> parse_network(std::istream& nodes, std::istream& links,
                                          std::vector<Issue>& issues,
                                          std::string_view node_source = "nodes",
                                          std::string_view link_source = "links");

void write_nodes(std::ostream& out, const NetworkGraph& net);
void write_links(std::ostream& out, const NetworkGraph& net);

struct GridSpec {
  std::size_t rows = 4;
  std::size_t cols = 4;
  double spacing = 400.0;      // m
  double speed = 10.0;         // m/s
  double jam_capacity = 50.0;  // vehicles per link
  double centroid_fraction = 1.0;
};

/// Bidirectional rows x cols grid. Node ids run row-major from 0; the
/// centroid set is max(1, round(fraction * nodes)) nodes drawn with `seed`.
NetworkGraph generate_grid(const GridSpec& spec, std::uint64_t seed);

inline constexpr double kDefaultSpeedFloor = 0.1;

/// Greenshields-style linear speed decay with a floor:
/// length / (v_free * max(1 - occupancy / jam, floor)).
double link_travel_time(const Link& link, double occupancy, double floor = kDefaultSpeedFloor);

struct Route {
  std::vector<LinkIndex> links;
  double seconds = 0.0;
};

/// Minimum-cost route on per-link costs (seconds, all positive). Among equal-cost
/// routes the lexicographically smallest link-id sequence wins. Throws
/// SimulationError when dst is unreachable.
Route shortest_path(const NetworkGraph& net, NodeIndex src, NodeIndex dst,
                    std::span<const double> cost);

/// Cost-to-destination for every node (infinity when unreachable).
std::vector<double> distances_to(const NetworkGraph& net, NodeIndex dst,
                                 std::span<const double> cost);

std::vector<double> free_flow_costs(const NetworkGraph& net);

}  // namespace scavsim
