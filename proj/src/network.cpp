#include "scavsim/network.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <unordered_set>

#include <fmt/format.h>

#include "scavsim/rng.hpp"
#include "scavsim/table.hpp"

namespace scavsim {

namespace {

// Where a structural problem sits: an input node, an input link, or neither.
enum class Site { Node, Link, Graph };
using Report = std::function<void(Site, std::size_t, std::string)>;

/// Indices passed to `report` refer to positions in the unsorted inputs.
void check_structure(const std::vector<Intersection>& nodes,
                     const std::vector<NetworkGraph::RawLink>& links, const Report& report) {
  std::unordered_map<NodeId, std::size_t> node_pos;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!node_pos.emplace(nodes[i].id, i).second) {
      report(Site::Node, i, fmt::format("duplicate intersection id {}", nodes[i].id));
    }
  }
  std::unordered_set<LinkId> link_ids;
  std::vector<std::vector<std::size_t>> fwd(nodes.size()), bwd(nodes.size());
  for (std::size_t i = 0; i < links.size(); ++i) {
    const auto& l = links[i];
    if (!link_ids.insert(l.id).second) {
      report(Site::Link, i, fmt::format("duplicate link id {}", l.id));
    }
    const auto from = node_pos.find(l.from);
    const auto to = node_pos.find(l.to);
    if (from == node_pos.end()) {
      report(Site::Link, i, fmt::format("link {} references missing intersection {}", l.id, l.from));
    }
    if (to == node_pos.end()) {
      report(Site::Link, i, fmt::format("link {} references missing intersection {}", l.id, l.to));
    }
    if (!(l.length > 0.0) || !std::isfinite(l.length)) {
      report(Site::Link, i, fmt::format("link {} length must be positive", l.id));
    }
    if (!(l.free_flow_speed > 0.0) || !std::isfinite(l.free_flow_speed)) {
      report(Site::Link, i, fmt::format("link {} speed must be positive", l.id));
    }
    if (!(l.jam_capacity >= 1.0)) {
      report(Site::Link, i, fmt::format("link {} jam capacity must be at least 1", l.id));
    }
    if (from != node_pos.end() && to != node_pos.end()) {
      fwd[from->second].push_back(to->second);
      bwd[to->second].push_back(from->second);
    }
  }

  std::vector<std::size_t> centroids;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].has_depot) centroids.push_back(i);
  }
  if (centroids.size() < 2) return;

  auto reach = [&](std::size_t start, const std::vector<std::vector<std::size_t>>& adj) {
    std::vector<bool> seen(nodes.size(), false);
    std::vector<std::size_t> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (const auto v : adj[u]) {
        if (!seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
      }
    }
    return seen;
  };
  // Centroid c0 reaches every centroid and every centroid reaches c0.
  const auto anchor = *std::min_element(centroids.begin(), centroids.end(), [&](auto a, auto b) {
    return nodes[a].id < nodes[b].id;
  });
  const auto out = reach(anchor, fwd);
  const auto in = reach(anchor, bwd);
  for (const auto c : centroids) {
    if (!out[c]) {
      report(Site::Node, c,
             fmt::format("centroid {} is not reachable from centroid {}", nodes[c].id,
                         nodes[anchor].id));
    }
    if (!in[c]) {
      report(Site::Node, c,
             fmt::format("centroid {} cannot reach centroid {}", nodes[c].id, nodes[anchor].id));
    }
  }
}

}  // namespace

NetworkGraph::NetworkGraph(std::vector<Intersection> intersections, std::vector<RawLink> links) {
  std::vector<Issue> issues;
  check_structure(intersections, links, [&](Site, std::size_t, std::string msg) {
    issues.push_back({"network", 0, std::move(msg)});
  });
  if (!issues.empty()) throw DataError(std::move(issues));

  std::sort(intersections.begin(), intersections.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  std::sort(links.begin(), links.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

  intersections_ = std::move(intersections);
  for (NodeIndex i = 0; i < intersections_.size(); ++i) {
    index_.emplace(intersections_[i].id, i);
    if (intersections_[i].has_depot) centroids_.push_back(i);
  }
  out_.resize(intersections_.size());
  in_.resize(intersections_.size());
  links_.reserve(links.size());
  for (const auto& raw : links) {
    const auto idx = static_cast<LinkIndex>(links_.size());
    Link l{raw.id, index_.at(raw.from), index_.at(raw.to), raw.length, raw.free_flow_speed,
           raw.jam_capacity};
    out_[l.from].push_back(idx);
    in_[l.to].push_back(idx);
    links_.push_back(l);
  }
}

std::optional<NodeIndex> NetworkGraph::find_node(NodeId id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeIndex NetworkGraph::index_of(NodeId id) const {
  if (const auto i = find_node(id)) return *i;
  throw DataError(fmt::format("unknown intersection id {}", id));
}

std::optional<NetworkGraph> parse_network(std::istream& nodes_in, std::istream& links_in,
                                          std::vector<Issue>& issues,
                                          std::string_view node_source,
                                          std::string_view link_source) {
  const auto first_issue = issues.size();
  const auto node_table = read_table(nodes_in, std::string(node_source), issues);
  const auto link_table = read_table(links_in, std::string(link_source), issues);
  const bool nodes_ok = expect_columns(node_table, {"id", "x", "y", "is_centroid"}, issues);
  const bool links_ok = expect_columns(
      link_table, {"id", "from", "to", "length_m", "speed_mps", "jam_capacity"}, issues);
  if (!nodes_ok || !links_ok) return std::nullopt;

  std::vector<Intersection> nodes;
  std::vector<std::size_t> node_rows;
  for (const auto& row : node_table.rows) {
    auto bad = [&](std::string msg) { issues.push_back({node_table.source, row.line, std::move(msg)}); };
    if (row.fields.size() != 4) {
      bad(fmt::format("expected 4 fields, found {}", row.fields.size()));
      continue;
    }
    const auto id = parse_int(row.fields[0]);
    const auto x = parse_double(row.fields[1]);
    const auto y = parse_double(row.fields[2]);
    const auto c = parse_int(row.fields[3]);
    if (!id || !x || !y || !c || (*c != 0 && *c != 1)) {
      bad("malformed node row");
      continue;
    }
    nodes.push_back({*id, *x, *y, *c == 1});
    node_rows.push_back(row.line);
  }

  std::vector<NetworkGraph::RawLink> links;
  std::vector<std::size_t> link_rows;
  for (const auto& row : link_table.rows) {
    auto bad = [&](std::string msg) { issues.push_back({link_table.source, row.line, std::move(msg)}); };
    if (row.fields.size() != 6) {
      bad(fmt::format("expected 6 fields, found {}", row.fields.size()));
      continue;
    }
    const auto id = parse_int(row.fields[0]);
    const auto from = parse_int(row.fields[1]);
    const auto to = parse_int(row.fields[2]);
    const auto len = parse_double(row.fields[3]);
    const auto speed = parse_double(row.fields[4]);
    const auto jam = parse_double(row.fields[5]);
    if (!id || !from || !to || !len || !speed || !jam) {
      bad("malformed link row");
      continue;
    }
    links.push_back({*id, *from, *to, *len, *speed, *jam});
    link_rows.push_back(row.line);
  }

  check_structure(nodes, links, [&](Site site, std::size_t i, std::string msg) {
    switch (site) {
      case Site::Node: issues.push_back({node_table.source, node_rows[i], std::move(msg)}); break;
      case Site::Link: issues.push_back({link_table.source, link_rows[i], std::move(msg)}); break;
      case Site::Graph: issues.push_back({"network", 0, std::move(msg)}); break;
    }
  });
  if (issues.size() != first_issue) return std::nullopt;
  return NetworkGraph(std::move(nodes), std::move(links));
}

NetworkGraph parse_network(std::istream& nodes, std::istream& links) {
  std::vector<Issue> issues;
  auto net = parse_network(nodes, links, issues);
  if (!net) throw DataError(std::move(issues));
  return std::move(*net);
}

void write_nodes(std::ostream& out, const NetworkGraph& net) {
  out << "id,x,y,is_centroid\n";
  for (const auto& n : net.intersections()) {
    out << fmt::format("{},{},{},{}\n", n.id, n.x, n.y, n.has_depot ? 1 : 0);
  }
}

void write_links(std::ostream& out, const NetworkGraph& net) {
  out << "id,from,to,length_m,speed_mps,jam_capacity\n";
  for (const auto& l : net.links()) {
    out << fmt::format("{},{},{},{},{},{}\n", l.id, net.node(l.from).id, net.node(l.to).id,
                       l.length, l.free_flow_speed, l.jam_capacity);
  }
}

NetworkGraph generate_grid(const GridSpec& spec, std::uint64_t seed) {
  if (spec.rows < 2 || spec.cols < 2) throw ConfigError("grid needs at least 2 rows and 2 columns");
  if (!(spec.centroid_fraction > 0.0 && spec.centroid_fraction <= 1.0)) {
    throw ConfigError("centroid fraction must lie in (0, 1]");
  }
  if (!(spec.spacing > 0.0) || !(spec.speed > 0.0) || !(spec.jam_capacity >= 1.0)) {
    throw ConfigError("grid spacing and speed must be positive, jam capacity at least 1");
  }
  const std::size_t n = spec.rows * spec.cols;
  std::vector<Intersection> nodes(n);
  for (std::size_t r = 0; r < spec.rows; ++r) {
    for (std::size_t c = 0; c < spec.cols; ++c) {
      const auto id = r * spec.cols + c;
      nodes[id] = {static_cast<NodeId>(id), static_cast<double>(c) * spec.spacing,
                   static_cast<double>(r) * spec.spacing, false};
    }
  }

  const auto wanted = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(spec.centroid_fraction * static_cast<double>(n))), 1, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  for (std::size_t i = 0; i < wanted; ++i) nodes[order[i]].has_depot = true;

  std::vector<NetworkGraph::RawLink> links;
  auto add = [&](std::size_t a, std::size_t b) {
    links.push_back({static_cast<LinkId>(links.size()), static_cast<NodeId>(a),
                     static_cast<NodeId>(b), spec.spacing, spec.speed, spec.jam_capacity});
  };
  for (std::size_t r = 0; r < spec.rows; ++r) {
    for (std::size_t c = 0; c < spec.cols; ++c) {
      const auto id = r * spec.cols + c;
      if (c + 1 < spec.cols) {
        add(id, id + 1);
        add(id + 1, id);
      }
      if (r + 1 < spec.rows) {
        add(id, id + spec.cols);
        add(id + spec.cols, id);
      }
    }
  }
  return NetworkGraph(std::move(nodes), std::move(links));
}

double link_travel_time(const Link& link, double occupancy, double floor) {
  const double factor = std::max(1.0 - occupancy / link.jam_capacity, floor);
  return link.length / (link.free_flow_speed * std::min(factor, 1.0));
}

std::vector<double> distances_to(const NetworkGraph& net, NodeIndex dst,
                                 std::span<const double> cost) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(net.node_count(), inf);
  using Entry = std::pair<double, NodeIndex>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  dist[dst] = 0.0;
  heap.emplace(0.0, dst);
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (const auto li : net.in_links(v)) {
      const auto u = net.link(li).from;
      const double cand = d + cost[li];
      if (cand < dist[u]) {
        dist[u] = cand;
        heap.emplace(cand, u);
      }
    }
  }
  return dist;
}

Route shortest_path(const NetworkGraph& net, NodeIndex src, NodeIndex dst,
                    std::span<const double> cost) {
  Route route;
  if (src == dst) return route;
  const auto dist = distances_to(net, dst, cost);
  if (!std::isfinite(dist[src])) {
    throw SimulationError(fmt::format("intersection {} is unreachable from intersection {}",
                                      net.node(dst).id, net.node(src).id));
  }
  route.seconds = dist[src];
  // Walk tight links from src, lowest link id first; out_links are in id order.
  NodeIndex u = src;
  while (u != dst) {
    const double tol = 1e-9 * std::max(1.0, dist[u]);
    std::optional<LinkIndex> next;
    for (const auto li : net.out_links(u)) {
      const auto v = net.link(li).to;
      if (std::isfinite(dist[v]) && cost[li] + dist[v] <= dist[u] + tol) {
        next = li;
        break;
      }
    }
    if (!next) throw SimulationError("shortest path reconstruction failed");
    route.links.push_back(*next);
    u = net.link(*next).to;
    if (route.links.size() > net.link_count()) throw SimulationError("shortest path cycles");
  }
  return route;
}

std::vector<double> free_flow_costs(const NetworkGraph& net) {
  std::vector<double> cost;
  cost.reserve(net.link_count());
  for (const auto& l : net.links()) cost.push_back(l.free_flow_time());
  return cost;
}

}  // namespace scavsim
