#include "fixtures.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <unistd.h>

namespace scavsim::testing {

NetworkGraph line_network(const std::vector<double>& lengths, double speed, double jam) {
  std::vector<Intersection> nodes;
  for (std::size_t i = 0; i <= lengths.size(); ++i) nodes.push_back({NodeId(i), 100.0 * i, 0.0, true});
  std::vector<NetworkGraph::RawLink> links;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    links.push_back({LinkId(2 * i), NodeId(i), NodeId(i + 1), lengths[i], speed, jam});
    links.push_back({LinkId(2 * i + 1), NodeId(i + 1), NodeId(i), lengths[i], speed, jam});
  }
  return NetworkGraph(std::move(nodes), std::move(links));
}

NetworkGraph network_from_text(const std::string& nodes, const std::string& links) {
  std::istringstream n(nodes);
  std::istringstream l(links);
  return parse_network(n, l);
}

Traveler make_traveler(TravelerId id, NodeIndex o, NodeIndex d, Tick departure, Mode mode) {
  Traveler t;
  t.id = id;
  t.origin = o;
  t.destination = d;
  t.departure_time = departure;
  t.chosen_mode = mode;
  return t;
}

CostGraph random_cost_graph(std::uint64_t seed, int max_nodes) {
  std::mt19937_64 gen(seed);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); };
  const int n = pick(2, max_nodes);
  std::vector<Intersection> nodes;
  // Sparse, shuffled external ids so index order differs from creation order.
  std::vector<NodeId> ids;
  for (int i = 0; i < n; ++i) ids.push_back(NodeId(i) * 7 + pick(0, 6));
  std::shuffle(ids.begin(), ids.end(), gen);
  nodes.push_back({ids[0], 0, 0, true});
  for (int i = 1; i < n; ++i) nodes.push_back({ids[i], 0, 0, false});
  std::vector<NetworkGraph::RawLink> links;
  LinkId next = 0;
  const int m = pick(n, n * 4);
  for (int k = 0; k < m; ++k) {
    const int a = pick(0, n - 1);
    const int b = pick(0, n - 1);
    if (a == b) continue;
    links.push_back({next++, ids[a], ids[b], double(pick(1, 20)), 1.0, 10.0});
  }
  NetworkGraph net(std::move(nodes), std::move(links));
  std::vector<double> cost;
  for (const auto& l : net.links()) cost.push_back(l.length);
  return {std::move(net), std::move(cost)};
}

std::vector<std::vector<double>> floyd_warshall(const NetworkGraph& net, const std::vector<double>& cost) {
  const auto n = net.node_count();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0.0;
  for (std::size_t l = 0; l < net.link_count(); ++l) {
    const auto& link = net.link(LinkIndex(l));
    d[link.from][link.to] = std::min(d[link.from][link.to], cost[l]);
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  return d;
}

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("scavsim_" + std::to_string(::getpid()) + "_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace scavsim::testing
