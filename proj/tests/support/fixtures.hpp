#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "scavsim/demand.hpp"
#include "scavsim/network.hpp"

namespace scavsim::testing {

// Nodes 0..n along a line with links both ways; every node is a centroid.
NetworkGraph line_network(const std::vector<double>& lengths, double speed = 10.0, double jam = 50.0);

NetworkGraph network_from_text(const std::string& nodes, const std::string& links);

Traveler make_traveler(TravelerId id, NodeIndex o, NodeIndex d, Tick departure, Mode mode);

// Random directed graph with integer costs for all-pairs comparisons.
struct CostGraph {
  NetworkGraph net;
  std::vector<double> cost;
};
CostGraph random_cost_graph(std::uint64_t seed, int max_nodes = 20);

// All-pairs minimum cost, infinity where unreachable.
std::vector<std::vector<double>> floyd_warshall(const NetworkGraph& net, const std::vector<double>& cost);

std::filesystem::path fresh_dir(const std::string& name);
std::string slurp(const std::filesystem::path& p);

}  // namespace scavsim::testing
