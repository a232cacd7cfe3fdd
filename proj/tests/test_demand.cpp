#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "fixtures.hpp"
#include "scavsim/demand.hpp"
#include "scavsim/rng.hpp"

using namespace scavsim;

namespace {

NetworkGraph some_centroids() { return generate_grid({.rows = 3, .cols = 3, .centroid_fraction = 0.5}, 2); }

ODMatrix od_from(const std::string& text, const NetworkGraph& net) {
  std::istringstream in(text);
  return parse_od(in, net);
}

std::vector<Issue> od_issues(const std::string& text, const NetworkGraph& net) {
  std::istringstream in(text);
  std::vector<Issue> issues;
  parse_od(in, net, 300.0, issues);
  return issues;
}

const char* kHeader = "interval_index,origin_id,destination_id,count\n";

}  // namespace

TEST(Demand, EmptyBody) {
  const auto net = some_centroids();
  EXPECT_EQ(od_from(kHeader, net).total(), 0u);
  EXPECT_TRUE(synthesize_population(ODMatrix{}, {}, 1).empty());
}

TEST(Demand, ThreeIntervalsTotal) {
  const auto net = some_centroids();
  const auto c = net.centroids();
  std::string text = kHeader;
  for (int k = 0; k < 3; ++k) {
    std::uint64_t left = 1159;
    for (std::size_t i = 0; left > 0; ++i) {
      const auto o = net.node(c[i % c.size()]).id;
      const auto d = net.node(c[(i + 1) % c.size()]).id;
      const std::uint64_t n = std::min<std::uint64_t>(left, 37);
      text += fmt::format("{},{},{},{}\n", k, o, d, n);
      left -= n;
    }
  }
  const auto od = od_from(text, net);
  EXPECT_EQ(od.total(), 3477u);
  EXPECT_EQ(synthesize_population(od, {}, 4).size(), 3477u);
}

TEST(Demand, DuplicateRowsAreSummed) {
  const auto net = some_centroids();
  const auto o = net.node(net.centroids()[0]).id;
  const auto d = net.node(net.centroids()[1]).id;
  const auto od = od_from(fmt::format("{0}1,{1},{2},3\n1,{1},{2},4\n", kHeader, o, d), net);
  EXPECT_EQ(od.total(), 7u);
  ASSERT_EQ(od.entries().size(), 1u);
  EXPECT_EQ(od.entries().begin()->second, 7u);
}

TEST(Demand, RejectsBadRows) {
  const auto net = some_centroids();
  const auto o = net.node(net.centroids()[0]).id;
  const auto d = net.node(net.centroids()[1]).id;
  NodeId plain = -1;
  for (const auto& n : net.intersections()) {
    if (!n.has_depot) plain = n.id;
  }
  ASSERT_GE(plain, 0);
  const auto issues = od_issues(
      fmt::format("{0}0,{1},{2},-2\n0,{1},{3},1\n0,{1},{1},1\n0,{1},{2}\n0,{1},{2},x\n", kHeader, o, d, plain),
      net);
  ASSERT_EQ(issues.size(), 5u);
  for (std::size_t k = 0; k < issues.size(); ++k) EXPECT_EQ(issues[k].row, k + 2);
  std::istringstream in(fmt::format("{}0,{},{},-2\n", kHeader, o, d));
  EXPECT_THROW(parse_od(in, net), DataError);
}

TEST(Demand, UtilityValues) {
  EXPECT_DOUBLE_EQ(utility_cav(7, 7, 0, 0), -1.91);
  EXPECT_NEAR(utility_cav(10, 15, 1, 0), 1.095, 1e-12);
  EXPECT_DOUBLE_EQ(utility_cav(3, 9, 1, 0.7, {0, 0, 0}), 0.7);
  EXPECT_EQ(choose_mode(1.095), Mode::CAV);
  EXPECT_EQ(choose_mode(0.0), Mode::SCAV);
  EXPECT_EQ(choose_mode(-1.91), Mode::SCAV);
  const ChoiceParams p;
  EXPECT_EQ(p.asc_cav, -1.91);
  EXPECT_EQ(p.beta_dt, -0.153);
  EXPECT_EQ(p.beta_ratio, 2.24);
}

TEST(Demand, UtilityFallsWithCavTime) {
  for (double t = 0; t < 60; t += 0.5) {
    EXPECT_GT(utility_cav(t, 12, 0.5, 0.1), utility_cav(t + 0.5, 12, 0.5, 0.1));
  }
}

TEST(Demand, ChoiceProbability) {
  EXPECT_EQ(choice_probability(0), 0.5);
  EXPECT_NEAR(choice_probability(50), 1.0, 1e-9);
  EXPECT_NEAR(choice_probability(2), 1.0 / (1.0 + std::exp(-2.0)), 1e-15);
  EXPECT_NEAR(choice_probability(2), 0.880797, 1e-6);
}

TEST(Demand, LogisticDrawsMatchLogit) {
  Rng rng(77);
  for (double v : {-2.0, 0.0, 2.0}) {
    int cav = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) cav += choose_mode(v + rng.logistic()) == Mode::CAV;
    EXPECT_NEAR(double(cav) / n, choice_probability(v), 0.01) << "v=" << v;
  }
}

TEST(Demand, PopulationConservesCellsAndIntervals) {
  const auto net = some_centroids();
  const auto c = net.centroids();
  ODMatrix od(300.0);
  od.add(0, c[0], c[1], 13);
  od.add(2, c[1], c[2], 40);
  od.add(5, c[2], c[0], 1);
  for (const auto draw : {DemandDraw::Exact}) {
    PopulationConfig cfg;
    cfg.draw = draw;
    const auto pop = synthesize_population(od, cfg, 11);
    std::map<ODMatrix::Key, std::uint64_t> seen;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      const auto& t = pop[i];
      EXPECT_EQ(t.id, i);
      ++seen[{t.interval, t.origin, t.destination}];
      EXPECT_GE(t.departure_time, t.interval * 300);
      EXPECT_LT(t.departure_time, (t.interval + 1) * 300);
      EXPECT_TRUE(t.ratio == 0.0 || t.ratio == 0.5 || t.ratio == 1.0);
    }
    EXPECT_EQ(seen, od.entries());
  }
}

TEST(Demand, PopulationIsSeeded) {
  const auto net = some_centroids();
  const auto c = net.centroids();
  ODMatrix od;
  od.add(0, c[0], c[1], 50);
  od.add(1, c[1], c[0], 50);
  const auto a = synthesize_population(od, {}, 3);
  const auto b = synthesize_population(od, {}, 3);
  const auto other = synthesize_population(od, {}, 4);
  ASSERT_EQ(a.size(), b.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].departure_time, b[i].departure_time);
    EXPECT_EQ(a[i].ratio, b[i].ratio);
    EXPECT_EQ(a[i].epsilon, b[i].epsilon);
    differs |= a[i].epsilon != other[i].epsilon;
  }
  EXPECT_TRUE(differs);
}

TEST(Demand, ZeroScaleMeansZeroEpsilon) {
  const auto net = some_centroids();
  ODMatrix od;
  od.add(0, net.centroids()[0], net.centroids()[1], 20);
  PopulationConfig cfg;
  cfg.epsilon_scale = 0.0;
  cfg.ratio.values = {0.0};
  cfg.ratio.weights = {1.0};
  for (const auto& t : synthesize_population(od, cfg, 1)) {
    EXPECT_EQ(t.epsilon, 0.0);
    EXPECT_EQ(t.ratio, 0.0);
  }
}

TEST(Demand, PoissonDrawHasMatchingMean) {
  const auto net = some_centroids();
  ODMatrix od;
  od.add(0, net.centroids()[0], net.centroids()[1], 200);
  PopulationConfig cfg;
  cfg.draw = DemandDraw::Poisson;
  double sum = 0;
  const int reps = 200;
  for (int s = 0; s < reps; ++s) sum += static_cast<double>(synthesize_population(od, cfg, s).size());
  // Standard error of the mean is 1.
  EXPECT_NEAR(sum / reps, 200.0, 4.0);
}

TEST(Demand, InvalidConfig) {
  PopulationConfig cfg;
  cfg.ratio.weights = {1.0, 1.0};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.epsilon_scale = -1;
  EXPECT_THROW(cfg.validate(), ConfigError);
}
