#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <sys/wait.h>

#include "fixtures.hpp"
#include "scavsim/commands.hpp"
#include "scavsim/report.hpp"

using namespace scavsim;
using scavsim::testing::fresh_dir;
using scavsim::testing::slurp;
namespace fs = std::filesystem;

namespace {

int shell(const std::string& args) {
  const std::string cmd = std::string(SCAVSIM_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t count_lines(const std::string& s) { return std::count(s.begin(), s.end(), '\n'); }

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

fs::path generate(const std::string& name, const std::string& preset, std::uint64_t seed) {
  const auto dir = fresh_dir(name);
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_generate({preset, dir, seed}, out, err), 0) << err.str();
  return dir;
}

const char* kHorizonHeader =
    "day,demand_cav,demand_scav,fleet_size,total_travel_time_vehmin,total_cav_utility,"
    "normalized_cav_utility,mean_scav_wait\n";

}  // namespace

TEST(Cli, TorontoLikePreset) {
  const auto dir = generate("preset", "toronto-like", 11);
  std::ifstream nodes(dir / "nodes.csv"), links(dir / "links.csv"), od(dir / "od.csv");
  const auto net = parse_network(nodes, links);
  EXPECT_EQ(net.node_count(), 36u);
  EXPECT_EQ(net.centroids().size(), 26u);
  const auto m = parse_od(od, net);
  EXPECT_EQ(m.total(), 3477u);
  std::set<std::int64_t> intervals;
  for (const auto& [k, v] : m.entries()) intervals.insert(std::get<0>(k));
  EXPECT_EQ(intervals.size(), 3u);
  const auto f = load_scenario_file(dir / "scenario.txt");
  EXPECT_EQ(f.horizon.fleet_initial, 200u);
  EXPECT_EQ(f.horizon.fleet_max, 300u);
  EXPECT_EQ(f.horizon.kappa, 0.248);
  EXPECT_EQ(f.horizon.max_days, 7u);
}

TEST(Cli, Grid4Preset) {
  const auto dir = generate("grid4", "grid4", 1);
  EXPECT_EQ(count_lines(slurp(dir / "nodes.csv")), 17u);
  EXPECT_EQ(count_lines(slurp(dir / "links.csv")), 49u);
}

TEST(Cli, GenerateIsByteIdentical) {
  const auto a = generate("gen_a", "toronto-like", 5);
  const auto b = generate("gen_b", "toronto-like", 5);
  const auto c = generate("gen_c", "toronto-like", 6);
  for (const char* f : {"nodes.csv", "links.csv", "od.csv", "scenario.txt"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  EXPECT_NE(slurp(a / "od.csv"), slurp(c / "od.csv"));
  EXPECT_EQ(shell("generate --preset nope --out " + (a / "x").string()), cli::kConfigError);
}

TEST(Cli, RunWritesSevenDays) {
  const auto dir = generate("run7", "toronto-like", 2);
  const auto out = dir / "out";
  ASSERT_EQ(shell("run --scenario " + (dir / "scenario.txt").string() + " --out " + out.string()), 0);
  EXPECT_EQ(count_lines(slurp(out / "horizon.csv")), 8u);
  EXPECT_EQ(count_lines(slurp(out / "population.csv")), 3478u);
  for (int d = 1; d <= 7; ++d) EXPECT_TRUE(fs::exists(out / ("day_" + std::to_string(d) + "_travelers.csv")));
  EXPECT_FALSE(fs::exists(out / "day_1_events.csv"));
  ASSERT_EQ(shell("report --out " + out.string()), 0);
  for (const char* f : {"demand.svg", "fleet.svg", "utility.svg", "travel_time.svg", "summary.txt"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
}

TEST(Cli, RunIsByteIdentical) {
  const auto dir = generate("det", "grid4", 3);
  const auto scenario = (dir / "scenario.txt").string();
  ASSERT_EQ(shell("run --scenario " + scenario + " --emit-events --out " + (dir / "a").string()), 0);
  ASSERT_EQ(shell("run --scenario " + scenario + " --emit-events --out " + (dir / "b").string()), 0);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir / "a")) {
    EXPECT_EQ(slurp(e.path()), slurp(dir / "b" / e.path().filename())) << e.path();
    ++files;
  }
  EXPECT_GT(files, 3u);
  EXPECT_TRUE(fs::exists(dir / "a" / "day_1_events.csv"));
}

TEST(Cli, SeedsFanOut) {
  const auto dir = generate("fan", "grid4", 3);
  const auto scenario = (dir / "scenario.txt").string();
  ASSERT_EQ(shell("run --scenario " + scenario + " --seed 4 --seed 9 --parallel 2 --days 2 --out " +
                  (dir / "par").string()),
            0);
  ASSERT_EQ(shell("run --scenario " + scenario + " --seed 9 --days 2 --out " + (dir / "one").string()), 0);
  EXPECT_EQ(slurp(dir / "par" / "seed_9" / "horizon.csv"), slurp(dir / "one" / "horizon.csv"));
  EXPECT_NE(slurp(dir / "par" / "seed_4" / "horizon.csv"), slurp(dir / "par" / "seed_9" / "horizon.csv"));
  EXPECT_EQ(count_lines(slurp(dir / "one" / "horizon.csv")), 3u);
}

TEST(Cli, OutputRoot) {
  const auto dir = generate("root", "grid4", 3);
  auto f = load_scenario_file(dir / "scenario.txt");
  cli::RunOptions opts;
  ::setenv("SCAVSIM_OUTPUT_ROOT", (dir / "env").c_str(), 1);
  EXPECT_EQ(cli::resolve_output(opts, f), dir / "env" / "grid4");
  ::unsetenv("SCAVSIM_OUTPUT_ROOT");
  EXPECT_EQ(cli::resolve_output(opts, f), fs::path("runs") / "grid4");
  f.output = dir / "fixed";
  EXPECT_EQ(cli::resolve_output(opts, f), dir / "fixed");
  opts.out = dir / "flag";
  EXPECT_EQ(cli::resolve_output(opts, f), dir / "flag");
}

TEST(Cli, EmptyDemandRun) {
  const auto dir = generate("empty", "grid4", 1);
  write(dir / "od.csv", "interval_index,origin_id,destination_id,count\n");
  auto text = slurp(dir / "scenario.txt");
  text.replace(text.find("horizon.day1_scav_count = 60"), 28, "horizon.day1_scav_count = 0");
  write(dir / "scenario.txt", text);
  ASSERT_EQ(shell("run --scenario " + (dir / "scenario.txt").string() + " --out " + (dir / "o").string()), 0);
  const auto h = slurp(dir / "o" / "horizon.csv");
  EXPECT_EQ(count_lines(h), 2u);
  EXPECT_NE(h.find("\n1,0,0,20,0.0000,0.000000,nan,0.0000\n"), std::string::npos) << h;
}

TEST(Cli, ErrorCategories) {
  const auto dir = generate("errors", "grid4", 1);
  const auto scenario = (dir / "scenario.txt").string();
  fs::remove(dir / "links.csv");
  EXPECT_EQ(shell("run --scenario " + scenario + " --out " + (dir / "o").string()), cli::kDataError);
  EXPECT_EQ(shell("run --scenario " + (dir / "missing.txt").string()), cli::kConfigError);
  EXPECT_EQ(shell("run"), cli::kConfigError);
  EXPECT_EQ(shell("frobnicate"), cli::kConfigError);

  write(dir / "bad.txt", "demand.od = od.csv\nnetwork.nodes = nodes.csv\nnetwork.links = links.csv\nhorizon.lambda = 2\n");
  EXPECT_EQ(shell("run --scenario " + (dir / "bad.txt").string()), cli::kConfigError);
  write(dir / "typo.txt", "demand.od = od.csv\ngrid.rows = 3\nhorizon.lamda = 0.5\n");
  EXPECT_EQ(shell("run --scenario " + (dir / "typo.txt").string()), cli::kConfigError);

  // SCAV requests arrive but there is no fleet to serve them.
  const auto stuck = fresh_dir("stuck");
  write(stuck / "s.txt",
        "demand.od = od.csv\ngrid.rows = 2\ngrid.cols = 2\nhorizon.fleet_initial = 0\nhorizon.fleet_min = 0\n"
        "horizon.fleet_max = 1\nhorizon.day1_scav_count = 2\nhorizon.max_days = 1\n");
  write(stuck / "od.csv", "interval_index,origin_id,destination_id,count\n0,0,1,2\n");
  EXPECT_EQ(shell("run --scenario " + (stuck / "s.txt").string() + " --out " + (stuck / "o").string()),
            cli::kRuntimeError);
}

TEST(Cli, ScenarioRoundTrip) {
  const auto dir = generate("rt", "toronto-like", 1);
  const auto f = load_scenario_file(dir / "scenario.txt");
  std::ostringstream out;
  write_scenario(out, f);
  EXPECT_EQ(out.str(), slurp(dir / "scenario.txt"));
}

TEST(Cli, ValidateListsViolations) {
  const auto dir = generate("validate", "toronto-like", 1);
  const auto scenario = dir / "scenario.txt";
  EXPECT_TRUE(validate_scenario(scenario).empty());

  std::ifstream nodes(dir / "nodes.csv"), links(dir / "links.csv");
  const auto net = parse_network(nodes, links);
  NodeId plain = -1;
  for (const auto& n : net.intersections()) {
    if (!n.has_depot) plain = n.id;
  }
  const auto first = net.node(net.centroids()[0]).id;
  auto od = slurp(dir / "od.csv");
  write(dir / "od.csv", od + "2," + std::to_string(plain) + "," + std::to_string(first) + ",3\n");
  const auto with_bad_od = validate_scenario(scenario);
  ASSERT_EQ(with_bad_od.size(), 1u);
  EXPECT_NE(with_bad_od[0].message.find("not a centroid"), std::string::npos);
  write(dir / "od.csv", od);

  // Cut every link into the first centroid.
  std::istringstream in(slurp(dir / "links.csv"));
  std::string line, kept;
  std::getline(in, line);
  kept = line + "\n";
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string id, from, to;
    std::getline(row, id, ',');
    std::getline(row, from, ',');
    std::getline(row, to, ',');
    if (to != std::to_string(first)) kept += line + "\n";
  }
  write(dir / "links.csv", kept);
  const auto cut = validate_scenario(scenario);
  ASSERT_FALSE(cut.empty());
  bool connectivity = false;
  for (const auto& i : cut) connectivity |= i.message.find("reach") != std::string::npos;
  EXPECT_TRUE(connectivity);

  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_validate(scenario, out, err), 0);
  EXPECT_NE(out.str().find("violation"), std::string::npos);
}

TEST(Report, PercentChanges) {
  EXPECT_EQ(percent_change(670, 959), "+43%");
  EXPECT_EQ(percent_change(2807, 2518), "-10%");
  EXPECT_EQ(percent_change(200, 238), "+19%");
  EXPECT_EQ(percent_change(35675, 33220), "-7%");
  EXPECT_EQ(percent_change(0, 5), "n/a");
  EXPECT_EQ(percent_change(5, 5), "+0%");
}

TEST(Report, SummaryFromCsv) {
  const auto dir = fresh_dir("report");
  write(dir / "horizon.csv", std::string(kHorizonHeader) +
                                 "1,2807,670,200,35675.0000,100.000000,1.000000,3.0000\n"
                                 "2,2600,877,166,34000.0000,90.000000,0.900000,4.0000\n"
                                 "3,2518,959,238,33220.0000,80.000000,0.800000,3.5000\n");
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_report(dir, out, err), 0) << err.str();
  const auto summary = slurp(dir / "summary.txt");
  EXPECT_NE(summary.find("SCAV demand: 670 -> 959 (+43%)"), std::string::npos) << summary;
  EXPECT_NE(summary.find("CAV demand: 2807 -> 2518 (-10%)"), std::string::npos);
  EXPECT_NE(summary.find("fleet size: 200 -> 238 (+19%)"), std::string::npos);
  EXPECT_NE(summary.find("(-7%)"), std::string::npos);
  const auto svg = slurp(dir / "demand.svg");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  std::size_t circles = 0;
  for (auto p = svg.find("<circle"); p != std::string::npos; p = svg.find("<circle", p + 1)) ++circles;
  EXPECT_EQ(circles, 6u);
}

TEST(Report, SingleDay) {
  const auto dir = fresh_dir("report1");
  write(dir / "horizon.csv", std::string(kHorizonHeader) + "1,10,5,3,12.5000,4.000000,1.000000,0.5000\n");
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_report(dir, out, err), 0);
  EXPECT_EQ(slurp(dir / "summary.txt").find('%'), std::string::npos);
  const auto svg = slurp(dir / "fleet.svg");
  std::size_t circles = 0;
  for (auto p = svg.find("<circle"); p != std::string::npos; p = svg.find("<circle", p + 1)) ++circles;
  EXPECT_EQ(circles, 1u);
}

TEST(Report, RejectsBrokenRunDirectory) {
  const auto dir = fresh_dir("report_bad");
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_report(dir, out, err), cli::kDataError);
  write(dir / "horizon.csv", std::string(kHorizonHeader) + "1,10,5,3,x,4,1,0.5\n");
  EXPECT_EQ(cli::cmd_report(dir, out, err), cli::kDataError);
  write(dir / "horizon.csv", std::string(kHorizonHeader) + "2,10,5,3,1,4,1,0.5\n");
  EXPECT_EQ(cli::cmd_report(dir, out, err), cli::kDataError);
  write(dir / "horizon.csv", "day,demand_cav\n1,3\n");
  EXPECT_EQ(cli::cmd_report(dir, out, err), cli::kDataError);
}
