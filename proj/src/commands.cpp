#include "scavsim/commands.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "scavsim/report.hpp"
#include "scavsim/rng.hpp"

namespace fs = std::filesystem;

namespace scavsim::cli {

namespace {

constexpr std::uint64_t kOdStream = 3;

struct Preset {
  GridSpec grid;
  std::size_t intervals;
  std::uint64_t trips_per_interval;
  HorizonConfig horizon;
};

Preset preset_spec(const std::string& name) {
  Preset p;
  if (name == "toronto-like") {
    p.grid = {.rows = 6, .cols = 6, .spacing = 500.0, .speed = 10.0, .jam_capacity = 60.0,
              .centroid_fraction = 0.72};
    p.intervals = 3;
    p.trips_per_interval = 1159;
    p.horizon.max_days = 7;
    p.horizon.fleet_initial = 200;
    p.horizon.fleet_max = 300;
    p.horizon.kappa = 0.248;
    p.horizon.day1_scav_count = 670;
  } else if (name == "grid4") {
    p.grid = {.rows = 4, .cols = 4, .spacing = 400.0, .speed = 10.0, .jam_capacity = 50.0,
              .centroid_fraction = 1.0};
    p.intervals = 2;
    p.trips_per_interval = 150;
    p.horizon.max_days = 5;
    p.horizon.fleet_initial = 20;
    p.horizon.fleet_max = 60;
    p.horizon.day1_scav_count = 60;
  } else {
    throw ConfigError(fmt::format("unknown preset '{}'", name));
  }
  return p;
}

// Trips are drawn from production x attraction weights over ordered centroid pairs.
ODMatrix synth_od(const NetworkGraph& net, const Preset& p, std::uint64_t seed) {
  Rng rng(derive_seed(seed, kOdStream));
  const auto centroids = net.centroids();
  std::vector<double> produce(centroids.size());
  std::vector<double> attract(centroids.size());
  for (auto& w : produce) w = 0.5 + rng.uniform01();
  for (auto& w : attract) w = 0.5 + rng.uniform01();

  std::vector<std::pair<NodeIndex, NodeIndex>> pairs;
  std::vector<double> weights;
  for (std::size_t i = 0; i < centroids.size(); ++i) {
    for (std::size_t j = 0; j < centroids.size(); ++j) {
      if (i == j) continue;
      pairs.emplace_back(centroids[i], centroids[j]);
      weights.push_back(produce[i] * attract[j]);
    }
  }
  ODMatrix od(300.0);
  if (pairs.empty()) return od;
  for (std::size_t k = 0; k < p.intervals; ++k) {
    for (std::uint64_t n = 0; n < p.trips_per_interval; ++n) {
      const auto& [o, d] = pairs[rng.weighted_index(weights)];
      od.add(static_cast<std::int64_t>(k), o, d, 1);
    }
  }
  return od;
}

template <typename Fn>
void write_file(const fs::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  fn(out);
  out.flush();
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
}

void print_day(std::ostream& log, std::size_t day, const DayResult& r) {
  log << fmt::format("{:>3} {:>8} {:>8} {:>6} {:>14.1f} {:>12.3f} {:>10.2f}\n", day, r.demand_cav,
                     r.demand_scav, r.fleet_size, r.total_travel_time, r.total_cav_utility,
                     r.mean_scav_wait);
}

}  // namespace

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"toronto-like", "grid4"};
  return names;
}

GeneratedScenario make_preset(const std::string& preset, std::uint64_t seed, const fs::path& dir) {
  const auto p = preset_spec(preset);
  auto net = generate_grid(p.grid, seed);
  auto od = synth_od(net, p, seed);
  ScenarioFile f;
  f.base_dir = dir;
  f.name = preset;
  f.seed = seed;
  f.nodes = dir / "nodes.csv";
  f.links = dir / "links.csv";
  f.od = dir / "od.csv";
  f.interval_length = od.interval_length();
  f.horizon = p.horizon;
  return {std::move(net), std::move(od), std::move(f)};
}

void write_generated(const GeneratedScenario& g, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  write_file(dir / "nodes.csv", [&](std::ostream& o) { write_nodes(o, g.net); });
  write_file(dir / "links.csv", [&](std::ostream& o) { write_links(o, g.net); });
  write_file(dir / "od.csv", [&](std::ostream& o) { write_od(o, g.od, g.net); });
  write_file(dir / "scenario.txt", [&](std::ostream& o) { write_scenario(o, g.file); });
}

fs::path resolve_output(const RunOptions& opts, const ScenarioFile& file) {
  if (opts.out) return *opts.out;
  if (file.output) return *file.output;
  if (const char* root = std::getenv("SCAVSIM_OUTPUT_ROOT"); root && *root) return fs::path(root) / file.name;
  return fs::path("runs") / file.name;
}

HorizonResult run_to_directory(const Scenario& scenario, const fs::path& dir, bool emit_events,
                               std::ostream& log) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  log << fmt::format("{:>3} {:>8} {:>8} {:>6} {:>14} {:>12} {:>10}\n", "day", "cav", "scav", "fleet",
                     "travel_vehmin", "cav_utility", "wait_min");
  auto result = run_horizon(scenario, [&](std::size_t day, const DayResult& r) {
    print_day(log, day, r);
    write_file(dir / fmt::format("day_{}_travelers.csv", day),
               [&](std::ostream& o) { write_traveler_table(o, r, scenario.net); });
    if (emit_events) {
      write_file(dir / fmt::format("day_{}_events.csv", day),
                 [&](std::ostream& o) { dispatch::write_event_log(o, r.events, scenario.net); });
    }
  });
  write_file(dir / "population.csv",
             [&](std::ostream& o) { write_population(o, result.population, scenario.net); });
  write_file(dir / "horizon.csv", [&](std::ostream& o) { write_horizon_table(o, result.days); });
  if (result.converged_at) {
    log << fmt::format("converged at day {}\n", *result.converged_at);
  } else {
    log << fmt::format("no convergence within {} days\n", result.days.size());
  }
  return result;
}

int cmd_generate(const GenerateOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opts.out.empty()) throw ConfigError("generate needs --out");
    const auto g = make_preset(opts.preset, opts.seed, opts.out);
    write_generated(g, opts.out);
    out << fmt::format("wrote {} ({} nodes, {} links, {} trips)\n", (opts.out / "scenario.txt").string(),
                       g.net.node_count(), g.net.link_count(), g.od.total());
    return int{kOk};
  });
}

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto file = load_scenario_file(opts.scenario);
    if (opts.days) {
      if (*opts.days < 1) throw ConfigError("--days must be at least 1");
      file.horizon.max_days = *opts.days;
    }
    if (opts.parallel < 1) throw ConfigError("--parallel must be at least 1");
    const auto base = build_scenario(file);
    const auto root = resolve_output(opts, file);
    const auto seeds = opts.seeds.empty() ? std::vector<std::uint64_t>{file.seed} : opts.seeds;

    std::vector<std::ostringstream> logs(seeds.size());
    std::vector<std::exception_ptr> failures(seeds.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t k = next++; k < seeds.size(); k = next++) {
        try {
          Scenario s = base;
          s.seed = seeds[k];
          const auto dir = seeds.size() == 1 ? root : root / fmt::format("seed_{}", seeds[k]);
          run_to_directory(s, dir, opts.emit_events, logs[k]);
        } catch (...) {
          failures[k] = std::current_exception();
        }
      }
    };
    const std::size_t workers = std::min(opts.parallel, seeds.size());
    if (workers <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      if (seeds.size() > 1) out << fmt::format("seed {}\n", seeds[k]);
      out << logs[k].str();
      if (failures[k]) std::rethrow_exception(failures[k]);
    }
    out << fmt::format("output: {}\n", root.string());
    return int{kOk};
  });
}

int cmd_report(const fs::path& run_dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    write_report(run_dir);
    std::ifstream in(run_dir / "summary.txt");
    out << in.rdbuf();
    return int{kOk};
  });
}

int cmd_validate(const fs::path& scenario, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto issues = validate_scenario(scenario);
    if (issues.empty()) {
      out << "ok: no violations\n";
    } else {
      out << fmt::format("{} violation(s)\n", issues.size());
      for (const auto& i : issues) out << i.str() << '\n';
    }
    return int{kOk};
  });
}

}  // namespace scavsim::cli
