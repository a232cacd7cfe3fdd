#include "scavsim/scenario.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "scavsim/table.hpp"

namespace fs = std::filesystem;

namespace scavsim {

namespace {

using Setter = std::function<std::optional<std::string>(ScenarioFile&, std::string_view)>;

std::optional<std::string> set_double(double& dst, std::string_view v) {
  const auto x = parse_double(v);
  if (!x) return "expected a number";
  dst = *x;
  return std::nullopt;
}

std::optional<std::string> set_count(std::size_t& dst, std::string_view v) {
  const auto x = parse_int(v);
  if (!x || *x < 0) return "expected a non-negative integer";
  dst = static_cast<std::size_t>(*x);
  return std::nullopt;
}

std::optional<std::string> set_u64(std::uint64_t& dst, std::string_view v) {
  const auto x = parse_int(v);
  if (!x || *x < 0) return "expected a non-negative integer";
  dst = static_cast<std::uint64_t>(*x);
  return std::nullopt;
}

std::optional<std::string> set_bool(bool& dst, std::string_view v) {
  if (v == "true" || v == "1") dst = true;
  else if (v == "false" || v == "0") dst = false;
  else return "expected true or false";
  return std::nullopt;
}

std::optional<std::string> set_list(std::vector<double>& dst, std::string_view v) {
  std::vector<double> out;
  for (const auto& part : split(v, ',')) {
    const auto x = parse_double(part);
    if (!x) return "expected a comma-separated list of numbers";
    out.push_back(*x);
  }
  dst = std::move(out);
  return std::nullopt;
}

GridSpec& grid_of(ScenarioFile& f) {
  if (!f.grid) f.grid = GridSpec{};
  return *f.grid;
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"name", [](ScenarioFile& f, std::string_view v) -> std::optional<std::string> {
         if (v.empty()) return "name must not be empty";
         f.name = v;
         return std::nullopt;
       }},
      {"seed", [](ScenarioFile& f, std::string_view v) { return set_u64(f.seed, v); }},
      {"output", [](ScenarioFile& f, std::string_view v) -> std::optional<std::string> {
         f.output = f.base_dir / fs::path(std::string(v));
         return std::nullopt;
       }},
      {"network.nodes", [](ScenarioFile& f, std::string_view v) -> std::optional<std::string> {
         f.nodes = f.base_dir / fs::path(std::string(v));
         return std::nullopt;
       }},
      {"network.links", [](ScenarioFile& f, std::string_view v) -> std::optional<std::string> {
         f.links = f.base_dir / fs::path(std::string(v));
         return std::nullopt;
       }},
      {"grid.rows", [](ScenarioFile& f, std::string_view v) { return set_count(grid_of(f).rows, v); }},
      {"grid.cols", [](ScenarioFile& f, std::string_view v) { return set_count(grid_of(f).cols, v); }},
      {"grid.spacing", [](ScenarioFile& f, std::string_view v) { return set_double(grid_of(f).spacing, v); }},
      {"grid.speed", [](ScenarioFile& f, std::string_view v) { return set_double(grid_of(f).speed, v); }},
      {"grid.jam_capacity",
       [](ScenarioFile& f, std::string_view v) { return set_double(grid_of(f).jam_capacity, v); }},
      {"grid.centroid_fraction",
       [](ScenarioFile& f, std::string_view v) { return set_double(grid_of(f).centroid_fraction, v); }},
      {"grid.seed", [](ScenarioFile& f, std::string_view v) {
         grid_of(f);
         return set_u64(f.grid_seed, v);
       }},
      {"demand.od", [](ScenarioFile& f, std::string_view v) -> std::optional<std::string> {
         f.od = f.base_dir / fs::path(std::string(v));
         return std::nullopt;
       }},
      {"demand.interval_length",
       [](ScenarioFile& f, std::string_view v) { return set_double(f.interval_length, v); }},
      {"demand.draw", [](ScenarioFile& f, std::string_view v) -> std::optional<std::string> {
         if (v == "exact") f.population.draw = DemandDraw::Exact;
         else if (v == "poisson") f.population.draw = DemandDraw::Poisson;
         else return "expected exact or poisson";
         return std::nullopt;
       }},
      {"demand.ratio_values",
       [](ScenarioFile& f, std::string_view v) { return set_list(f.population.ratio.values, v); }},
      {"demand.ratio_weights",
       [](ScenarioFile& f, std::string_view v) { return set_list(f.population.ratio.weights, v); }},
      {"demand.epsilon_scale",
       [](ScenarioFile& f, std::string_view v) { return set_double(f.population.epsilon_scale, v); }},
      {"choice.asc_cav", [](ScenarioFile& f, std::string_view v) { return set_double(f.choice.asc_cav, v); }},
      {"choice.beta_dt", [](ScenarioFile& f, std::string_view v) { return set_double(f.choice.beta_dt, v); }},
      {"choice.beta_ratio",
       [](ScenarioFile& f, std::string_view v) { return set_double(f.choice.beta_ratio, v); }},
      {"horizon.max_days", [](ScenarioFile& f, std::string_view v) { return set_count(f.horizon.max_days, v); }},
      {"horizon.lambda", [](ScenarioFile& f, std::string_view v) { return set_double(f.horizon.lambda, v); }},
      {"horizon.kappa", [](ScenarioFile& f, std::string_view v) { return set_double(f.horizon.kappa, v); }},
      {"horizon.fleet_initial",
       [](ScenarioFile& f, std::string_view v) { return set_count(f.horizon.fleet_initial, v); }},
      {"horizon.fleet_min", [](ScenarioFile& f, std::string_view v) { return set_count(f.horizon.fleet_min, v); }},
      {"horizon.fleet_max", [](ScenarioFile& f, std::string_view v) { return set_count(f.horizon.fleet_max, v); }},
      {"horizon.day1_scav_count",
       [](ScenarioFile& f, std::string_view v) { return set_count(f.horizon.day1_scav_count, v); }},
      {"horizon.day1_selection", [](ScenarioFile& f, std::string_view v) -> std::optional<std::string> {
         if (v == "lowest_utility") f.horizon.day1_selection = Day1Selection::LowestUtility;
         else if (v == "random") f.horizon.day1_selection = Day1Selection::Random;
         else return "expected lowest_utility or random";
         return std::nullopt;
       }},
      {"horizon.initial_wait_guess",
       [](ScenarioFile& f, std::string_view v) { return set_double(f.horizon.initial_wait_guess, v); }},
      {"sim.speed_floor", [](ScenarioFile& f, std::string_view v) { return set_double(f.day.speed_floor, v); }},
      {"sim.cycle_length", [](ScenarioFile& f, std::string_view v) -> std::optional<std::string> {
         const auto x = parse_int(v);
         if (!x || *x <= 0) return "expected a positive integer (seconds)";
         f.day.cycle_length = *x;
         return std::nullopt;
       }},
      {"sim.dwell", [](ScenarioFile& f, std::string_view v) -> std::optional<std::string> {
         const auto x = parse_int(v);
         if (!x || *x < 0) return "expected a non-negative integer (seconds)";
         f.day.dwell = *x;
         return std::nullopt;
       }},
      {"sim.count_empty_movement",
       [](ScenarioFile& f, std::string_view v) { return set_bool(f.day.count_empty_movement, v); }},
  };
  return table;
}

template <typename Fn>
void check(std::vector<Issue>& issues, std::string_view source, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    issues.push_back({std::string(source), 0, e.what()});
  }
}

std::string relative_to(const fs::path& p, const fs::path& base) {
  if (base.empty()) return p.generic_string();
  auto rel = p.lexically_relative(base);
  return rel.empty() ? p.generic_string() : rel.generic_string();
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + fmt::format("{}", xs[i]);
  return out;
}

}  // namespace

ScenarioFile parse_scenario(std::istream& in, const fs::path& base_dir, std::vector<Issue>& issues,
                            std::string_view source) {
  ScenarioFile f;
  f.base_dir = base_dir;
  std::map<std::string, std::size_t, std::less<>> seen;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      issues.push_back({std::string(source), number, "expected 'key = value'"});
      continue;
    }
    const auto key = trim(body.substr(0, eq));
    const auto value = trim(body.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      issues.push_back({std::string(source), number, fmt::format("unknown key '{}'", key)});
      continue;
    }
    if (const auto prev = seen.find(key); prev != seen.end()) {
      issues.push_back({std::string(source), number,
                        fmt::format("key '{}' repeats line {}", key, prev->second)});
      continue;
    }
    seen.emplace(std::string(key), number);
    if (auto err = it->second(f, value)) {
      issues.push_back({std::string(source), number, fmt::format("{}: {}", key, *err)});
    }
  }

  const bool file_net = f.nodes || f.links;
  if (file_net && f.grid) {
    issues.push_back({std::string(source), 0, "specify either network.* files or grid.* parameters, not both"});
  } else if (!file_net && !f.grid) {
    issues.push_back({std::string(source), 0, "no network: set network.nodes/network.links or grid.*"});
  } else if (file_net && (!f.nodes || !f.links)) {
    issues.push_back({std::string(source), 0, "network.nodes and network.links must be given together"});
  }
  if (!f.od) issues.push_back({std::string(source), 0, "missing required key demand.od"});

  check(issues, source, [&] { f.population.validate(); });
  check(issues, source, [&] { f.horizon.validate(); });
  check(issues, source, [&] { f.day.validate(); });
  if (!(f.interval_length > 0.0)) {
    issues.push_back({std::string(source), 0, "demand.interval_length must be positive"});
  }
  return f;
}

ScenarioFile load_scenario_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open scenario file {}", path.string()));
  std::vector<Issue> issues;
  auto f = parse_scenario(in, path.parent_path(), issues, path.string());
  if (!issues.empty()) {
    std::string msg;
    for (const auto& i : issues) msg += (msg.empty() ? "" : "\n") + i.str();
    throw ConfigError(msg);
  }
  return f;
}

void write_scenario(std::ostream& out, const ScenarioFile& f) {
  const auto& b = f.base_dir;
  out << "# SCAV market scenario\n";
  out << fmt::format("name = {}\n", f.name);
  out << fmt::format("seed = {}\n", f.seed);
  if (f.output) out << fmt::format("output = {}\n", relative_to(*f.output, b));
  out << '\n';
  if (f.grid) {
    out << fmt::format("grid.rows = {}\ngrid.cols = {}\ngrid.spacing = {}\ngrid.speed = {}\n",
                       f.grid->rows, f.grid->cols, f.grid->spacing, f.grid->speed);
    out << fmt::format("grid.jam_capacity = {}\ngrid.centroid_fraction = {}\ngrid.seed = {}\n",
                       f.grid->jam_capacity, f.grid->centroid_fraction, f.grid_seed);
  } else {
    if (f.nodes) out << fmt::format("network.nodes = {}\n", relative_to(*f.nodes, b));
    if (f.links) out << fmt::format("network.links = {}\n", relative_to(*f.links, b));
  }
  out << '\n';
  if (f.od) out << fmt::format("demand.od = {}\n", relative_to(*f.od, b));
  out << fmt::format("demand.interval_length = {}\n", f.interval_length);
  out << fmt::format("demand.draw = {}\n", f.population.draw == DemandDraw::Exact ? "exact" : "poisson");
  out << fmt::format("demand.ratio_values = {}\n", join(f.population.ratio.values));
  out << fmt::format("demand.ratio_weights = {}\n", join(f.population.ratio.weights));
  out << fmt::format("demand.epsilon_scale = {}\n\n", f.population.epsilon_scale);
  out << fmt::format("choice.asc_cav = {}\nchoice.beta_dt = {}\nchoice.beta_ratio = {}\n\n",
                     f.choice.asc_cav, f.choice.beta_dt, f.choice.beta_ratio);
  const auto& h = f.horizon;
  out << fmt::format("horizon.max_days = {}\nhorizon.lambda = {}\nhorizon.kappa = {}\n", h.max_days,
                     h.lambda, h.kappa);
  out << fmt::format("horizon.fleet_initial = {}\nhorizon.fleet_min = {}\nhorizon.fleet_max = {}\n",
                     h.fleet_initial, h.fleet_min, h.fleet_max);
  out << fmt::format("horizon.day1_scav_count = {}\nhorizon.day1_selection = {}\n", h.day1_scav_count,
                     h.day1_selection == Day1Selection::LowestUtility ? "lowest_utility" : "random");
  out << fmt::format("horizon.initial_wait_guess = {}\n\n", h.initial_wait_guess);
  out << fmt::format("sim.speed_floor = {}\nsim.cycle_length = {}\nsim.dwell = {}\n",
                     f.day.speed_floor, f.day.cycle_length, f.day.dwell);
  out << fmt::format("sim.count_empty_movement = {}\n", f.day.count_empty_movement ? "true" : "false");
}

namespace {

std::ifstream open_data(const fs::path& p, std::vector<Issue>& issues) {
  std::ifstream in(p);
  if (!in) issues.push_back({p.string(), 0, "cannot open data file"});
  return in;
}

// Shared by build_scenario (throws) and validate_scenario (collects).
std::optional<Scenario> assemble(const ScenarioFile& f, std::vector<Issue>& issues) {
  std::optional<NetworkGraph> net;
  if (f.grid) {
    try {
      net = generate_grid(*f.grid, f.grid_seed);
    } catch (const ConfigError& e) {
      issues.push_back({"grid", 0, e.what()});
    }
  } else if (f.nodes && f.links) {
    auto nodes = open_data(*f.nodes, issues);
    auto links = open_data(*f.links, issues);
    if (nodes && links) net = parse_network(nodes, links, issues, f.nodes->string(), f.links->string());
  }
  if (!net || !f.od) return std::nullopt;
  auto od_in = open_data(*f.od, issues);
  if (!od_in) return std::nullopt;
  auto od = parse_od(od_in, *net, f.interval_length, issues, f.od->string());
  if (!od) return std::nullopt;
  if (f.population.draw == DemandDraw::Exact && f.horizon.day1_scav_count > od->total()) {
    issues.push_back({"scenario", 0,
                      fmt::format("horizon.day1_scav_count {} exceeds total demand {}",
                                  f.horizon.day1_scav_count, od->total())});
  }
  return Scenario{std::move(*net), std::move(*od), f.population, f.choice, f.horizon, f.day, f.seed};
}

}  // namespace

Scenario build_scenario(const ScenarioFile& f) {
  std::vector<Issue> issues;
  auto s = assemble(f, issues);
  if (!issues.empty() || !s) throw DataError(std::move(issues));
  return std::move(*s);
}

std::vector<Issue> validate_scenario(const fs::path& path) {
  std::vector<Issue> issues;
  std::ifstream in(path);
  if (!in) {
    issues.push_back({path.string(), 0, "cannot open scenario file"});
    return issues;
  }
  const auto f = parse_scenario(in, path.parent_path(), issues, path.string());
  assemble(f, issues);
  return issues;
}

}  // namespace scavsim
