#include "scavsim/daytoday.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "scavsim/rng.hpp"

namespace scavsim {

namespace {

constexpr std::uint64_t kPopulationStream = 1;
constexpr std::uint64_t kDay1Stream = 2;

void assign_day1(std::span<Traveler> travelers, const Scenario& s) {
  const auto& h = s.horizon;
  std::vector<std::size_t> order(travelers.size());
  std::iota(order.begin(), order.end(), 0);
  if (h.day1_selection == Day1Selection::LowestUtility) {
    std::vector<double> u(travelers.size());
    for (std::size_t i = 0; i < travelers.size(); ++i) {
      const auto& t = travelers[i];
      u[i] = utility_cav(t.perceived_t_cav, t.perceived_t_scav, t.ratio, t.epsilon, s.choice);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return u[a] != u[b] ? u[a] < u[b] : travelers[a].id < travelers[b].id;
    });
  } else {
    Rng rng(derive_seed(s.seed, kDay1Stream));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  }
  for (auto& t : travelers) t.chosen_mode = Mode::CAV;
  for (std::size_t k = 0; k < h.day1_scav_count; ++k) travelers[order[k]].chosen_mode = Mode::SCAV;
}

}  // namespace

void HorizonConfig::validate() const {
  if (max_days < 1) throw ConfigError("horizon needs at least one day");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in [0, 1]");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ConfigError("kappa must be positive");
  if (!(fleet_min <= fleet_initial && fleet_initial <= fleet_max)) {
    throw ConfigError("fleet bounds must satisfy fleet_min <= fleet_initial <= fleet_max");
  }
  if (!(initial_wait_guess >= 0.0) || !std::isfinite(initial_wait_guess)) {
    throw ConfigError("initial wait guess must be non-negative");
  }
}

void initialize_perceptions(std::span<Traveler> travelers, const NetworkGraph& net,
                            double initial_wait_guess) {
  const auto cost = free_flow_costs(net);
  std::map<NodeIndex, std::vector<double>> to_dest;
  for (auto& t : travelers) {
    auto it = to_dest.find(t.destination);
    if (it == to_dest.end()) it = to_dest.emplace(t.destination, distances_to(net, t.destination, cost)).first;
    const double seconds = it->second[t.origin];
    if (!std::isfinite(seconds)) {
      throw DataError(fmt::format("traveler {}: destination {} unreachable from origin {}", t.id,
                                  net.node(t.destination).id, net.node(t.origin).id));
    }
    t.perceived_t_cav = seconds / 60.0;
    t.perceived_t_scav = t.perceived_t_cav + initial_wait_guess;
  }
}

void update_perceptions(std::span<Traveler> travelers, const DayResult& result, double lambda) {
  struct Mean {
    double sum = 0.0;
    std::size_t n = 0;
    std::optional<double> value() const {
      if (n == 0) return std::nullopt;
      return sum / static_cast<double>(n);
    }
  };
  auto slot = [](Mode m) { return m == Mode::CAV ? 0 : 1; };
  std::map<NodeIndex, std::array<Mean, 2>> by_origin;
  std::array<Mean, 2> global;
  for (const auto& rec : result.travelers) {
    auto& m = by_origin[rec.origin][slot(rec.mode)];
    m.sum += rec.total_min;
    ++m.n;
    global[slot(rec.mode)].sum += rec.total_min;
    ++global[slot(rec.mode)].n;
  }

  auto smooth = [lambda](double old, double seen) { return (1.0 - lambda) * old + lambda * seen; };
  for (auto& t : travelers) {
    const auto times = traveler_times(result, t.id);
    t.experienced_time = times.total;
    const Mode other = t.chosen_mode == Mode::CAV ? Mode::SCAV : Mode::CAV;
    double& chosen = t.chosen_mode == Mode::CAV ? t.perceived_t_cav : t.perceived_t_scav;
    double& unchosen = t.chosen_mode == Mode::CAV ? t.perceived_t_scav : t.perceived_t_cav;
    chosen = smooth(chosen, times.total);

    std::optional<double> proxy;
    if (const auto it = by_origin.find(t.origin); it != by_origin.end()) {
      proxy = it->second[slot(other)].value();
    }
    if (!proxy) proxy = global[slot(other)].value();
    if (proxy) unchosen = smooth(unchosen, *proxy);
  }
}

std::size_t update_fleet(std::size_t prev_scav_demand, const HorizonConfig& cfg) {
  const double target = std::floor(cfg.kappa * static_cast<double>(prev_scav_demand) + 0.5);
  const double lo = static_cast<double>(cfg.fleet_min);
  const double hi = static_cast<double>(cfg.fleet_max);
  return static_cast<std::size_t>(std::clamp(target, lo, hi));
}

bool check_convergence(std::span<const std::pair<std::size_t, std::size_t>> history) {
  if (history.size() < 2) return false;
  return history[history.size() - 1] == history[history.size() - 2];
}

HorizonResult run_horizon(const Scenario& s, const DayCallback& on_day) {
  s.horizon.validate();
  s.day.validate();
  HorizonResult out;
  auto travelers = synthesize_population(s.od, s.population, derive_seed(s.seed, kPopulationStream));
  if (s.horizon.day1_scav_count > travelers.size()) {
    throw ConfigError(fmt::format("day-1 SCAV count {} exceeds the population of {}",
                                  s.horizon.day1_scav_count, travelers.size()));
  }
  initialize_perceptions(travelers, s.net, s.horizon.initial_wait_guess);
  out.population = travelers;

  DayConfig day_cfg = s.day;
  day_cfg.choice = s.choice;
  std::vector<std::pair<std::size_t, std::size_t>> history;
  for (std::size_t day = 1; day <= s.horizon.max_days; ++day) {
    std::size_t fleet = s.horizon.fleet_initial;
    if (day == 1) {
      assign_day1(travelers, s);
    } else {
      for (auto& t : travelers) {
        t.chosen_mode = choose_mode(
            utility_cav(t.perceived_t_cav, t.perceived_t_scav, t.ratio, t.epsilon, s.choice));
      }
      fleet = update_fleet(out.days.back().demand_scav, s.horizon);
    }
    auto result = run_day(s.net, travelers, fleet, day_cfg);
    update_perceptions(travelers, result, s.horizon.lambda);
    history.emplace_back(result.demand_cav, result.demand_scav);
    out.days.push_back(std::move(result));
    if (on_day) on_day(day, out.days.back());
    if (check_convergence(history)) {
      out.converged_at = day;
      break;
    }
    if (travelers.empty()) break;
  }
  return out;
}

void write_horizon_table(std::ostream& out, std::span<const DayResult> days) {
  out << "day,demand_cav,demand_scav,fleet_size,total_travel_time_vehmin,total_cav_utility,"
         "normalized_cav_utility,mean_scav_wait\n";
  const double base = days.empty() ? 0.0 : days.front().total_cav_utility;
  for (std::size_t i = 0; i < days.size(); ++i) {
    const auto& d = days[i];
    const auto normalized = base != 0.0 ? fmt::format("{:.6f}", d.total_cav_utility / base)
                                        : std::string("nan");
    out << fmt::format("{},{},{},{},{:.4f},{:.6f},{},{:.4f}\n", i + 1, d.demand_cav, d.demand_scav,
                       d.fleet_size, d.total_travel_time, d.total_cav_utility, normalized,
                       d.mean_scav_wait);
  }
}

}  // namespace scavsim
