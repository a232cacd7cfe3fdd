#include "scavsim/demand.hpp"

#include <cmath>

#include <fmt/format.h>

#include "scavsim/rng.hpp"
#include "scavsim/table.hpp"

namespace scavsim {

ODMatrix::ODMatrix(double interval_length) : interval_length_(interval_length) {
  if (!(interval_length > 0.0)) throw ConfigError("OD interval length must be positive");
}

void ODMatrix::add(std::int64_t interval, NodeIndex origin, NodeIndex destination,
                   std::uint64_t count) {
  if (count == 0) return;
  entries_[{interval, origin, destination}] += count;
  total_ += count;
}

std::optional<ODMatrix> parse_od(std::istream& in, const NetworkGraph& net, double interval_length,
                                 std::vector<Issue>& issues, std::string_view source) {
  const auto first_issue = issues.size();
  const auto table = read_table(in, std::string(source), issues);
  if (!expect_columns(table, {"interval_index", "origin_id", "destination_id", "count"}, issues)) {
    return std::nullopt;
  }
  ODMatrix od(interval_length);
  for (const auto& row : table.rows) {
    auto bad = [&](std::string msg) { issues.push_back({table.source, row.line, std::move(msg)}); };
    if (row.fields.size() != 4) {
      bad(fmt::format("expected 4 fields, found {}", row.fields.size()));
      continue;
    }
    const auto interval = parse_int(row.fields[0]);
    const auto o = parse_int(row.fields[1]);
    const auto d = parse_int(row.fields[2]);
    const auto count = parse_int(row.fields[3]);
    if (!interval || !o || !d || !count || *interval < 0) {
      bad("malformed OD row");
      continue;
    }
    if (*count < 0) {
      bad(fmt::format("negative trip count {}", *count));
      continue;
    }
    bool ok = true;
    std::optional<NodeIndex> oi, di;
    for (auto [id, out] : {std::pair{*o, &oi}, std::pair{*d, &di}}) {
      *out = net.find_node(id);
      if (!*out || !net.node(**out).has_depot) {
        bad(fmt::format("intersection {} is not a centroid of the network", id));
        ok = false;
      }
    }
    if (!ok) continue;
    if (*oi == *di) {
      bad(fmt::format("intrazonal trip at centroid {}", *o));
      continue;
    }
    od.add(*interval, *oi, *di, static_cast<std::uint64_t>(*count));
  }
  if (issues.size() != first_issue) return std::nullopt;
  return od;
}

ODMatrix parse_od(std::istream& in, const NetworkGraph& net, double interval_length) {
  std::vector<Issue> issues;
  auto od = parse_od(in, net, interval_length, issues);
  if (!od) throw DataError(std::move(issues));
  return std::move(*od);
}

void write_od(std::ostream& out, const ODMatrix& od, const NetworkGraph& net) {
  out << "interval_index,origin_id,destination_id,count\n";
  for (const auto& [key, count] : od.entries()) {
    const auto& [interval, o, d] = key;
    out << fmt::format("{},{},{},{}\n", interval, net.node(o).id, net.node(d).id, count);
  }
}

const char* to_string(Mode m) { return m == Mode::CAV ? "CAV" : "SCAV"; }

void PopulationConfig::validate() const {
  if (ratio.values.empty() || ratio.values.size() != ratio.weights.size()) {
    throw ConfigError("ratio distribution needs matching, non-empty values and weights");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < ratio.values.size(); ++i) {
    if (!(ratio.values[i] >= 0.0)) throw ConfigError("household ratio values must be >= 0");
    if (!(ratio.weights[i] >= 0.0)) throw ConfigError("ratio weights must be >= 0");
    total += ratio.weights[i];
  }
  if (!(total > 0.0)) throw ConfigError("ratio weights must not all be zero");
  if (!(epsilon_scale >= 0.0) || !std::isfinite(epsilon_scale)) {
    throw ConfigError("epsilon scale must be a finite non-negative number");
  }
}

std::vector<Traveler> synthesize_population(const ODMatrix& od, const PopulationConfig& config,
                                            std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  const auto width = static_cast<std::uint64_t>(std::floor(od.interval_length()));
  std::vector<Traveler> out;
  out.reserve(od.total());
  for (const auto& [key, cell] : od.entries()) {
    const auto& [interval, o, d] = key;
    const auto count = config.draw == DemandDraw::Exact
                           ? cell
                           : rng.poisson(static_cast<double>(cell));
    const auto start = static_cast<Tick>(std::ceil(static_cast<double>(interval) * od.interval_length()));
    for (std::uint64_t k = 0; k < count; ++k) {
      Traveler t;
      t.id = static_cast<TravelerId>(out.size());
      t.origin = o;
      t.destination = d;
      t.interval = interval;
      t.departure_time = start + static_cast<Tick>(rng.below(std::max<std::uint64_t>(width, 1)));
      t.ratio = config.ratio.values[rng.weighted_index(config.ratio.weights)];
      const double eps = rng.logistic();
      t.epsilon = config.epsilon_scale * eps;
      out.push_back(t);
    }
  }
  return out;
}

void write_population(std::ostream& out, std::span<const Traveler> travelers,
                      const NetworkGraph& net) {
  out << "traveler_id,origin_id,destination_id,interval_index,departure_s,ratio,epsilon,"
         "perceived_t_cav_min,perceived_t_scav_min\n";
  for (const auto& t : travelers) {
    out << fmt::format("{},{},{},{},{},{:.4f},{:.6f},{:.4f},{:.4f}\n", t.id, net.node(t.origin).id,
                       net.node(t.destination).id, t.interval, t.departure_time, t.ratio,
                       t.epsilon, t.perceived_t_cav, t.perceived_t_scav);
  }
}

double utility_cav(double t_cav, double t_scav, double ratio, double epsilon,
                   const ChoiceParams& p) {
  return p.asc_cav + p.beta_dt * (t_cav - t_scav) + p.beta_ratio * ratio + epsilon;
}

double choice_probability(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace scavsim
