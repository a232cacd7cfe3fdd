#include "scavsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "scavsim/common.hpp"
#include "scavsim/table.hpp"

namespace fs = std::filesystem;

namespace scavsim {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tick_label(double v) {
  if (std::fabs(v) >= 100.0 || v == std::floor(v)) return fmt::format("{:.0f}", v);
  return fmt::format("{:.3g}", v);
}

}  // namespace

std::vector<HorizonRow> read_horizon_table(std::istream& in, std::string source) {
  std::vector<Issue> issues;
  const auto table = read_table(in, source, issues);
  if (!issues.empty()) throw DataError(std::move(issues));
  if (!expect_columns(table,
                      {"day", "demand_cav", "demand_scav", "fleet_size", "total_travel_time_vehmin",
                       "total_cav_utility", "normalized_cav_utility", "mean_scav_wait"},
                      issues)) {
    throw DataError(std::move(issues));
  }
  std::vector<HorizonRow> rows;
  for (const auto& r : table.rows) {
    auto bad = [&](std::string_view what) {
      issues.push_back({source, r.line, fmt::format("malformed {}", what)});
    };
    if (r.fields.size() != table.header.size()) {
      bad("row");
      continue;
    }
    auto count = [&](std::size_t col, std::string_view name) -> std::size_t {
      const auto v = parse_int(r.fields[col]);
      if (!v || *v < 0) {
        bad(name);
        return 0;
      }
      return static_cast<std::size_t>(*v);
    };
    auto real = [&](std::size_t col, std::string_view name) -> double {
      const auto v = parse_double(r.fields[col]);
      if (!v) {
        bad(name);
        return 0.0;
      }
      return *v;
    };
    HorizonRow h;
    h.day = count(0, "day");
    h.demand_cav = count(1, "demand_cav");
    h.demand_scav = count(2, "demand_scav");
    h.fleet_size = count(3, "fleet_size");
    h.total_travel_time = real(4, "total_travel_time_vehmin");
    h.total_cav_utility = real(5, "total_cav_utility");
    if (r.fields[6] != "nan") h.normalized_cav_utility = real(6, "normalized_cav_utility");
    h.mean_scav_wait = real(7, "mean_scav_wait");
    if (h.day != rows.size() + 1) {
      issues.push_back({source, r.line, fmt::format("expected day {}, found {}", rows.size() + 1, h.day)});
    }
    rows.push_back(h);
  }
  if (rows.empty() && issues.empty()) issues.push_back({source, 0, "no day rows"});
  if (!issues.empty()) throw DataError(std::move(issues));
  return rows;
}

std::string render_line_chart(const std::string& title, const std::string& y_label,
                              const std::vector<Series>& series) {
  std::size_t days = 0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : series) {
    days = std::max(days, s.values.size());
    for (const auto& v : s.values) {
      if (!v || !std::isfinite(*v)) continue;
      lo = std::min(lo, *v);
      hi = std::max(hi, *v);
    }
  }
  if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
  if (hi - lo < 1e-12) {
    const double pad = std::max(1.0, std::fabs(hi) * 0.05);
    lo -= pad;
    hi += pad;
  } else {
    const double pad = (hi - lo) * 0.08;
    lo -= pad;
    hi += pad;
  }

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto x_of = [&](std::size_t day) {
    if (days <= 1) return kLeft + plot_w / 2.0;
    return kLeft + plot_w * static_cast<double>(day - 1) / static_cast<double>(days - 1);
  };
  auto y_of = [&](double v) { return kTop + plot_h * (hi - v) / (hi - lo); };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n",
      kWidth, kHeight);
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += fmt::format("<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" "
                     "text-anchor=\"middle\">{}</text>\n",
                     kLeft + plot_w / 2.0, escape(title));

  for (int i = 0; i <= 4; ++i) {
    const double v = lo + (hi - lo) * i / 4.0;
    const double y = y_of(v);
    svg += fmt::format("<line x1=\"{}\" y1=\"{:.2f}\" x2=\"{}\" y2=\"{:.2f}\" stroke=\"#dddddd\"/>\n", kLeft,
                       y, kLeft + plot_w, y);
    svg += fmt::format("<text x=\"{}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" "
                       "text-anchor=\"end\">{}</text>\n",
                       kLeft - 6, y + 4, tick_label(v));
  }
  for (std::size_t d = 1; d <= days; ++d) {
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" "
                       "text-anchor=\"middle\">{}</text>\n",
                       x_of(d), kTop + plot_h + 18, d);
  }
  svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
                     kLeft, kTop, plot_w, plot_h);
  svg += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" "
                     "text-anchor=\"middle\">day</text>\n",
                     kLeft + plot_w / 2.0, kHeight - 12);
  svg += fmt::format("<text x=\"18\" y=\"{0}\" font-family=\"sans-serif\" font-size=\"12\" "
                     "text-anchor=\"middle\" transform=\"rotate(-90 18 {0})\">{1}</text>\n",
                     kTop + plot_h / 2.0, escape(y_label));

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    std::string points;
    for (std::size_t d = 1; d <= s.values.size(); ++d) {
      const auto& v = s.values[d - 1];
      if (!v || !std::isfinite(*v)) continue;
      points += fmt::format("{}{:.2f},{:.2f}", points.empty() ? "" : " ", x_of(d), y_of(*v));
      svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", x_of(d), y_of(*v),
                         s.color);
    }
    if (!points.empty()) {
      svg += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                         points, s.color);
    }
    const double ly = kTop + 14.0 + 18.0 * static_cast<double>(k);
    svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"2\"/>\n",
                       kLeft + plot_w + 12, ly, kLeft + plot_w + 32, s.color);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
                       kLeft + plot_w + 38, ly + 4, escape(s.label));
  }
  svg += "</svg>\n";
  return svg;
}

std::string percent_change(double from, double to) {
  if (from == 0.0) return "n/a";
  const long pct = std::lround(100.0 * (to - from) / from);
  return fmt::format("{}{}%", pct >= 0 ? "+" : "", pct);
}

std::string summarize(const std::vector<HorizonRow>& rows) {
  if (rows.empty()) return "no days\n";
  const auto& a = rows.front();
  const auto& b = rows.back();
  std::string out = fmt::format("days: {}\n", rows.size());
  if (rows.size() == 1) {
    out += fmt::format("CAV demand: {}\n", a.demand_cav);
    out += fmt::format("SCAV demand: {}\n", a.demand_scav);
    out += fmt::format("fleet size: {}\n", a.fleet_size);
    out += fmt::format("total travel time (veh.min): {:.1f}\n", a.total_travel_time);
    out += fmt::format("mean SCAV wait (min): {:.2f}\n", a.mean_scav_wait);
    return out;
  }
  auto line = [&](std::string_view name, double x, double y, std::string_view spec) {
    out += fmt::format(fmt::runtime(fmt::format("{{}}: {0} -> {0} ({{}})\n", spec)), name, x, y,
                       percent_change(x, y));
  };
  line("CAV demand", static_cast<double>(a.demand_cav), static_cast<double>(b.demand_cav), "{:.0f}");
  line("SCAV demand", static_cast<double>(a.demand_scav), static_cast<double>(b.demand_scav), "{:.0f}");
  line("fleet size", static_cast<double>(a.fleet_size), static_cast<double>(b.fleet_size), "{:.0f}");
  line("total travel time (veh.min)", a.total_travel_time, b.total_travel_time, "{:.1f}");
  line("total CAV utility", a.total_cav_utility, b.total_cav_utility, "{:.3f}");
  line("mean SCAV wait (min)", a.mean_scav_wait, b.mean_scav_wait, "{:.2f}");
  return out;
}

void write_report(const fs::path& dir) {
  const auto path = dir / "horizon.csv";
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("{}: run directory has no horizon table", path.string()));
  const auto rows = read_horizon_table(in, path.string());

  auto column = [&](auto get) {
    std::vector<std::optional<double>> v;
    for (const auto& r : rows) v.push_back(get(r));
    return v;
  };
  auto emit = [&](const char* file, const std::string& svg) {
    std::ofstream out(dir / file);
    out << svg;
    if (!out) throw Error(fmt::format("cannot write {}", (dir / file).string()));
  };

  emit("demand.svg",
       render_line_chart("Daily demand by mode", "trips",
                         {{"CAV", "#1f77b4", column([](const HorizonRow& r) -> std::optional<double> {
                             return static_cast<double>(r.demand_cav);
                           })},
                          {"SCAV", "#d62728", column([](const HorizonRow& r) -> std::optional<double> {
                             return static_cast<double>(r.demand_scav);
                           })}}));
  emit("fleet.svg",
       render_line_chart("SCAV fleet size", "vehicles",
                         {{"fleet", "#2ca02c", column([](const HorizonRow& r) -> std::optional<double> {
                             return static_cast<double>(r.fleet_size);
                           })}}));
  emit("utility.svg",
       render_line_chart("Normalized total CAV utility", "relative to day 1",
                         {{"utility", "#9467bd", column([](const HorizonRow& r) {
                             return r.normalized_cav_utility;
                           })}}));
  emit("travel_time.svg",
       render_line_chart("Total travel time", "veh.min",
                         {{"total", "#ff7f0e", column([](const HorizonRow& r) -> std::optional<double> {
                             return r.total_travel_time;
                           })}}));
  emit("summary.txt", summarize(rows));
}

}  // namespace scavsim
