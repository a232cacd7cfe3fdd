#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace scavsim {

/// One row of horizon.csv as read back from disk.
struct HorizonRow {
  std::size_t day = 0;
  std::size_t demand_cav = 0;
  std::size_t demand_scav = 0;
  std::size_t fleet_size = 0;
  double total_travel_time = 0.0;
  double total_cav_utility = 0.0;
  std::optional<double> normalized_cav_utility;  // absent when written as "nan"
  double mean_scav_wait = 0.0;
};

/// Parses a horizon table. Throws DataError on missing columns, bad values, or
/// day indices that are not 1..N in order.
std::vector<HorizonRow> read_horizon_table(std::istream& in, std::string source = "horizon.csv");

struct Series {
  std::string label;
  std::string color;
  std::vector<std::optional<double>> values;  // one per day, gaps allowed
};

/// Static line chart over days 1..N.
std::string render_line_chart(const std::string& title, const std::string& y_label,
                              const std::vector<Series>& series);

/// Signed whole-percent change, e.g. "+43%"; "n/a" when `from` is zero.
std::string percent_change(double from, double to);

/// Day-1 and day-N values with percentage changes; a single day lists values only.
std::string summarize(const std::vector<HorizonRow>& rows);

/// Reads `dir`/horizon.csv and writes demand.svg, fleet.svg, utility.svg,
/// travel_time.svg and summary.txt next to it.
void write_report(const std::filesystem::path& dir);

}  // namespace scavsim
