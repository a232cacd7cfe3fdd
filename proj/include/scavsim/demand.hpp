#pragma once

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <tuple>
#include <vector>

#include "scavsim/common.hpp"
#include "scavsim/network.hpp"

namespace scavsim {

/// Time-dependent OD trip counts keyed by (interval, origin, destination)
/// with origins and destinations as node indices of the target network.
class ODMatrix {
 public:
  using Key = std::tuple<std::int64_t, NodeIndex, NodeIndex>;

  explicit ODMatrix(double interval_length = 300.0);

  double interval_length() const { return interval_length_; }
  /// Adds to a cell; duplicate keys accumulate.
  void add(std::int64_t interval, NodeIndex origin, NodeIndex destination, std::uint64_t count);
  std::uint64_t total() const { return total_; }
  const std::map<Key, std::uint64_t>& entries() const { return entries_; }

 private:
  double interval_length_;
  std::map<Key, std::uint64_t> entries_;
  std::uint64_t total_ = 0;
};

/// Rows: interval_index,origin_id,destination_id,count.
ODMatrix parse_od(std::istream& in, const NetworkGraph& net, double interval_length = 300.0);
std::optional<ODMatrix> parse_od(std::istream& in, const NetworkGraph& net, double interval_length,
                                 std::vector<Issue>& issues, std::string_view source = "od");
void write_od(std::ostream& out, const ODMatrix& od, const NetworkGraph& net);

/// Logit coefficients; utilities are in minutes.
struct ChoiceParams {
  double asc_cav = -1.91;
  double beta_dt = -0.153;
  double beta_ratio = 2.24;
};

enum class Mode { CAV, SCAV };
const char* to_string(Mode m);

struct Traveler {
  TravelerId id = 0;
  NodeIndex origin = 0;
  NodeIndex destination = 0;
  std::int64_t interval = 0;
  Tick departure_time = 0;   // s from study start
  double ratio = 0.0;        // household cars / licences
  double epsilon = 0.0;      // taste draw, fixed for the whole horizon
  double perceived_t_cav = 0.0;   // min
  double perceived_t_scav = 0.0;  // min
  Mode chosen_mode = Mode::CAV;
  double experienced_time = 0.0;  // min, last simulated day
};

struct RatioDistribution {
  std::vector<double> values{0.0, 0.5, 1.0};
  std::vector<double> weights{1.0, 1.0, 1.0};
};

enum class DemandDraw {
  Exact,    // one traveler per trip unit
  Poisson,  // cell count is the mean of a Poisson draw
};

struct PopulationConfig {
  RatioDistribution ratio;
  DemandDraw draw = DemandDraw::Exact;
  double epsilon_scale = 1.0;  // logistic scale; 0 makes every epsilon zero

  void validate() const;
};

/// One traveler per trip; departures uniform within the trip's interval (whole
/// seconds), ratio from the configured distribution, epsilon ~ Logistic(0, scale).
/// Perceived times are left at zero for the caller to initialize.
std::vector<Traveler> synthesize_population(const ODMatrix& od, const PopulationConfig& config,
                                            std::uint64_t seed);

void write_population(std::ostream& out, std::span<const Traveler> travelers,
                      const NetworkGraph& net);

double utility_cav(double t_cav, double t_scav, double ratio, double epsilon,
                   const ChoiceParams& p = {});

/// U_SCAV is identically zero, so CAV wins only on strictly positive utility.
inline Mode choose_mode(double u_cav) { return u_cav > 0.0 ? Mode::CAV : Mode::SCAV; }

/// Binary logit probability of CAV for systematic utility v.
double choice_probability(double v);

}  // namespace scavsim
