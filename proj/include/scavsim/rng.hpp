#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace scavsim {

/// Mix a master seed with a stream tag (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Seeded generator with distribution code kept in-house: std::mt19937_64 is
/// bit-exact across standard libraries, the std:: distributions are not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform01();

  /// Uniform on (0, 1); never returns an endpoint.
  double uniform_open01();

  /// Uniform integer on [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  /// Logistic(location 0, scale s) by inversion.
  double logistic(double scale = 1.0);

  /// Index drawn proportionally to non-negative weights (at least one positive).
  std::size_t weighted_index(std::span<const double> weights);

  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

}  // namespace scavsim
