#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace scavsim {

// External identifiers, as they appear in input files.
using NodeId = std::int64_t;
using LinkId = std::int64_t;

// Dense positions inside a NetworkGraph. Index order equals id order.
using NodeIndex = std::uint32_t;
using LinkIndex = std::uint32_t;

using TravelerId = std::uint32_t;
using VehicleId = std::uint32_t;

// Seconds on the within-day clock.
using Tick = std::int64_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (scenario keys, parameter ranges).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A problem found while reading an input table. Row 0 means "not tied to a row".
struct Issue {
  std::string source;
  std::size_t row = 0;
  std::string message;

  std::string str() const;
};

/// Malformed or inconsistent input data. Carries every issue found.
class DataError : public Error {
 public:
  explicit DataError(std::vector<Issue> issues);
  explicit DataError(const std::string& message);

  const std::vector<Issue>& issues() const noexcept { return issues_; }

 private:
  std::vector<Issue> issues_;
};

/// The within-day simulation cannot proceed (unservable demand, routing failure).
class SimulationError : public Error {
 public:
  using Error::Error;
};

}  // namespace scavsim
