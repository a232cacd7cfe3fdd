#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scavsim/common.hpp"

namespace scavsim {

struct TableRow {
  std::size_t line = 0;  // 1-based line number in the source
  std::vector<std::string> fields;
};

/// Comma-delimited table with a required header row. Blank lines and lines
/// starting with '#' are skipped. Fields are whitespace-trimmed.
struct Table {
  std::string source;
  std::vector<std::string> header;
  std::vector<TableRow> rows;

  /// Column position by header name, if present.
  std::optional<std::size_t> column(std::string_view name) const;
};

/// Reads a table; a missing header is reported into `issues`.
Table read_table(std::istream& in, std::string source, std::vector<Issue>& issues);

/// Checks that every name in `required` is a header column, in that order.
bool expect_columns(const Table& table, std::initializer_list<std::string_view> required,
                    std::vector<Issue>& issues);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char delim);

std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);

}  // namespace scavsim
