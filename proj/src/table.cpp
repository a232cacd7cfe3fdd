#include "scavsim/table.hpp"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

namespace scavsim {

std::string Issue::str() const {
  if (row == 0) return fmt::format("{}: {}", source, message);
  return fmt::format("{}:{}: {}", source, row, message);
}

namespace {

std::string join_issues(const std::vector<Issue>& issues) {
  std::string out;
  for (const auto& issue : issues) {
    if (!out.empty()) out += '\n';
    out += issue.str();
  }
  return out;
}

}  // namespace

DataError::DataError(std::vector<Issue> issues)
    : Error(join_issues(issues)), issues_(std::move(issues)) {}

DataError::DataError(const std::string& message) : Error(message) {}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view s, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(delim, start);
    out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end || s.empty()) return std::nullopt;
  return value;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  std::int64_t value = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end || s.empty()) return std::nullopt;
  return value;
}

std::optional<std::size_t> Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

Table read_table(std::istream& in, std::string source, std::vector<Issue>& issues) {
  Table table;
  table.source = std::move(source);
  std::string line;
  std::size_t number = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++number;
    if (number == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto fields = split(body, ',');
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    table.rows.push_back({number, std::move(fields)});
  }
  if (!have_header) issues.push_back({table.source, 0, "missing header row"});
  return table;
}

bool expect_columns(const Table& table, std::initializer_list<std::string_view> required,
                    std::vector<Issue>& issues) {
  if (table.header.empty()) return false;
  std::size_t i = 0;
  for (const auto name : required) {
    if (i >= table.header.size() || table.header[i] != name) {
      issues.push_back({table.source, 0,
                        fmt::format("header column {} must be '{}'", i + 1, name)});
      return false;
    }
    ++i;
  }
  return true;
}

}  // namespace scavsim
