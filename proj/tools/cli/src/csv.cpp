#include "ntgof/cli/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ntgof::cli {

namespace {

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = text.find_last_not_of(" \t\r");
  return std::string(text.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    fields.push_back(trim(field));
  }
  if (!line.empty() && line.back() == ',') {
    fields.emplace_back();
  }
  return fields;
}

double parse_number(const std::string& field, const std::string& where) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  if (!field.empty() && *begin == '+') {
    ++begin;
  }
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw InputError(where + ": '" + field + "' is not a finite number");
  }
  return value;
}

}  // namespace

const std::vector<double>& Table::column(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] == name) {
      return values[c];
    }
  }
  throw InputError("missing column '" + name + "'");
}

Table parse_csv(const std::string& text, const std::vector<std::string>& expected,
                const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_number = 0;
  Table table;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) {
      continue;
    }
    const std::string where = source + ":" + std::to_string(line_number);
    auto fields = split(trim(line));
    if (!have_header) {
      if (fields != expected) {
        std::string wanted;
        for (const auto& name : expected) {
          wanted += (wanted.empty() ? "" : ",") + name;
        }
        throw InputError(where + ": header must be '" + wanted + "'");
      }
      table.columns = fields;
      table.values.assign(fields.size(), {});
      have_header = true;
      continue;
    }
    if (fields.size() != table.columns.size()) {
      throw InputError(where + ": expected " + std::to_string(table.columns.size()) +
                       " fields, found " + std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      table.values[c].push_back(parse_number(fields[c], where));
    }
  }
  if (!have_header) {
    throw InputError(source + ": empty file (header required)");
  }
  if (table.rows() == 0) {
    throw InputError(source + ": no data rows");
  }
  return table;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Table read_csv(const std::filesystem::path& path, const std::vector<std::string>& expected) {
  return parse_csv(read_file(path), expected, path.string());
}

std::map<std::pair<std::size_t, long long>, double> read_penalty_table(
    const std::filesystem::path& path) {
  const Table table = read_csv(path, {"k", "n", "pi"});
  std::map<std::pair<std::size_t, long long>, double> entries;
  const auto& ks = table.column("k");
  const auto& ns = table.column("n");
  const auto& pis = table.column("pi");
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (ks[r] < 1 || ks[r] != std::floor(ks[r]) || ns[r] < 1 || ns[r] != std::floor(ns[r])) {
      throw InputError(path.string() + ": row " + std::to_string(r + 2) +
                       ": k and n must be positive integers");
    }
    entries[{static_cast<std::size_t>(ks[r]), std::llround(ns[r])}] = pis[r];
  }
  return entries;
}

}  // namespace ntgof::cli
