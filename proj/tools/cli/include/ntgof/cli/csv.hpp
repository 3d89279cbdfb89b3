#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ntgof::cli {

/// Malformed or unreadable input. The CLI maps it to exit status 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numeric columns of a CSV file with a required header row.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> values;  // values[c][row]

  std::size_t rows() const { return values.empty() ? 0 : values.front().size(); }
  const std::vector<double>& column(const std::string& name) const;
};

/// Parses CSV text whose header must list exactly `expected` (in order).
/// Blank lines are skipped. Throws InputError naming the offending line.
Table parse_csv(const std::string& text, const std::vector<std::string>& expected,
                const std::string& source = "<input>");

Table read_csv(const std::filesystem::path& path, const std::vector<std::string>& expected);

std::string read_file(const std::filesystem::path& path);

/// Penalty table with columns k,n,pi keyed by (k, n).
std::map<std::pair<std::size_t, long long>, double> read_penalty_table(
    const std::filesystem::path& path);

}  // namespace ntgof::cli
