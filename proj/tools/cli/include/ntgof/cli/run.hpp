#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "ntgof/catalog.hpp"
#include "ntgof/cli/json_writer.hpp"

namespace ntgof::cli {

enum class Command { test, calibrate, power, probe };

enum ExitStatus : int { kOk = 0, kInputError = 2, kNumericError = 3 };

struct RunConfig {
  Command command = Command::test;
  std::filesystem::path input;
  /// uniformity | independence | deconvolution[:sigma] | composite:<family>[:literal]
  std::string kind = "uniformity";
  /// schwarz | linear2k | table:<path>
  std::string penalty = "schwarz";
  /// auto | positive integer
  std::string dmax = "auto";
  double alpha = 0.05;
  std::size_t replications = 1000;
  std::uint64_t seed = 0;
  /// Empty writes the report to stdout.
  std::filesystem::path output;
};

Command parse_command(const std::string& name);
std::string to_string(Command command);

/// Builds the TestSpec named by (kind, penalty, dmax). For composite kinds the
/// family reference parameter is left at the family default. Throws InputError
/// on unknown names. A non-zero largest_n lets an automatic budget cap itself
/// at d(largest_n).
TestSpec make_spec(const RunConfig& config, std::size_t largest_n = 0);

/// Executes one command and returns the report document.
/// Throws InputError, ntgof::InvalidArgument or ntgof::NumericError.
Json execute(const RunConfig& config);

/// execute() plus error mapping and report output: returns 0 on a completed
/// run whatever the decision, 2 on input errors, 3 on numeric failures.
/// Diagnostics go to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace ntgof::cli
