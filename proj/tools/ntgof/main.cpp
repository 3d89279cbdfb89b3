#include <CLI11.hpp>

#include <iostream>

#include "ntgof/cli/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Data-driven Neyman-type goodness-of-fit tests"};
  app.require_subcommand(1, 1);

  ntgof::cli::RunConfig config;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"test", "Run a test on CSV data and report S, T_S, p-value and decision"},
      {"calibrate", "Simulate the null distribution of T_S for a study file"},
      {"power", "Estimate rejection rates under an alternative along an n grid"},
      {"probe", "Check dimension detection or tail-rate behaviour along an n grid"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--kind", config.kind,
                    "uniformity | independence | deconvolution[:sigma] | "
                    "composite:<family>[:literal]")
        ->capture_default_str();
    sub->add_option("--input", config.input, "CSV data (test) or JSON study file")->required();
    sub->add_option("--penalty", config.penalty, "schwarz | linear2k | table:<path>")
        ->capture_default_str();
    sub->add_option("--dmax", config.dmax, "auto or a fixed dimension")->capture_default_str();
    sub->add_option("--alpha", config.alpha, "Significance level")->capture_default_str();
    sub->add_option("--mc-reps", config.replications, "Monte Carlo replications")
        ->capture_default_str();
    sub->add_option("--seed", config.seed, "Random seed")->capture_default_str();
    sub->add_option("--out", config.output, "Report path (default: stdout)");
    sub->callback([&config, name = name] { config.command = ntgof::cli::parse_command(name); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ntgof::cli::kInputError;
  }
  return ntgof::cli::run(config, std::cout, std::cerr);
}
