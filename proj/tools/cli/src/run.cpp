#include "ntgof/cli/run.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include "ntgof/cli/csv.hpp"
#include "ntgof/error.hpp"
#include "ntgof/montecarlo.hpp"

namespace ntgof::cli {

namespace {

constexpr double kDefaultNoiseSigma = 0.25;
constexpr std::size_t kDeconvolutionMomentDraws = 20000;

std::vector<std::string> split_colon(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(':', start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) {
      return parts;
    }
    start = pos + 1;
  }
}

double parse_positive(const std::string& text, const std::string& what) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !(value > 0.0) ||
      !std::isfinite(value)) {
    throw InputError(what + ": '" + text + "' is not a positive number");
  }
  return value;
}

// With the largest sample size known the automatic cap can shrink to d(n_max)
// without changing d(n) for any n in the run; this bounds the dimension of
// matrices estimated up front.
DimensionBudget parse_budget(const std::string& dmax, std::size_t largest_n) {
  if (dmax == "auto") {
    const std::size_t cap = 12;
    if (largest_n == 0) {
      return DimensionBudget::automatic(cap);
    }
    return DimensionBudget::automatic(DimensionBudget::automatic(cap)(largest_n));
  }
  std::size_t d = 0;
  const auto [ptr, ec] = std::from_chars(dmax.data(), dmax.data() + dmax.size(), d);
  if (ec != std::errc() || ptr != dmax.data() + dmax.size() || d == 0) {
    throw InputError("--dmax must be 'auto' or a positive integer, got '" + dmax + "'");
  }
  return DimensionBudget::fixed(d);
}

PenaltySchedule parse_penalty(const std::string& penalty) {
  if (penalty == "schwarz") {
    return PenaltySchedule::schwarz();
  }
  if (penalty == "linear2k") {
    return PenaltySchedule::linear_2k();
  }
  if (penalty.rfind("table:", 0) == 0) {
    return PenaltySchedule::table(read_penalty_table(penalty.substr(6)));
  }
  throw InputError("--penalty must be schwarz, linear2k or table:<path>, got '" + penalty + "'");
}

ParametricFamily parse_family(const std::string& name) {
  if (name == "normal_location") {
    return ParametricFamily::normal_location();
  }
  if (name == "normal") {
    return ParametricFamily::normal();
  }
  if (name == "exponential") {
    return ParametricFamily::exponential();
  }
  if (name == "standard_normal") {
    return ParametricFamily::standard_normal();
  }
  throw InputError("unknown parametric family '" + name + "'");
}

std::vector<std::string> csv_schema(TestKind kind) {
  if (kind == TestKind::independence_rank) {
    return {"x", "y"};
  }
  return {"x"};
}

TestKind kind_of(const std::string& kind) {
  const std::string name = split_colon(kind).front();
  if (name == "independence") {
    return TestKind::independence_rank;
  }
  if (name == "deconvolution") {
    return TestKind::deconvolution_simple;
  }
  if (name == "composite") {
    return TestKind::composite_parametric;
  }
  return TestKind::uniformity;
}

Sample read_sample(const RunConfig& config, TestKind kind) {
  const Table table = read_csv(config.input, csv_schema(kind));
  Sample sample;
  sample.x = table.column("x");
  if (kind == TestKind::independence_rank) {
    sample.y = table.column("y");
  }
  return sample;
}

Json read_study(const RunConfig& config) {
  const std::string text = read_file(config.input);
  try {
    Json study = Json::parse(text);
    if (!study.is_object()) {
      throw InputError(config.input.string() + ": study file must hold a JSON object");
    }
    return study;
  } catch (const Json::exception& e) {
    throw InputError(config.input.string() + ": " + e.what());
  }
}

template <class T>
T study_value(const Json& study, const std::string& key, const T& fallback) {
  if (!study.contains(key)) {
    return fallback;
  }
  try {
    return study.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw InputError("study field '" + key + "': " + e.what());
  }
}

std::vector<std::size_t> study_grid(const Json& study) {
  std::vector<std::size_t> grid;
  if (study.contains("n_grid")) {
    grid = study_value<std::vector<std::size_t>>(study, "n_grid", {});
  } else if (study.contains("n")) {
    grid = {study_value<std::size_t>(study, "n", 0)};
  }
  if (grid.empty()) {
    throw InputError("study needs 'n' or a non-empty 'n_grid'");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 2 || (i > 0 && grid[i] <= grid[i - 1])) {
      throw InputError("study n_grid must be strictly increasing with entries >= 2");
    }
  }
  return grid;
}

AlternativeSpec distribution_alternative(const std::string& name, std::size_t declared_k) {
  std::function<double(Rng&)> draw;
  if (name == "exponential") {
    draw = [](Rng& rng) { return -std::log1p(-uniform01(rng)); };
  } else if (name == "uniform") {
    draw = [](Rng& rng) { return uniform01(rng); };
  } else if (name == "laplace") {
    draw = [](Rng& rng) {
      const double u = uniform01(rng) - 0.5;
      return u < 0.0 ? std::log1p(2.0 * u) : -std::log1p(-2.0 * u);
    };
  } else if (name == "lognormal") {
    draw = [](Rng& rng) { return std::exp(standard_normal(rng)); };
  } else {
    throw InputError("unknown alternative distribution '" + name + "'");
  }
  return AlternativeSpec::custom(name, declared_k, std::nullopt,
                                 [draw](std::size_t n, Rng& rng) {
                                   Sample sample;
                                   sample.x.resize(n);
                                   for (auto& v : sample.x) {
                                     v = draw(rng);
                                   }
                                   return sample;
                                 });
}

AlternativeSpec parse_alternative(const Json& study, const TestSpec& spec) {
  if (!study.contains("alternative") || !study.at("alternative").is_object()) {
    throw InputError("study needs an 'alternative' object");
  }
  const Json& alt = study.at("alternative");
  const auto type = study_value<std::string>(alt, "type", "");
  if (type == "contamination") {
    const auto component = study_value<std::size_t>(alt, "component", 0);
    const auto amplitude = study_value<double>(alt, "amplitude", 0.0);
    std::optional<NoiseDensity> noise;
    if (spec.kind == TestKind::deconvolution_simple) {
      noise = spec.deconvolution->noise;
    } else if (spec.kind != TestKind::uniformity) {
      throw InputError("contamination alternatives apply to uniformity and deconvolution");
    }
    return AlternativeSpec::contamination(component, amplitude, noise);
  }
  if (type == "null") {
    return AlternativeSpec::null_of(spec, study_value<std::size_t>(alt, "declared_k", 1));
  }
  if (type == "linear_dependence") {
    if (spec.kind != TestKind::independence_rank) {
      throw InputError("linear_dependence alternatives apply to the independence test");
    }
    return AlternativeSpec::linear_dependence(study_value<double>(alt, "noise_sd", 0.5));
  }
  if (type == "distribution") {
    return distribution_alternative(study_value<std::string>(alt, "name", ""),
                                    study_value<std::size_t>(alt, "declared_k", 1));
  }
  throw InputError("unknown alternative type '" + type + "'");
}

MonteCarloConfig mc_config(const RunConfig& config, std::vector<std::size_t> grid = {}) {
  MonteCarloConfig mc;
  mc.replications = config.replications;
  mc.seed = config.seed;
  mc.alpha = config.alpha;
  mc.n_grid = std::move(grid);
  return mc;
}

Json header(const RunConfig& config, const TestSpec& spec) {
  Json doc;
  doc["command"] = to_string(config.command);
  doc["kind"] = config.kind;
  doc["test"] = to_string(spec.kind);
  doc["penalty"] = spec.penalty.label();
  doc["dmax"] = config.dmax;
  doc["alpha"] = config.alpha;
  doc["replications"] = config.replications;
  doc["seed"] = config.seed;
  return doc;
}

Json calibration_json(const CalibrationResult& result) {
  Json entry;
  entry["n"] = result.n;
  entry["critical_value"] = result.critical_value;
  entry["selected_counts"] = result.selected_counts;
  entry["statistics"] = result.statistics;
  return entry;
}

void set_composite_reference(TestSpec& spec, const Json& study) {
  if (spec.kind == TestKind::composite_parametric && study.contains("reference")) {
    auto reference = study_value<std::vector<double>>(study, "reference", {});
    if (reference.size() != spec.family->parameters) {
      throw InputError("study 'reference' has the wrong number of parameters");
    }
    spec.family->reference = std::move(reference);
  }
}

Json run_test_command(const RunConfig& config) {
  const Sample sample = read_sample(config, kind_of(config.kind));
  TestSpec spec = make_spec(config, sample.size());
  if (spec.kind == TestKind::composite_parametric) {
    spec.family->reference = spec.family->fit(sample.x);
  }
  const TestOutcome outcome = run_test(spec, sample);
  const CalibrationResult calibration = null_distribution(spec, outcome.n, mc_config(config));
  const double p = p_value(outcome.statistic(), calibration);

  Json doc = header(config, spec);
  doc["n"] = outcome.n;
  doc["dimension"] = outcome.dimension;
  doc["selected"] = outcome.selection.selected;
  doc["statistic"] = outcome.statistic();
  doc["p_value"] = p;
  doc["critical_value"] = calibration.critical_value;
  doc["decision"] = p <= config.alpha ? "reject" : "accept";
  Json series = Json::array();
  for (std::size_t k = 1; k <= outcome.selection.series.size(); ++k) {
    Json row;
    row["k"] = k;
    row["statistic"] = outcome.selection.series[k - 1];
    row["penalty"] = outcome.selection.penalties[k - 1];
    row["penalized"] = outcome.selection.penalized[k - 1];
    series.push_back(std::move(row));
  }
  doc["series"] = std::move(series);
  std::vector<std::string> warnings = outcome.warnings;
  const auto n = static_cast<double>(outcome.n);
  for (std::size_t k = 2; k <= outcome.dimension; ++k) {
    if (spec.penalty.delta(k, n) < 2.0 * static_cast<double>(k)) {
      warnings.push_back("penalty increment pi(k,n) - pi(1,n) < 2k at k=" + std::to_string(k) +
                         "; null boundedness guarantees do not cover this n");
      break;
    }
  }
  doc["warnings"] = warnings;
  return doc;
}

Json run_calibrate_command(const RunConfig& config) {
  const Json study = read_study(config);
  const auto grid = study_grid(study);
  TestSpec spec = make_spec(config, grid.back());
  set_composite_reference(spec, study);
  Json doc = header(config, spec);
  Json results = Json::array();
  for (const std::size_t n : grid) {
    results.push_back(calibration_json(null_distribution(spec, n, mc_config(config))));
  }
  doc["results"] = std::move(results);
  return doc;
}

Json run_power_command(const RunConfig& config) {
  const Json study = read_study(config);
  const auto grid = study_grid(study);
  TestSpec spec = make_spec(config, grid.back());
  set_composite_reference(spec, study);
  const auto alternative = parse_alternative(study, spec);
  const auto curve = power_curve(spec, alternative, mc_config(config, grid));
  Json doc = header(config, spec);
  doc["alternative"] = alternative.label;
  Json points = Json::array();
  for (const auto& point : curve) {
    Json row;
    row["n"] = point.n;
    row["rejection_rate"] = point.rejection_rate;
    row["standard_error"] = point.standard_error;
    row["critical_value"] = point.critical_value;
    points.push_back(std::move(row));
  }
  doc["points"] = std::move(points);
  return doc;
}

Json run_probe_command(const RunConfig& config) {
  const Json study = read_study(config);
  const auto grid = study_grid(study);
  TestSpec spec = make_spec(config, grid.back());
  set_composite_reference(spec, study);
  const auto probe = study_value<std::string>(study, "probe", "consistency");
  Json doc = header(config, spec);
  doc["probe"] = probe;
  if (probe == "tail_rate") {
    const auto sampler_name = study_value<std::string>(study, "sampler", "rademacher");
    if (sampler_name != "rademacher") {
      throw InputError("tail_rate probe supports the 'rademacher' sampler");
    }
    const auto deviation = study_value<double>(study, "deviation", 0.5);
    const auto factor = study_value<double>(study, "factor", 2.0);
    const auto report = tail_rate_probe(rademacher_sampler(), deviation, grid,
                                        config.replications, config.seed, factor);
    doc["deviation"] = report.deviation;
    doc["factor"] = report.factor;
    Json points = Json::array();
    for (const auto& point : report.points) {
      Json row;
      row["n"] = point.n;
      row["empirical_tail"] = point.empirical_tail;
      row["reference_rate"] = point.reference_rate;
      points.push_back(std::move(row));
    }
    doc["points"] = std::move(points);
    doc["passed"] = report.geometric;
    return doc;
  }
  if (probe != "consistency") {
    throw InputError("probe must be 'consistency' or 'tail_rate'");
  }
  const auto alternative = parse_alternative(study, spec);
  const auto threshold = study_value<double>(study, "threshold", 0.8);
  const auto report = consistency_probe(spec, alternative, mc_config(config, grid), threshold);
  doc["alternative"] = alternative.label;
  doc["declared_k"] = report.declared_k;
  doc["threshold"] = report.threshold;
  Json points = Json::array();
  for (const auto& point : report.points) {
    Json row;
    row["n"] = point.n;
    row["detection_rate"] = point.detection_rate;
    row["median_statistic"] = point.median_statistic;
    points.push_back(std::move(row));
  }
  doc["points"] = std::move(points);
  doc["detection_nondecreasing"] = report.detection_nondecreasing;
  doc["statistic_nondecreasing"] = report.statistic_nondecreasing;
  doc["final_detection_above"] = report.final_detection_above;
  doc["passed"] = report.passed();
  return doc;
}

}  // namespace

Command parse_command(const std::string& name) {
  if (name == "test") return Command::test;
  if (name == "calibrate") return Command::calibrate;
  if (name == "power") return Command::power;
  if (name == "probe") return Command::probe;
  throw InputError("unknown command '" + name + "'");
}

std::string to_string(Command command) {
  switch (command) {
    case Command::test:
      return "test";
    case Command::calibrate:
      return "calibrate";
    case Command::power:
      return "power";
    case Command::probe:
      return "probe";
  }
  return "unknown";
}

TestSpec make_spec(const RunConfig& config, std::size_t largest_n) {
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    throw InputError("--alpha must lie in (0, 1)");
  }
  if (config.replications < 100) {
    throw InputError("--mc-reps must be at least 100");
  }
  auto budget = parse_budget(config.dmax, largest_n);
  auto penalty = parse_penalty(config.penalty);
  const auto parts = split_colon(config.kind);
  const std::string& name = parts.front();
  if (name == "uniformity" && parts.size() == 1) {
    return TestSpec::uniformity(std::move(penalty), std::move(budget));
  }
  if (name == "independence" && parts.size() == 1) {
    return TestSpec::independence(std::move(penalty), std::move(budget));
  }
  if (name == "deconvolution" && parts.size() <= 2) {
    const double sigma =
        parts.size() == 2 ? parse_positive(parts[1], "noise sigma") : kDefaultNoiseSigma;
    DeconvolutionModel model{NullDensity::uniform01(), NoiseDensity::gaussian(sigma), {}};
    return TestSpec::deconvolution_simple(std::move(model), std::move(penalty), std::move(budget),
                                          kDeconvolutionMomentDraws, config.seed);
  }
  if (name == "composite" && (parts.size() == 2 || parts.size() == 3)) {
    TestSpec spec =
        TestSpec::composite(parse_family(parts[1]), std::move(penalty), std::move(budget));
    if (parts.size() == 3) {
      if (parts[2] != "literal") {
        throw InputError("composite kind suffix must be 'literal'");
      }
      spec.correction = NuisanceCorrection::literal;
    }
    return spec;
  }
  throw InputError("unknown --kind '" + config.kind + "'");
}

Json execute(const RunConfig& config) {
  switch (config.command) {
    case Command::test:
      return run_test_command(config);
    case Command::calibrate:
      return run_calibrate_command(config);
    case Command::power:
      return run_power_command(config);
    case Command::probe:
      return run_probe_command(config);
  }
  throw InputError("unknown command");
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Json report;
  try {
    report = execute(config);
  } catch (const InputError& e) {
    err << "ntgof: input error: " << e.what() << '\n';
    return kInputError;
  } catch (const ntgof::InvalidArgument& e) {
    err << "ntgof: input error: " << e.what() << '\n';
    return kInputError;
  } catch (const ntgof::NumericError& e) {
    err << "ntgof: numeric failure: " << e.what() << '\n';
    return kNumericError;
  } catch (const ntgof::WindowError& e) {
    err << "ntgof: numeric failure: " << e.what() << '\n';
    return kNumericError;
  }
  if (report.contains("warnings")) {
    for (const auto& warning : report["warnings"]) {
      err << "ntgof: warning: " << warning.get<std::string>() << '\n';
    }
  }
  const std::string text = to_json_text(report);
  if (config.output.empty()) {
    out << text;
    return kOk;
  }
  std::ofstream file(config.output, std::ios::binary | std::ios::trunc);
  if (!file || !(file << text)) {
    err << "ntgof: input error: cannot write '" << config.output.string() << "'\n";
    return kInputError;
  }
  return kOk;
}

}  // namespace ntgof::cli
