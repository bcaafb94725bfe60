#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bnsens/analysis.hpp"
#include "bnsens/errors.hpp"
#include "bnsens/netparse.hpp"
#include "bnsens/oracle.hpp"
#include "bnsens/report.hpp"
#include "json.hpp"

namespace {

using namespace bnsens;
namespace fs = std::filesystem;

int exit_code(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::io:
      return 1;
    case ErrorCategory::input:
      return 2;
    default:
      return 3;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::io_error, "cannot open '" + path + "' for reading");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    throw Error(ErrorKind::io_error, "read failure on '" + path + "'");
  }
  return std::move(buffer).str();
}

void write_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::io_error, "cannot open '" + out_path +
                                         "' for writing");
  }
  out << content;
  if (!out) {
    throw Error(ErrorKind::io_error, "write failure on '" + out_path + "'");
  }
}

// Flags shared by the analysis-style commands.
struct CommonOptions {
  std::string network_path;
  std::string replay_path;
  std::string case_path;
  std::string cases_dir;
  std::string target_spec;
  std::string param_spec;
  bool all_params = false;
  std::string out_path;
  AnalysisConfig config;
  bool uniform_fallback = false;

  void apply() {
    if (uniform_fallback) config.fallback = CovaryFallback::uniform;
    config.check();
  }
};

void add_threshold_flags(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--delta", opt.config.vertex_delta,
                  "vertex-proximity threshold (default 0.1)");
  cmd->add_option("--rho-abs", opt.config.rho_abs,
                  "absolute deviation-smallness threshold (default 0.05)");
  cmd->add_option("--rho-rel", opt.config.rho_rel,
                  "relative deviation multiplier (default 1.0)");
  cmd->add_option("--tol", opt.config.fit_tol,
                  "fit self-check tolerance (default 1e-9)");
  cmd->add_option("--threads", opt.config.threads,
                  "worker threads (0 = hardware concurrency)");
  cmd->add_flag("--uniform-fallback", opt.uniform_fallback,
                "spread 1-x uniformly when a varied entry holds probability 1");
}

std::vector<ParameterRef> resolve_params(const Network& net,
                                         const CommonOptions& opt) {
  if (opt.all_params) return all_parameters(net);
  if (opt.param_spec.empty()) {
    throw Error(ErrorKind::invalid_argument,
                "pass --param \"Var=value | P1=v1, ...\" or --all");
  }
  return {parse_parameter_spec(net, opt.param_spec)};
}

std::vector<fs::path> sorted_case_files(const std::string& dir) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorKind::io_error, "'" + dir + "' is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& item : fs::directory_iterator(dir)) {
    if (item.is_regular_file() && item.path().extension() == ".json")
      files.push_back(item.path());
  }
  std::ranges::sort(files);
  if (files.empty()) {
    throw Error(ErrorKind::io_error,
                "no .json case files found in '" + dir + "'");
  }
  return files;
}

int cmd_validate(const std::string& network_path) {
  const NetworkDocument doc = parse_network_unchecked(read_file(network_path));
  const auto violations = validate_network(doc.network);
  for (const std::string& violation : violations)
    std::cerr << violation << "\n";
  return violations.empty() ? 0 : 2;
}

int cmd_infer(const CommonOptions& opt) {
  const NetworkDocument doc = parse_network(read_file(opt.network_path));
  std::optional<CaseDocument> case_doc;
  if (!opt.case_path.empty())
    case_doc = parse_case(read_file(opt.case_path), doc.network);

  const TargetSpec target = parse_target_spec(doc.network, opt.target_spec);
  const Evidence evidence = case_doc ? case_doc->evidence : Evidence{};
  const QueryResult result = query(doc.network, target.variable, evidence);

  nlohmann::json j;
  j["target"] = doc.network.variables[target.variable].name;
  j["values"] = doc.network.variables[target.variable].values;
  j["joint"] = result.joint;
  j["evidence_prob"] = result.evidence_prob;
  if (result.evidence_prob > 0.0) {
    std::vector<double> posterior(result.joint.size());
    for (std::size_t i = 0; i < result.joint.size(); ++i)
      posterior[i] = result.joint[i] / result.evidence_prob;
    j["posterior"] = posterior;
  } else {
    j["posterior"] = nullptr;
  }
  if (case_doc) j["case_id"] = case_doc->case_id;
  write_output(opt.out_path, j.dump(2) + "\n");
  return 0;
}

ReportDocument analyze_replay(const CommonOptions& opt, bool with_deviation) {
  const ReportDocument input = read_report(read_file(opt.replay_path));
  std::vector<NamedBundle> bundles = replay_bundles(input);
  if (!opt.param_spec.empty()) {
    std::erase_if(bundles, [&](const NamedBundle& b) {
      return b.parameter_spec != opt.param_spec;
    });
    if (bundles.empty()) {
      throw Error(ErrorKind::unknown_parameter,
                  "replay document has no entry for parameter '" +
                      opt.param_spec + "'");
    }
  }
  ReportDocument doc;
  doc.network = input.network;
  doc.case_id = input.case_id;
  doc.target = input.target;
  doc.target_value = input.target_value;
  doc.parameters_analyzed = bundles.size();
  for (const NamedBundle& bundle : bundles) {
    ReportEntry entry = analyze_bundle(bundle, opt.config, with_deviation);
    if (entry.all_constant()) {
      doc.constant_only += 1;
    } else {
      doc.entries.push_back(std::move(entry));
    }
  }
  return doc;
}

int cmd_analyze(CommonOptions& opt, bool with_deviation) {
  opt.apply();
  if (!opt.replay_path.empty() && !opt.network_path.empty()) {
    throw Error(ErrorKind::invalid_argument,
                "--replay and --network are mutually exclusive");
  }
  if (!opt.case_path.empty() && !opt.cases_dir.empty()) {
    throw Error(ErrorKind::invalid_argument,
                "--case and --cases are mutually exclusive");
  }
  if (!opt.replay_path.empty()) {
    write_output(opt.out_path, write_report(analyze_replay(opt, with_deviation)));
    return 0;
  }

  if (opt.network_path.empty()) {
    throw Error(ErrorKind::invalid_argument,
                "pass --network FILE (or --replay REPORT)");
  }
  if (opt.target_spec.empty()) {
    throw Error(ErrorKind::invalid_argument,
                "pass --target \"Var\" or --target \"Var=value\"");
  }
  const NetworkDocument doc = parse_network(read_file(opt.network_path));
  const TargetSpec target = parse_target_spec(doc.network, opt.target_spec);
  if (with_deviation && target.value) {
    throw Error(ErrorKind::invalid_argument,
                "admissible deviations need a bare target variable, not a "
                "target value");
  }
  const auto params = resolve_params(doc.network, opt);

  if (!opt.cases_dir.empty()) {
    std::vector<ReportDocument> reports;
    for (const fs::path& path : sorted_case_files(opt.cases_dir)) {
      const CaseDocument case_doc =
          parse_case(read_file(path.string()), doc.network);
      reports.push_back(analyze_network(doc.network, case_doc, target.variable,
                                        target.value, params, opt.config,
                                        with_deviation));
    }
    write_output(opt.out_path, write_batch_report(reports));
    return 0;
  }

  std::optional<CaseDocument> case_doc;
  if (!opt.case_path.empty())
    case_doc = parse_case(read_file(opt.case_path), doc.network);
  const ReportDocument report =
      analyze_network(doc.network, case_doc, target.variable, target.value,
                      params, opt.config, with_deviation);
  write_output(opt.out_path, write_report(report));
  return 0;
}

int cmd_sample(CommonOptions& opt, int steps) {
  opt.apply();
  NamedBundle bundle;
  if (!opt.replay_path.empty()) {
    const ReportDocument input = read_report(read_file(opt.replay_path));
    std::vector<NamedBundle> bundles = replay_bundles(input);
    if (!opt.param_spec.empty()) {
      std::erase_if(bundles, [&](const NamedBundle& b) {
        return b.parameter_spec != opt.param_spec;
      });
    }
    if (bundles.size() != 1) {
      throw Error(ErrorKind::invalid_argument,
                  "select exactly one replay entry with --param");
    }
    bundle = std::move(bundles.front());
  } else {
    if (opt.network_path.empty() || opt.target_spec.empty() ||
        opt.param_spec.empty()) {
      throw Error(ErrorKind::invalid_argument,
                  "sampling needs --network, --target and --param "
                  "(or --replay REPORT)");
    }
    const NetworkDocument doc = parse_network(read_file(opt.network_path));
    std::optional<CaseDocument> case_doc;
    if (!opt.case_path.empty())
      case_doc = parse_case(read_file(opt.case_path), doc.network);
    const TargetSpec target = parse_target_spec(doc.network, opt.target_spec);
    const ParameterRef p = parse_parameter_spec(doc.network, opt.param_spec);
    const Evidence evidence = case_doc ? case_doc->evidence : Evidence{};
    const FunctionBundle fitted =
        fit_bundle(doc.network, p, target.variable, evidence,
                   {opt.config.fit_tol, opt.config.fallback});
    bundle.parameter_spec = format_parameter(doc.network, p);
    bundle.target = doc.network.variables[target.variable].name;
    bundle.value_names = doc.network.variables[target.variable].values;
    bundle.x0 = fitted.x0;
    bundle.functions = fitted.functions;
  }
  write_output(opt.out_path, sample_csv(bundle, steps));
  return 0;
}

int cmd_oracle_check(CommonOptions& opt, int grid, double tol,
                     std::uint64_t seed, bool seeded) {
  opt.apply();
  Network net;
  if (seeded && opt.network_path.empty()) {
    net = oracle::random_network(seed);
  } else {
    net = parse_network(read_file(opt.network_path)).network;
  }
  std::optional<CaseDocument> case_doc;
  if (!opt.case_path.empty())
    case_doc = parse_case(read_file(opt.case_path), net);
  const Evidence evidence = case_doc ? case_doc->evidence : Evidence{};
  const TargetSpec target = parse_target_spec(net, opt.target_spec);

  std::vector<ParameterRef> params;
  if (opt.all_params || opt.param_spec.empty()) {
    params = all_parameters(net);
  } else {
    params.push_back(parse_parameter_spec(net, opt.param_spec));
  }

  std::ostringstream out;
  double worst = 0.0;
  std::string first_failure;
  for (const ParameterRef& p : params) {
    const auto report = oracle::grid_check(net, p, target.variable, evidence,
                                           grid, tol, opt.config.enum_cap);
    const bool ok = report.passed(tol);
    worst = std::max(worst, report.max_abs_error);
    out << format_parameter(net, p) << ": max_abs_error="
        << report.max_abs_error << " skipped=" << report.skipped_points
        << (ok ? " ok" : " FAIL") << "\n";
    if (!ok && first_failure.empty()) first_failure = format_parameter(net, p);
  }
  out << "oracle-check: " << params.size() << " parameters, grid=" << grid
      << ", tol=" << tol << ", max_abs_error=" << worst << ", "
      << (first_failure.empty() ? "PASS" : "FAIL (" + first_failure + ")")
      << "\n";
  write_output(opt.out_path, out.str());
  return first_failure.empty() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "One-way sensitivity analysis of discrete Bayesian networks: exact "
      "sensitivity functions, derivatives, hyperbola vertices, and "
      "admissible deviations."};
  app.set_version_flag("--version", "bnsens 0.1.0");
  app.require_subcommand(1);

  CommonOptions opt;
  int steps = opt.config.sample_steps;
  int grid = 11;
  double tol = 1e-9;
  std::uint64_t seed = 1;

  auto* validate = app.add_subcommand(
      "validate", "check a network file against all invariants");
  validate->add_option("--network", opt.network_path, "network file")
      ->required();

  auto* infer = app.add_subcommand(
      "infer", "posterior of a target variable given an evidence case");
  infer->add_option("--network", opt.network_path, "network file")->required();
  infer->add_option("--case", opt.case_path, "evidence case file");
  infer->add_option("--target", opt.target_spec, "target variable")->required();
  infer->add_option("--out", opt.out_path, "output path (default stdout)");

  auto* analyze = app.add_subcommand(
      "analyze", "sensitivity functions, derivatives and vertices");
  auto* admissible = app.add_subcommand(
      "admissible", "analysis plus admissible deviations of the most likely "
                    "target value");
  for (CLI::App* cmd : {analyze, admissible}) {
    cmd->add_option("--network", opt.network_path, "network file");
    cmd->add_option("--replay", opt.replay_path,
                    "replay constants from a report document");
    cmd->add_option("--case", opt.case_path, "evidence case file");
    cmd->add_option("--cases", opt.cases_dir,
                    "directory of case files (batch mode)");
    cmd->add_option("--target", opt.target_spec,
                    "target variable, 'Var' or 'Var=value'");
    cmd->add_option("--param", opt.param_spec,
                    "parameter \"Var=value | P1=v1, P2=v2\"");
    cmd->add_flag("--all", opt.all_params, "analyze every parameter");
    cmd->add_option("--out", opt.out_path, "output path (default stdout)");
    add_threshold_flags(cmd, opt);
  }

  auto* sample = app.add_subcommand(
      "sample", "CSV of the sensitivity functions over [0,1]");
  sample->add_option("--network", opt.network_path, "network file");
  sample->add_option("--replay", opt.replay_path,
                     "replay constants from a report document");
  sample->add_option("--case", opt.case_path, "evidence case file");
  sample->add_option("--target", opt.target_spec, "target variable");
  sample->add_option("--param", opt.param_spec, "parameter spec");
  sample->add_option("--steps", steps, "number of rows (default 101)");
  sample->add_option("--out", opt.out_path, "output path (default stdout)");
  sample->add_flag("--uniform-fallback", opt.uniform_fallback,
                   "spread 1-x uniformly when a varied entry holds 1");

  auto* oracle_check = app.add_subcommand(
      "oracle-check", "compare fitted functions against brute-force "
                      "enumeration on a grid");
  oracle_check->add_option("--network", opt.network_path, "network file");
  oracle_check->add_option("--case", opt.case_path, "evidence case file");
  oracle_check->add_option("--target", opt.target_spec, "target variable")
      ->required();
  oracle_check->add_option("--param", opt.param_spec,
                           "single parameter (default: all)");
  oracle_check->add_flag("--all", opt.all_params, "check every parameter");
  oracle_check->add_option("--grid", grid, "grid points (default 11)");
  oracle_check->add_option("--tol", tol, "tolerance (default 1e-9)");
  auto* seed_opt = oracle_check->add_option(
      "--seed", seed, "run on a generated random network instead of a file");
  oracle_check->add_option("--out", opt.out_path, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    // help and version requests exit 0; real parse errors are input errors
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(validate)) return cmd_validate(opt.network_path);
    if (app.got_subcommand(infer)) return cmd_infer(opt);
    if (app.got_subcommand(analyze)) return cmd_analyze(opt, false);
    if (app.got_subcommand(admissible)) return cmd_analyze(opt, true);
    if (app.got_subcommand(sample)) return cmd_sample(opt, steps);
    if (app.got_subcommand(oracle_check))
      return cmd_oracle_check(opt, grid, tol, seed, seed_opt->count() > 0);
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return exit_code(err.category());
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
