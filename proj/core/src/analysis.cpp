#include "bnsens/analysis.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <thread>

#include "bnsens/admissible.hpp"
#include "bnsens/errors.hpp"

namespace bnsens {

namespace {

constexpr double kPoleTol = 1e-12;

std::string format_double(double value) {
  char buffer[32];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

// Shared entry construction for fitted and replayed bundles. The summary
// statistics follow the ReportEntry contract and span all target values;
// a focused target value is recorded at the document level only.
ReportEntry build_entry(const NamedBundle& bundle, const AnalysisConfig& config,
                        bool with_deviation) {
  if (bundle.functions.empty()) {
    throw Error(ErrorKind::invalid_argument,
                "bundle '" + bundle.parameter_spec + "' carries no functions");
  }
  ReportEntry entry;
  entry.parameter_spec = bundle.parameter_spec;
  entry.x0 = bundle.x0;
  entry.c = bundle.functions.front().c;
  entry.d = bundle.functions.front().d;

  const double den_x0 = std::fma(entry.c, bundle.x0, entry.d);
  if (std::abs(den_x0) <= kPoleTol)
    entry.degenerate_flags.push_back("pole_at_assessment");
  if (std::abs(entry.d) <= kPoleTol)
    entry.degenerate_flags.push_back("denominator_zero_at_0");
  if (std::abs(entry.c + entry.d) <= kPoleTol)
    entry.degenerate_flags.push_back("denominator_zero_at_1");

  entry.max_sensitivity = 0.0;
  for (std::size_t i = 0; i < bundle.functions.size(); ++i) {
    const RationalLinearFunction& f = bundle.functions[i];
    ValueReport value;
    value.value = i < bundle.value_names.size() ? bundle.value_names[i]
                                                : "v" + std::to_string(i);
    value.a = f.a;
    value.b = f.b;
    value.cls = classify(f);
    if (std::abs(den_x0) > kPoleTol)
      value.sensitivity = sensitivity_value(f, bundle.x0);
    if (value.cls == FunctionClass::hyperbolic)
      value.vertex = vertex(f, bundle.x0);
    if (value.sensitivity)
      entry.max_sensitivity = std::max(entry.max_sensitivity, *value.sensitivity);

    entry.values.push_back(std::move(value));
  }

  if (with_deviation) {
    try {
      entry.deviation = admissible_deviation(bundle.to_function_bundle());
      if (entry.deviation->restricted)
        entry.degenerate_flags.push_back("deviation_restricted_by_pole");
    } catch (const Error& err) {
      switch (err.kind()) {
        case ErrorKind::total_tie:
          entry.degenerate_flags.push_back("total_tie");
          break;
        case ErrorKind::tie_at_assessment:
          entry.degenerate_flags.push_back("tie_at_assessment");
          break;
        case ErrorKind::pole_at_x:
          entry.degenerate_flags.push_back("pole_at_assessment");
          break;
        default:
          throw;
      }
    }
  }

  annotate_selection(entry, config);
  return entry;
}

}  // namespace

ReportEntry analyze_parameter(const Network& net, const ParameterRef& p,
                              int target, const Evidence& e,
                              const AnalysisConfig& config,
                              bool with_deviation) {
  const FunctionBundle fitted =
      fit_bundle(net, p, target, e, {config.fit_tol, config.fallback});

  NamedBundle bundle;
  bundle.parameter_spec = format_parameter(net, p);
  bundle.target = net.variables[target].name;
  bundle.value_names = net.variables[target].values;
  bundle.x0 = fitted.x0;
  bundle.functions = fitted.functions;
  return build_entry(bundle, config, with_deviation);
}

ReportEntry analyze_bundle(const NamedBundle& bundle,
                           const AnalysisConfig& config, bool with_deviation) {
  return build_entry(bundle, config, with_deviation);
}

ReportDocument analyze_network(const Network& net,
                               const std::optional<CaseDocument>& case_doc,
                               int target, std::optional<int> target_value,
                               const std::vector<ParameterRef>& params,
                               const AnalysisConfig& config,
                               bool with_deviation) {
  config.check();
  const Evidence evidence = case_doc ? case_doc->evidence : Evidence{};

  std::vector<ReportEntry> entries(params.size());
  std::vector<std::exception_ptr> failures(params.size());

  auto run_one = [&](std::size_t index) {
    try {
      entries[index] = analyze_parameter(net, params[index], target, evidence,
                                         config, with_deviation);
    } catch (const Error& err) {
      if (err.kind() == ErrorKind::covariation_undefined) {
        // A p=1 column with more than two values cannot be varied under
        // the default scheme; record the parameter instead of failing the
        // whole run.
        ReportEntry& entry = entries[index];
        entry.parameter_spec = format_parameter(net, params[index]);
        entry.x0 = get_assessment(net, params[index]);
        entry.degenerate_flags.push_back("covariation_undefined");
      } else {
        failures[index] = std::current_exception();
      }
    } catch (...) {
      failures[index] = std::current_exception();
    }
  };

  unsigned worker_count = config.threads > 0
                              ? static_cast<unsigned>(config.threads)
                              : std::max(1u, std::thread::hardware_concurrency());
  worker_count = std::min<unsigned>(
      worker_count, std::max<std::size_t>(params.size(), 1));
  if (worker_count <= 1) {
    for (std::size_t i = 0; i < params.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> cursor{0};
    std::vector<std::thread> workers;
    workers.reserve(worker_count);
    for (unsigned w = 0; w < worker_count; ++w) {
      workers.emplace_back([&] {
        for (;;) {
          const std::size_t index = cursor.fetch_add(1);
          if (index >= params.size()) return;
          run_one(index);
        }
      });
    }
    for (std::thread& worker : workers) worker.join();
  }

  // Deterministic failure surface: the first parameter in input order wins.
  for (const std::exception_ptr& failure : failures)
    if (failure) std::rethrow_exception(failure);

  ReportDocument doc;
  doc.network = net.name;
  if (case_doc) doc.case_id = case_doc->case_id;
  doc.target = net.variables[target].name;
  if (target_value)
    doc.target_value = net.variables[target].values[*target_value];
  doc.parameters_analyzed = params.size();
  for (ReportEntry& entry : entries) {
    if (!entry.values.empty() && entry.all_constant()) {
      doc.constant_only += 1;  // influential-parameter filter
    } else {
      doc.entries.push_back(std::move(entry));
    }
  }
  return doc;
}

std::string sample_csv(const NamedBundle& bundle, int steps) {
  if (steps < 2) {
    throw Error(ErrorKind::invalid_argument,
                "sampling needs at least 2 steps");
  }
  if (bundle.functions.empty()) {
    throw Error(ErrorKind::invalid_argument,
                "bundle '" + bundle.parameter_spec + "' carries no functions");
  }
  std::string csv = "x";
  for (const std::string& name : bundle.value_names) csv += "," + name;
  csv += "\n";

  const double c = bundle.functions.front().c;
  const double d = bundle.functions.front().d;
  for (int k = 0; k < steps; ++k) {
    const double x = static_cast<double>(k) / (steps - 1);
    csv += format_double(x);
    if (std::abs(std::fma(c, x, d)) <= kPoleTol) {
      for (std::size_t i = 0; i < bundle.functions.size(); ++i) csv += ",";
      csv += ",pole";
    } else {
      for (const RationalLinearFunction& f : bundle.functions)
        csv += "," + format_double(eval(f, x));
    }
    csv += "\n";
  }
  return csv;
}

TargetSpec parse_target_spec(const Network& net, std::string_view spec) {
  TargetSpec target;
  const auto eq = spec.find('=');
  const std::string name(spec.substr(0, eq));
  target.variable = net.variable_index(name);
  if (target.variable < 0) {
    throw Error(ErrorKind::unknown_variable,
                "unknown target variable '" + name + "'");
  }
  if (eq != std::string_view::npos) {
    const std::string label(spec.substr(eq + 1));
    const int value = net.variables[target.variable].value_index(label);
    if (value < 0) {
      throw Error(ErrorKind::unknown_value,
                  "target variable '" + name + "' has no value '" + label +
                      "'");
    }
    target.value = value;
  }
  return target;
}

}  // namespace bnsens
