#include "bnsens/report.hpp"

#include <algorithm>
#include <cmath>

#include "bnsens/errors.hpp"
#include "json.hpp"

namespace bnsens {

namespace {

using nlohmann::json;

const char* class_name(FunctionClass cls) {
  switch (cls) {
    case FunctionClass::constant:
      return "constant";
    case FunctionClass::linear:
      return "linear";
    default:
      return "hyperbolic";
  }
}

FunctionClass class_from_name(const std::string& name) {
  if (name == "constant") return FunctionClass::constant;
  if (name == "linear") return FunctionClass::linear;
  if (name == "hyperbolic") return FunctionClass::hyperbolic;
  throw Error(ErrorKind::semantic_error,
              "unknown function class '" + name + "' in report");
}

json deviation_to_json(const AdmissibleDeviation& dev,
                       const std::vector<std::string>& value_names) {
  json j;
  j["left"] = dev.left_is_boundary() ? json("inf") : json(dev.left);
  j["right"] = dev.right_is_boundary() ? json("inf") : json(dev.right);
  if (dev.leader_at_x0 >= 0 &&
      dev.leader_at_x0 < static_cast<int>(value_names.size())) {
    j["leader"] = value_names[dev.leader_at_x0];
  }
  if (dev.crossing_left) j["crossing_left"] = *dev.crossing_left;
  if (dev.crossing_right) j["crossing_right"] = *dev.crossing_right;
  if (dev.restricted) {
    j["restricted"] = true;
    j["interval"] = json::array({dev.interval_lo, dev.interval_hi});
  }
  return j;
}

json entry_to_json(const ReportEntry& entry) {
  json j;
  j["parameter"] = entry.parameter_spec;
  j["x0"] = entry.x0;
  j["denominator"] = {{"c", entry.c}, {"d", entry.d}};
  j["max_sensitivity_value"] = entry.max_sensitivity;
  j["values"] = json::array();
  std::vector<std::string> value_names;
  for (const ValueReport& value : entry.values) {
    value_names.push_back(value.value);
    json jv;
    jv["value"] = value.value;
    jv["a"] = value.a;
    jv["b"] = value.b;
    jv["class"] = class_name(value.cls);
    if (value.sensitivity) jv["sensitivity_value"] = *value.sensitivity;
    if (value.vertex) {
      jv["vertex"] = {
          {"x_hat", value.vertex->x_hat},
          {"branches", json::array({value.vertex->branches.first,
                                    value.vertex->branches.second})},
          {"in_range", value.vertex->in_unit_interval},
      };
      if (!std::isnan(value.vertex->distance_to_assessment))
        jv["vertex"]["distance"] = value.vertex->distance_to_assessment;
    }
    j["values"].push_back(std::move(jv));
  }
  if (entry.deviation)
    j["admissible_deviation"] = deviation_to_json(*entry.deviation, value_names);
  j["selection_flags"] = entry.selection_flags;
  j["degenerate_flags"] = entry.degenerate_flags;
  return j;
}

ReportEntry entry_from_json(const json& j) {
  ReportEntry entry;
  entry.parameter_spec = j.at("parameter").get<std::string>();
  entry.x0 = j.at("x0").get<double>();
  entry.c = j.at("denominator").at("c").get<double>();
  entry.d = j.at("denominator").at("d").get<double>();
  entry.max_sensitivity = j.value("max_sensitivity_value", 0.0);
  for (const json& jv : j.at("values")) {
    ValueReport value;
    value.value = jv.at("value").get<std::string>();
    value.a = jv.at("a").get<double>();
    value.b = jv.at("b").get<double>();
    value.cls = class_from_name(jv.value("class", "constant"));
    if (jv.contains("sensitivity_value"))
      value.sensitivity = jv["sensitivity_value"].get<double>();
    if (jv.contains("vertex")) {
      VertexInfo vertex;
      vertex.x_hat = jv["vertex"].at("x_hat").get<double>();
      vertex.branches = {jv["vertex"].at("branches")[0].get<double>(),
                         jv["vertex"].at("branches")[1].get<double>()};
      vertex.in_unit_interval = jv["vertex"].value("in_range", false);
      if (jv["vertex"].contains("distance"))
        vertex.distance_to_assessment = jv["vertex"]["distance"].get<double>();
      value.vertex = vertex;
    }
    entry.values.push_back(std::move(value));
  }
  if (j.contains("admissible_deviation")) {
    const json& jd = j["admissible_deviation"];
    AdmissibleDeviation dev;
    dev.left = jd.at("left").is_string() ? kBoundary : jd["left"].get<double>();
    dev.right =
        jd.at("right").is_string() ? kBoundary : jd["right"].get<double>();
    if (jd.contains("crossing_left"))
      dev.crossing_left = jd["crossing_left"].get<double>();
    if (jd.contains("crossing_right"))
      dev.crossing_right = jd["crossing_right"].get<double>();
    dev.restricted = jd.value("restricted", false);
    if (jd.contains("interval")) {
      dev.interval_lo = jd["interval"][0].get<double>();
      dev.interval_hi = jd["interval"][1].get<double>();
    }
    if (jd.contains("leader")) {
      const std::string leader = jd["leader"].get<std::string>();
      for (std::size_t i = 0; i < entry.values.size(); ++i)
        if (entry.values[i].value == leader) dev.leader_at_x0 = static_cast<int>(i);
    }
    entry.deviation = dev;
  }
  if (j.contains("selection_flags"))
    entry.selection_flags = j["selection_flags"].get<std::vector<std::string>>();
  if (j.contains("degenerate_flags"))
    entry.degenerate_flags = j["degenerate_flags"].get<std::vector<std::string>>();
  return entry;
}

}  // namespace

void AnalysisConfig::check() const {
  const bool ok = vertex_delta > 0.0 && rho_abs > 0.0 && rho_rel > 0.0 &&
                  sample_steps >= 2 && fit_tol > 0.0 && enum_cap > 0 &&
                  threads >= 0;
  if (!ok) {
    throw Error(ErrorKind::invalid_argument,
                "analysis thresholds must be positive (and steps at least 2)");
  }
}

FunctionBundle NamedBundle::to_function_bundle() const {
  FunctionBundle bundle;
  bundle.x0 = x0;
  bundle.functions = functions;
  return bundle;
}

bool ReportEntry::all_constant() const {
  return std::ranges::all_of(values, [](const ValueReport& v) {
    return v.cls == FunctionClass::constant;
  });
}

void annotate_selection(ReportEntry& entry, const AnalysisConfig& config) {
  entry.selection_flags.clear();

  if (entry.max_sensitivity > 1.0)
    entry.selection_flags.push_back(kFlagHighSensitivity);

  bool vertex_close = false;
  for (const ValueReport& value : entry.values) {
    if (!value.vertex) continue;
    const double x_hat = value.vertex->x_hat;
    if (x_hat < -config.vertex_delta || x_hat > 1.0 + config.vertex_delta)
      continue;
    if (std::abs(entry.x0 - x_hat) < config.vertex_delta) vertex_close = true;
  }
  if (vertex_close) entry.selection_flags.push_back(kFlagVertexProximity);

  if (entry.deviation) {
    double smallest = kBoundary;
    if (!entry.deviation->left_is_boundary())
      smallest = std::min(smallest, entry.deviation->left);
    if (!entry.deviation->right_is_boundary())
      smallest = std::min(smallest, entry.deviation->right);
    if (smallest < std::max(config.rho_abs, config.rho_rel * entry.x0))
      entry.selection_flags.push_back(kFlagSmallDeviation);
  }
}

std::vector<ReportEntry> select_parameters(std::vector<ReportEntry> entries,
                                           const AnalysisConfig& config) {
  config.check();
  std::vector<ReportEntry> selected;
  for (ReportEntry& entry : entries) {
    annotate_selection(entry, config);
    if (entry.selected()) selected.push_back(entry);
  }
  return selected;
}

std::string write_report(const ReportDocument& doc) {
  // Canonical entry order: strongest sensitivity first, parameter spelling
  // as the stable tie-break. Output bytes do not depend on input order.
  std::vector<const ReportEntry*> order;
  order.reserve(doc.entries.size());
  for (const ReportEntry& entry : doc.entries) order.push_back(&entry);
  std::ranges::sort(order, [](const ReportEntry* x, const ReportEntry* y) {
    if (x->max_sensitivity != y->max_sensitivity)
      return x->max_sensitivity > y->max_sensitivity;
    return x->parameter_spec < y->parameter_spec;
  });

  json j;
  j["kind"] = "sensitivity-report";
  j["format_version"] = "1";
  if (!doc.network.empty()) j["network"] = doc.network;
  if (doc.case_id) j["case_id"] = *doc.case_id;
  if (!doc.target.empty()) j["target"] = doc.target;
  if (doc.target_value) j["target_value"] = *doc.target_value;
  j["parameters_analyzed"] = doc.parameters_analyzed;
  j["constant_only"] = doc.constant_only;
  j["entries"] = json::array();
  for (const ReportEntry* entry : order)
    j["entries"].push_back(entry_to_json(*entry));
  return j.dump(2) + "\n";
}

std::string write_report(const std::vector<ReportEntry>& entries) {
  ReportDocument doc;
  doc.entries = entries;
  doc.parameters_analyzed = entries.size();
  return write_report(doc);
}

ReportDocument read_report(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& err) {
    throw Error(ErrorKind::syntax_error,
                std::string("report is not valid JSON: ") + err.what());
  }
  if (!j.is_object() || !j.contains("entries"))
    throw Error(ErrorKind::semantic_error, "report document has no entries");

  ReportDocument doc;
  doc.network = j.value("network", "");
  if (j.contains("case_id")) doc.case_id = j["case_id"].get<std::string>();
  doc.target = j.value("target", "");
  if (j.contains("target_value"))
    doc.target_value = j["target_value"].get<std::string>();
  doc.parameters_analyzed = j.value("parameters_analyzed", std::size_t{0});
  doc.constant_only = j.value("constant_only", std::size_t{0});
  try {
    for (const json& je : j["entries"]) doc.entries.push_back(entry_from_json(je));
  } catch (const json::exception& err) {
    throw Error(ErrorKind::semantic_error,
                std::string("malformed report entry: ") + err.what());
  }
  return doc;
}

std::string write_batch_report(const std::vector<ReportDocument>& docs) {
  json j;
  j["kind"] = "batch-report";
  j["format_version"] = "1";
  j["cases"] = json::array();
  std::map<std::string, std::size_t> selected_counts;
  for (const ReportDocument& doc : docs) {
    j["cases"].push_back(json::parse(write_report(doc)));
    for (const ReportEntry& entry : doc.entries) {
      if (entry.selected()) selected_counts[entry.parameter_spec] += 1;
    }
  }
  j["summary"] = {
      {"cases", docs.size()},
      {"parameter_selected_counts", selected_counts},
  };
  return j.dump(2) + "\n";
}

std::vector<NamedBundle> replay_bundles(const ReportDocument& doc) {
  std::vector<NamedBundle> bundles;
  bundles.reserve(doc.entries.size());
  for (const ReportEntry& entry : doc.entries) {
    NamedBundle bundle;
    bundle.parameter_spec = entry.parameter_spec;
    bundle.target = doc.target;
    bundle.x0 = entry.x0;
    for (const ValueReport& value : entry.values) {
      bundle.value_names.push_back(value.value);
      bundle.functions.push_back(
          RationalLinearFunction{value.a, value.b, entry.c, entry.d});
    }
    if (bundle.functions.empty()) {
      throw Error(ErrorKind::semantic_error,
                  "report entry '" + entry.parameter_spec +
                      "' carries no function constants to replay");
    }
    bundles.push_back(std::move(bundle));
  }
  return bundles;
}

}  // namespace bnsens
