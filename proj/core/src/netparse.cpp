#include "bnsens/netparse.hpp"

#include <sstream>

#include "json.hpp"

namespace bnsens {

namespace {

using nlohmann::json;

// nlohmann reports byte offsets; the format is line-oriented enough that
// 1-based line/column diagnostics are worth the small scan.
std::pair<std::size_t, std::size_t> offset_to_position(std::string_view text,
                                                       std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& err) {
    const auto [line, column] = offset_to_position(text, err.byte);
    std::ostringstream msg;
    msg << "syntax error at line " << line << ", column " << column << ": "
        << err.what();
    throw SyntaxError(msg.str(), line, column);
  }
}

[[noreturn]] void semantic(const std::string& message) {
  throw Error(ErrorKind::semantic_error, message);
}

double to_probability(const json& value, const std::string& where) {
  if (!value.is_number()) semantic(where + ": probability is not a number");
  return value.get<double>();
}

// Expected CPT keys: comma-joined parent value labels in declared parent
// order, the empty string for root variables.
std::vector<std::string> config_keys(const Network& net, int variable) {
  const auto& parent_list = net.parents[variable];
  std::vector<std::string> keys{""};
  bool first = true;
  for (int parent : parent_list) {
    std::vector<std::string> extended;
    extended.reserve(keys.size() * net.variables[parent].values.size());
    for (const std::string& prefix : keys) {
      for (const std::string& label : net.variables[parent].values) {
        extended.push_back(first ? label : prefix + "," + label);
      }
    }
    keys = std::move(extended);
    first = false;
  }
  return keys;
}

}  // namespace

NetworkDocument parse_network(std::string_view text) {
  NetworkDocument doc = parse_network_unchecked(text);
  const auto violations = validate_network(doc.network);
  if (!violations.empty()) {
    std::string message = "invalid network";
    for (const std::string& v : violations) message += "; " + v;
    semantic(message);
  }
  return doc;
}

NetworkDocument parse_network_unchecked(std::string_view text) {
  const json j = parse_json(text);
  if (!j.is_object()) semantic("network document must be a JSON object");

  NetworkDocument doc;
  if (!j.contains("format_version") || !j["format_version"].is_string())
    semantic("missing or non-string 'format_version'");
  doc.format_version = j["format_version"].get<std::string>();
  if (doc.format_version != "1")
    semantic("unrecognized format_version '" + doc.format_version + "'");

  Network& net = doc.network;
  if (j.contains("name")) {
    if (!j["name"].is_string()) semantic("'name' must be a string");
    net.name = j["name"].get<std::string>();
  }
  if (j.contains("description")) {
    if (!j["description"].is_string())
      semantic("'description' must be a string");
    doc.description = j["description"].get<std::string>();
  }

  if (!j.contains("variables") || !j["variables"].is_array())
    semantic("missing or non-array 'variables'");
  for (const json& jv : j["variables"]) {
    if (!jv.is_object() || !jv.contains("name") || !jv["name"].is_string())
      semantic("every variable needs a string 'name'");
    Variable var;
    var.name = jv["name"].get<std::string>();
    if (!jv.contains("values") || !jv["values"].is_array())
      semantic("variable '" + var.name + "': missing 'values' array");
    for (const json& label : jv["values"]) {
      if (!label.is_string())
        semantic("variable '" + var.name + "': value labels must be strings");
      var.values.push_back(label.get<std::string>());
    }
    if (net.variable_index(var.name) >= 0)
      semantic("duplicate variable name '" + var.name + "'");
    net.variables.push_back(std::move(var));
  }

  net.parents.resize(net.variables.size());
  for (std::size_t i = 0; i < net.variables.size(); ++i) {
    const json& jv = j["variables"][i];
    if (!jv.contains("parents")) continue;
    if (!jv["parents"].is_array())
      semantic("variable '" + net.variables[i].name +
               "': 'parents' must be an array");
    for (const json& parent : jv["parents"]) {
      if (!parent.is_string())
        semantic("variable '" + net.variables[i].name +
                 "': parent names must be strings");
      const int index = net.variable_index(parent.get<std::string>());
      if (index < 0)
        semantic("variable '" + net.variables[i].name + "': unknown parent '" +
                 parent.get<std::string>() + "'");
      net.parents[i].push_back(index);
    }
  }

  if (!j.contains("cpts") || !j["cpts"].is_object())
    semantic("missing or non-object 'cpts'");
  const json& jcpts = j["cpts"];
  for (const auto& [key, value] : jcpts.items()) {
    if (net.variable_index(key) < 0)
      semantic("cpts: unknown variable '" + key + "'");
    (void)value;
  }

  net.cpts.resize(net.variables.size());
  for (std::size_t i = 0; i < net.variables.size(); ++i) {
    const Variable& var = net.variables[i];
    if (!jcpts.contains(var.name))
      semantic("variable '" + var.name + "': missing CPT");
    const json& jcpt = jcpts[var.name];
    if (!jcpt.is_object())
      semantic("variable '" + var.name + "': CPT must be an object");

    Cpt& cpt = net.cpts[i];
    cpt.cardinality = var.cardinality();
    for (int parent : net.parents[i])
      cpt.parent_cards.push_back(net.variables[parent].cardinality());

    const auto keys = config_keys(net, static_cast<int>(i));
    if (jcpt.size() != keys.size())
      semantic("variable '" + var.name + "': CPT has " +
               std::to_string(jcpt.size()) + " columns, expected " +
               std::to_string(keys.size()));
    cpt.table.reserve(keys.size() * var.values.size());
    for (const std::string& key : keys) {
      if (!jcpt.contains(key))
        semantic("variable '" + var.name + "': missing CPT column '" + key +
                 "'");
      const json& column = jcpt[key];
      if (!column.is_array() || column.size() != var.values.size())
        semantic("variable '" + var.name + "', column '" + key +
                 "': expected " + std::to_string(var.values.size()) +
                 " probabilities");
      for (const json& p : column)
        cpt.table.push_back(
            to_probability(p, "variable '" + var.name + "', column '" + key +
                                  "'"));
    }
  }

  return doc;
}

std::string serialize_network(const NetworkDocument& doc) {
  const Network& net = doc.network;
  json j;
  j["format_version"] = doc.format_version.empty() ? "1" : doc.format_version;
  if (!net.name.empty()) j["name"] = net.name;
  if (doc.description) j["description"] = *doc.description;

  j["variables"] = json::array();
  for (std::size_t i = 0; i < net.variables.size(); ++i) {
    json jv;
    jv["name"] = net.variables[i].name;
    jv["values"] = net.variables[i].values;
    if (!net.parents[i].empty()) {
      json parents = json::array();
      for (int p : net.parents[i]) parents.push_back(net.variables[p].name);
      jv["parents"] = std::move(parents);
    }
    j["variables"].push_back(std::move(jv));
  }

  j["cpts"] = json::object();
  for (std::size_t i = 0; i < net.variables.size(); ++i) {
    const auto keys = config_keys(net, static_cast<int>(i));
    json jcpt = json::object();
    const Cpt& cpt = net.cpts[i];
    for (std::size_t config = 0; config < keys.size(); ++config) {
      const auto column = cpt.column(static_cast<int>(config));
      jcpt[keys[config]] = std::vector<double>(column.begin(), column.end());
    }
    j["cpts"][net.variables[i].name] = std::move(jcpt);
  }
  return j.dump(2) + "\n";
}

CaseDocument parse_case(std::string_view text, const Network& net) {
  const json j = parse_json(text);
  if (!j.is_object()) semantic("case document must be a JSON object");

  CaseDocument doc;
  if (!j.contains("case_id") || !j["case_id"].is_string())
    semantic("missing or non-string 'case_id'");
  doc.case_id = j["case_id"].get<std::string>();

  if (!j.contains("evidence") || !j["evidence"].is_object())
    semantic("missing or non-object 'evidence'");
  for (const auto& [name, label] : j["evidence"].items()) {
    const int variable = net.variable_index(name);
    if (variable < 0)
      throw Error(ErrorKind::unknown_variable,
                  "case '" + doc.case_id + "': unknown variable '" + name +
                      "'");
    if (!label.is_string())
      semantic("case '" + doc.case_id + "': evidence values must be strings");
    const int value = net.variables[variable].value_index(label.get<std::string>());
    if (value < 0)
      throw Error(ErrorKind::unknown_value,
                  "case '" + doc.case_id + "': variable '" + name +
                      "' has no value '" + label.get<std::string>() + "'");
    doc.evidence.assignments[variable] = value;
  }
  return doc;
}

std::string serialize_case(const CaseDocument& doc, const Network& net) {
  json j;
  j["case_id"] = doc.case_id;
  j["evidence"] = json::object();
  for (const auto& [variable, value] : doc.evidence.assignments) {
    j["evidence"][net.variables[variable].name] =
        net.variables[variable].values[value];
  }
  return j.dump(2) + "\n";
}

}  // namespace bnsens
