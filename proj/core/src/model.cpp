#include "bnsens/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace bnsens {

namespace {

constexpr double kColumnSumTol = 1e-9;

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t");
  return std::string(s.substr(begin, end - begin + 1));
}

// "Var=value" -> (Var, value); both sides trimmed.
std::pair<std::string, std::string> split_assignment(std::string_view token) {
  const auto eq = token.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw Error(ErrorKind::invalid_argument,
                "expected 'Var=value' in parameter spec, got '" +
                    std::string(token) + "'");
  }
  return {trim(token.substr(0, eq)), trim(token.substr(eq + 1))};
}

}  // namespace

int Variable::value_index(std::string_view label) const {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == label) return static_cast<int>(i);
  }
  return -1;
}

int Cpt::num_configs() const {
  int n = 1;
  for (int c : parent_cards) n *= c;
  return n;
}

std::span<const double> Cpt::column(int config) const {
  return std::span<const double>(table).subspan(
      static_cast<std::size_t>(config) * cardinality, cardinality);
}

std::span<double> Cpt::column(int config) {
  return std::span<double>(table).subspan(
      static_cast<std::size_t>(config) * cardinality, cardinality);
}

int Cpt::config_index(std::span<const int> parent_config) const {
  if (parent_config.size() != parent_cards.size()) return -1;
  int index = 0;
  for (std::size_t i = 0; i < parent_cards.size(); ++i) {
    if (parent_config[i] < 0 || parent_config[i] >= parent_cards[i]) return -1;
    index = index * parent_cards[i] + parent_config[i];
  }
  return index;
}

std::vector<int> Cpt::config_tuple(int config) const {
  std::vector<int> tuple(parent_cards.size(), 0);
  for (std::size_t i = parent_cards.size(); i-- > 0;) {
    tuple[i] = config % parent_cards[i];
    config /= parent_cards[i];
  }
  return tuple;
}

int Network::variable_index(std::string_view name) const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

std::size_t Network::num_parameters() const {
  std::size_t n = 0;
  for (const Cpt& cpt : cpts) n += cpt.table.size();
  return n;
}

std::vector<std::string> validate_network(const Network& net) {
  std::vector<std::string> violations;
  auto add = [&violations](std::string msg) {
    violations.push_back(std::move(msg));
  };

  const int n = net.num_variables();
  if (net.parents.size() != static_cast<std::size_t>(n) ||
      net.cpts.size() != static_cast<std::size_t>(n)) {
    add("network: variables, parents and cpts lists have different lengths");
    return violations;  // nothing else is addressable
  }

  std::set<std::string> names;
  for (const Variable& v : net.variables) {
    if (!names.insert(v.name).second)
      add("variable '" + v.name + "': duplicate variable name");
    if (v.cardinality() < 2)
      add("variable '" + v.name + "': fewer than two values");
    std::set<std::string> labels(v.values.begin(), v.values.end());
    if (labels.size() != v.values.size())
      add("variable '" + v.name + "': duplicate value labels");
  }

  for (int i = 0; i < n; ++i) {
    for (int p : net.parents[i]) {
      if (p < 0 || p >= n) {
        add("variable '" + net.variables[i].name +
            "': parent reference out of range");
      } else if (p == i) {
        add("variable '" + net.variables[i].name + "': self-parent");
      }
    }
  }

  // Cycle check: Kahn's algorithm over the in-range parent arcs.
  {
    std::vector<int> pending_parents(n, 0);
    std::vector<std::vector<int>> children(n);
    for (int i = 0; i < n; ++i) {
      for (int p : net.parents[i]) {
        if (p >= 0 && p < n && p != i) {
          pending_parents[i] += 1;
          children[p].push_back(i);
        }
      }
    }
    std::vector<int> ready;
    for (int i = 0; i < n; ++i)
      if (pending_parents[i] == 0) ready.push_back(i);
    int processed = 0;
    while (!ready.empty()) {
      int v = ready.back();
      ready.pop_back();
      ++processed;
      for (int child : children[v])
        if (--pending_parents[child] == 0) ready.push_back(child);
    }
    if (processed != n) add("network: parent graph is cyclic");
  }

  for (int i = 0; i < n; ++i) {
    const Variable& var = net.variables[i];
    const Cpt& cpt = net.cpts[i];
    if (cpt.cardinality != var.cardinality()) {
      add("variable '" + var.name + "': CPT column length " +
          std::to_string(cpt.cardinality) + " does not match cardinality " +
          std::to_string(var.cardinality()));
      continue;
    }
    std::vector<int> expected_cards;
    bool parents_ok = true;
    for (int p : net.parents[i]) {
      if (p < 0 || p >= n) {
        parents_ok = false;
        break;
      }
      expected_cards.push_back(net.variables[p].cardinality());
    }
    if (!parents_ok) continue;
    if (cpt.parent_cards != expected_cards) {
      add("variable '" + var.name +
          "': CPT parent dimensions do not match the parent list");
      continue;
    }
    if (cpt.table.size() !=
        static_cast<std::size_t>(cpt.num_configs()) * cpt.cardinality) {
      add("variable '" + var.name + "': CPT has " +
          std::to_string(cpt.table.size()) + " entries, expected " +
          std::to_string(cpt.num_configs() * cpt.cardinality));
      continue;
    }
    for (int config = 0; config < cpt.num_configs(); ++config) {
      const auto column = cpt.column(config);
      double sum = 0.0;
      bool in_range = true;
      for (double p : column) {
        sum += p;
        if (!(p >= 0.0 && p <= 1.0)) in_range = false;
      }
      if (!in_range) {
        add("variable '" + var.name + "', column " + std::to_string(config) +
            ": entry outside [0, 1]");
      }
      if (std::abs(sum - 1.0) > kColumnSumTol) {
        std::ostringstream msg;
        msg << "variable '" << var.name << "', column " << config
            << ": column sum " << sum << " differs from 1 by more than 1e-9";
        add(msg.str());
      }
    }
  }

  return violations;
}

std::vector<double> covary_column(std::span<const double> column,
                                  int value_index, double x,
                                  CovaryFallback fallback) {
  const int m = static_cast<int>(column.size());
  if (value_index < 0 || value_index >= m) {
    throw Error(ErrorKind::invalid_argument,
                "value index out of range in covary_column");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw Error(ErrorKind::invalid_argument,
                "parameter value must lie in [0, 1]");
  }

  std::vector<double> result(column.begin(), column.end());
  result[value_index] = x;
  if (m == 2) {
    result[1 - value_index] = 1.0 - x;  // binary complement is forced
    return result;
  }

  // Scale the column-mates by (1-x)/rest so their mutual ratios survive.
  // rest is the actual mass off the varied entry, which keeps the output
  // sum at x + (1-x) even when the input column carries round-off.
  double rest = 0.0;
  for (int j = 0; j < m; ++j)
    if (j != value_index) rest += column[j];

  if (rest <= 0.0) {
    if (fallback == CovaryFallback::error) {
      throw Error(ErrorKind::covariation_undefined,
                  "co-variation undefined: varied entry holds probability 1 "
                  "in a column with more than two values");
    }
    const double share = (1.0 - x) / (m - 1);
    for (int j = 0; j < m; ++j)
      if (j != value_index) result[j] = share;
    return result;
  }

  const double scale = (1.0 - x) / rest;
  for (int j = 0; j < m; ++j)
    if (j != value_index) result[j] = column[j] * scale;
  return result;
}

void check_parameter(const Network& net, const ParameterRef& p) {
  if (p.variable < 0 || p.variable >= net.num_variables()) {
    throw Error(ErrorKind::unknown_parameter,
                "parameter addresses a variable outside the network");
  }
  const Cpt& cpt = net.cpts[p.variable];
  if (p.value_index < 0 || p.value_index >= cpt.cardinality) {
    throw Error(ErrorKind::unknown_parameter,
                "parameter value index out of range for variable '" +
                    net.variables[p.variable].name + "'");
  }
  if (cpt.config_index(p.parent_config) < 0) {
    throw Error(ErrorKind::unknown_parameter,
                "parameter parent configuration invalid for variable '" +
                    net.variables[p.variable].name + "'");
  }
}

Network apply_parameter(const Network& net, const ParameterRef& p, double x,
                        CovaryFallback fallback) {
  check_parameter(net, p);
  Network result = net;
  Cpt& cpt = result.cpts[p.variable];
  const int config = cpt.config_index(p.parent_config);
  const auto varied =
      covary_column(cpt.column(config), p.value_index, x, fallback);
  std::ranges::copy(varied, cpt.column(config).begin());
  return result;
}

double get_assessment(const Network& net, const ParameterRef& p) {
  check_parameter(net, p);
  const Cpt& cpt = net.cpts[p.variable];
  return cpt.column(cpt.config_index(p.parent_config))[p.value_index];
}

std::string format_parameter(const Network& net, const ParameterRef& p) {
  check_parameter(net, p);
  const Variable& var = net.variables[p.variable];
  std::string spec = var.name + "=" + var.values[p.value_index];
  if (p.parent_config.empty()) return spec;
  spec += " | ";
  const auto& parent_list = net.parents[p.variable];
  for (std::size_t i = 0; i < parent_list.size(); ++i) {
    const Variable& parent = net.variables[parent_list[i]];
    if (i > 0) spec += ", ";
    spec += parent.name + "=" + parent.values[p.parent_config[i]];
  }
  return spec;
}

ParameterRef parse_parameter_spec(const Network& net, std::string_view spec) {
  const auto bar = spec.find('|');
  const auto head = spec.substr(0, bar);

  ParameterRef p;
  const auto [var_name, value_label] = split_assignment(trim(head));
  p.variable = net.variable_index(var_name);
  if (p.variable < 0) {
    throw Error(ErrorKind::unknown_variable,
                "unknown variable '" + var_name + "' in parameter spec");
  }
  p.value_index = net.variables[p.variable].value_index(value_label);
  if (p.value_index < 0) {
    throw Error(ErrorKind::unknown_value, "variable '" + var_name +
                                              "' has no value '" +
                                              value_label + "'");
  }

  const auto& parent_list = net.parents[p.variable];
  p.parent_config.assign(parent_list.size(), -1);
  if (bar != std::string_view::npos) {
    std::string_view rest = spec.substr(bar + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string token = trim(rest.substr(0, comma));
      rest = comma == std::string_view::npos ? std::string_view{}
                                             : rest.substr(comma + 1);
      if (token.empty()) continue;
      const auto [parent_name, parent_value] = split_assignment(token);
      const int parent_index = net.variable_index(parent_name);
      const auto pos = std::ranges::find(parent_list, parent_index);
      if (parent_index < 0 || pos == parent_list.end()) {
        throw Error(ErrorKind::unknown_parameter,
                    "'" + parent_name + "' is not a parent of '" + var_name +
                        "'");
      }
      const int value = net.variables[parent_index].value_index(parent_value);
      if (value < 0) {
        throw Error(ErrorKind::unknown_value,
                    "parent '" + parent_name + "' has no value '" +
                        parent_value + "'");
      }
      p.parent_config[pos - parent_list.begin()] = value;
    }
  }
  for (std::size_t i = 0; i < parent_list.size(); ++i) {
    if (p.parent_config[i] < 0) {
      throw Error(ErrorKind::unknown_parameter,
                  "parameter spec for '" + var_name +
                      "' misses an assignment for parent '" +
                      net.variables[parent_list[i]].name + "'");
    }
  }
  return p;
}

std::vector<ParameterRef> all_parameters(const Network& net) {
  std::vector<ParameterRef> params;
  params.reserve(net.num_parameters());
  for (int v = 0; v < net.num_variables(); ++v) {
    const Cpt& cpt = net.cpts[v];
    for (int config = 0; config < cpt.num_configs(); ++config) {
      const auto tuple = cpt.config_tuple(config);
      for (int i = 0; i < cpt.cardinality; ++i) {
        params.push_back(ParameterRef{v, i, tuple});
      }
    }
  }
  return params;
}

}  // namespace bnsens
