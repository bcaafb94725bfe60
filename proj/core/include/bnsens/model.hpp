#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bnsens/errors.hpp"

namespace bnsens {

/// One discrete variable: a name plus an ordered list of value labels.
struct Variable {
  std::string name;
  std::vector<std::string> values;

  int cardinality() const { return static_cast<int>(values.size()); }
  int value_index(std::string_view label) const;  // -1 if absent
};

/// Conditional probability table of one variable. Columns are stored densely,
/// one column per parent configuration; within a column, entries follow the
/// variable's value order. Configuration indices enumerate parent value
/// tuples in declaration order, first parent most significant.
struct Cpt {
  int cardinality = 0;
  std::vector<int> parent_cards;
  std::vector<double> table;  // size = num_configs() * cardinality

  int num_configs() const;
  std::span<const double> column(int config) const;
  std::span<double> column(int config);
  int config_index(std::span<const int> parent_config) const;
  std::vector<int> config_tuple(int config) const;
};

/// A discrete Bayesian network over named variables. Values are plain data;
/// treat instances as immutable after construction and copy-on-write via
/// apply_parameter. Safe to share read-only across threads.
struct Network {
  std::vector<Variable> variables;
  std::vector<std::vector<int>> parents;  // indices into variables
  std::vector<Cpt> cpts;
  std::string name;

  int num_variables() const { return static_cast<int>(variables.size()); }
  int variable_index(std::string_view name) const;  // -1 if absent
  /// Total number of CPT entries (= number of analyzable parameters).
  std::size_t num_parameters() const;
};

/// Addresses one CPT entry p(value_index-th value | parent_config).
struct ParameterRef {
  int variable = -1;
  int value_index = -1;
  std::vector<int> parent_config;

  bool operator==(const ParameterRef&) const = default;
};

/// Partial assignment of observed values, keyed by variable index.
struct Evidence {
  std::map<int, int> assignments;

  bool empty() const { return assignments.empty(); }
};

struct Distribution {
  int target = -1;
  std::vector<double> probs;
};

/// Behaviour of covary_column when the varied entry holds all the mass
/// (p = 1 with more than two values): refuse, or spread 1-x uniformly.
enum class CovaryFallback { error, uniform };

/// Checks every structural and numeric invariant; returns human-readable
/// violations (empty means valid). Violations are data, not failures.
std::vector<std::string> validate_network(const Network& net);

/// Proportional co-variation: sets entry i to x and rescales the remaining
/// entries so their mutual ratios are preserved and the column still sums
/// to one. Binary columns are forced to (x, 1-x).
std::vector<double> covary_column(std::span<const double> column,
                                  int value_index, double x,
                                  CovaryFallback fallback = CovaryFallback::error);

/// Returns a copy of the network with the addressed column co-varied so that
/// the addressed entry equals x. The input network is untouched.
Network apply_parameter(const Network& net, const ParameterRef& p, double x,
                        CovaryFallback fallback = CovaryFallback::error);

/// Reads the current assessment stored for the parameter.
double get_assessment(const Network& net, const ParameterRef& p);

/// Throws unknown-parameter unless p addresses an existing entry of net.
void check_parameter(const Network& net, const ParameterRef& p);

/// Canonical parameter spelling: "Var=value | Parent1=v1, Parent2=v2"
/// (no bar for root variables).
std::string format_parameter(const Network& net, const ParameterRef& p);

/// Parses the spelling above; whitespace around tokens is ignored.
ParameterRef parse_parameter_spec(const Network& net, std::string_view spec);

/// Enumerates every parameter of the network in deterministic order:
/// variables in declaration order, then parent configurations, then values.
std::vector<ParameterRef> all_parameters(const Network& net);

}  // namespace bnsens
