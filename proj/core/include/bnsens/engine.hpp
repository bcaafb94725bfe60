#pragma once

#include <set>
#include <span>
#include <vector>

#include "bnsens/model.hpp"

namespace bnsens {

/// Dense table over an ordered scope of variable indices. Entries are
/// addressed mixed-radix, first scope variable most significant.
struct Factor {
  std::vector<int> scope;
  std::vector<int> card;
  std::vector<double> table;

  static Factor unit() { return Factor{{}, {}, {1.0}}; }
  std::size_t size() const { return table.size(); }
};

/// Joint probabilities Pr(target = a_i, e) plus their sum Pr(e).
struct QueryResult {
  std::vector<double> joint;
  double evidence_prob = 0.0;
};

/// Pointwise product over the union scope.
Factor factor_product(const Factor& f, const Factor& g);

/// Sums out one variable of the scope.
Factor factor_marginalize(const Factor& f, int variable);

/// Fixes one scope variable to an observed value and drops it from the scope.
Factor factor_reduce(const Factor& f, int variable, int value);

/// Min-fill elimination order over the moralized graph of the sliced
/// factors. Every variable outside `keep` appears exactly once; ties are
/// broken by lexicographic variable name. Evidence variables carry no edges
/// (their factors are sliced) and therefore surface early as no-ops.
std::vector<int> elimination_order(const Network& net,
                                   const std::set<int>& keep,
                                   const std::set<int>& evidence_vars);

/// Exact inference by variable elimination. joint[i] = Pr(target=value_i, e);
/// evidence_prob is their sum. Pr(e) = 0 is a valid result.
QueryResult query(const Network& net, int target, const Evidence& e);

/// Same computation with a caller-supplied elimination order (each
/// non-target, non-evidence variable exactly once).
QueryResult query_with_order(const Network& net, int target, const Evidence& e,
                             std::span<const int> order);

}  // namespace bnsens
