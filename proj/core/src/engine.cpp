#include "bnsens/engine.hpp"

#include <algorithm>
#include <cassert>

#include "bnsens/errors.hpp"

namespace bnsens {

namespace {

int scope_position(const Factor& f, int variable) {
  const auto it = std::ranges::find(f.scope, variable);
  return it == f.scope.end() ? -1 : static_cast<int>(it - f.scope.begin());
}

std::size_t table_size(const std::vector<int>& card) {
  std::size_t n = 1;
  for (int c : card) n *= static_cast<std::size_t>(c);
  return n;
}

// Builds the CPT factor of one variable: scope = parents + self in
// ascending variable order, entries aligned with p(v | parents).
Factor cpt_factor(const Network& net, int v) {
  const Cpt& cpt = net.cpts[v];
  const auto& parent_list = net.parents[v];

  Factor f;
  f.scope = parent_list;
  f.scope.push_back(v);
  std::ranges::sort(f.scope);
  f.card.reserve(f.scope.size());
  for (int s : f.scope) f.card.push_back(net.variables[s].cardinality());
  f.table.assign(table_size(f.card), 0.0);

  // Walk all (parent config, value) pairs and scatter into the sorted scope.
  const int m = cpt.cardinality;
  std::vector<int> assignment(f.scope.size(), 0);
  const int self_pos = scope_position(f, v);
  std::vector<int> parent_pos(parent_list.size());
  for (std::size_t i = 0; i < parent_list.size(); ++i)
    parent_pos[i] = scope_position(f, parent_list[i]);

  for (int config = 0; config < cpt.num_configs(); ++config) {
    const auto tuple = cpt.config_tuple(config);
    for (std::size_t i = 0; i < parent_list.size(); ++i)
      assignment[parent_pos[i]] = tuple[i];
    const auto column = cpt.column(config);
    for (int value = 0; value < m; ++value) {
      assignment[self_pos] = value;
      std::size_t index = 0;
      for (std::size_t k = 0; k < f.scope.size(); ++k)
        index = index * f.card[k] + assignment[k];
      f.table[index] = column[value];
    }
  }
  return f;
}

struct FillGraph {
  std::vector<std::string> names;
  std::vector<std::vector<char>> adj;
  std::vector<char> removed;

  int fill_count(int v) const {
    int fill = 0;
    std::vector<int> nbrs;
    for (int u = 0; u < static_cast<int>(adj.size()); ++u)
      if (!removed[u] && u != v && adj[v][u]) nbrs.push_back(u);
    for (std::size_t i = 0; i < nbrs.size(); ++i)
      for (std::size_t j = i + 1; j < nbrs.size(); ++j)
        if (!adj[nbrs[i]][nbrs[j]]) ++fill;
    return fill;
  }

  void eliminate(int v) {
    std::vector<int> nbrs;
    for (int u = 0; u < static_cast<int>(adj.size()); ++u)
      if (!removed[u] && u != v && adj[v][u]) nbrs.push_back(u);
    for (std::size_t i = 0; i < nbrs.size(); ++i)
      for (std::size_t j = i + 1; j < nbrs.size(); ++j)
        adj[nbrs[i]][nbrs[j]] = adj[nbrs[j]][nbrs[i]] = 1;
    removed[v] = 1;
  }
};

}  // namespace

Factor factor_product(const Factor& f, const Factor& g) {
  Factor result;
  result.scope = f.scope;
  for (std::size_t i = 0; i < g.scope.size(); ++i) {
    if (scope_position(result, g.scope[i]) < 0) {
      result.scope.push_back(g.scope[i]);
    }
  }
  std::ranges::sort(result.scope);

  result.card.reserve(result.scope.size());
  for (int v : result.scope) {
    const int pf = scope_position(f, v);
    result.card.push_back(pf >= 0 ? f.card[pf]
                                  : g.card[scope_position(g, v)]);
  }
  result.table.assign(table_size(result.card), 0.0);

  // Per result-scope strides into f and g (0 where the variable is absent).
  const std::size_t k = result.scope.size();
  std::vector<std::size_t> stride_f(k, 0), stride_g(k, 0);
  {
    std::size_t s = 1;
    for (std::size_t i = f.scope.size(); i-- > 0;) {
      stride_f[scope_position(result, f.scope[i])] = s;
      s *= f.card[i];
    }
    s = 1;
    for (std::size_t i = g.scope.size(); i-- > 0;) {
      stride_g[scope_position(result, g.scope[i])] = s;
      s *= g.card[i];
    }
  }

  std::vector<int> assignment(k, 0);
  std::size_t fi = 0, gi = 0;
  for (std::size_t out = 0; out < result.table.size(); ++out) {
    result.table[out] = f.table[fi] * g.table[gi];
    // Odometer increment, last scope variable fastest.
    for (std::size_t pos = k; pos-- > 0;) {
      if (++assignment[pos] < result.card[pos]) {
        fi += stride_f[pos];
        gi += stride_g[pos];
        break;
      }
      assignment[pos] = 0;
      fi -= stride_f[pos] * (result.card[pos] - 1);
      gi -= stride_g[pos] * (result.card[pos] - 1);
    }
  }
  return result;
}

Factor factor_marginalize(const Factor& f, int variable) {
  const int pos = scope_position(f, variable);
  if (pos < 0) {
    throw Error(ErrorKind::variable_not_in_scope,
                "cannot marginalize a variable outside the factor scope");
  }

  Factor result;
  result.scope = f.scope;
  result.scope.erase(result.scope.begin() + pos);
  result.card = f.card;
  result.card.erase(result.card.begin() + pos);
  result.table.assign(table_size(result.card), 0.0);

  std::size_t inner = 1;  // stride of the summed variable
  for (std::size_t i = f.scope.size(); i-- > static_cast<std::size_t>(pos) + 1;)
    inner *= f.card[i];
  const int m = f.card[pos];
  const std::size_t block = inner * m;

  std::size_t out = 0;
  for (std::size_t base = 0; base < f.table.size(); base += block) {
    for (std::size_t low = 0; low < inner; ++low, ++out) {
      double sum = 0.0;
      for (int v = 0; v < m; ++v) sum += f.table[base + v * inner + low];
      result.table[out] = sum;
    }
  }
  return result;
}

Factor factor_reduce(const Factor& f, int variable, int value) {
  const int pos = scope_position(f, variable);
  if (pos < 0) {
    throw Error(ErrorKind::variable_not_in_scope,
                "cannot reduce a variable outside the factor scope");
  }
  assert(value >= 0 && value < f.card[pos]);

  Factor result;
  result.scope = f.scope;
  result.scope.erase(result.scope.begin() + pos);
  result.card = f.card;
  result.card.erase(result.card.begin() + pos);
  result.table.reserve(table_size(result.card));

  std::size_t inner = 1;
  for (std::size_t i = f.scope.size(); i-- > static_cast<std::size_t>(pos) + 1;)
    inner *= f.card[i];
  const std::size_t block = inner * f.card[pos];

  for (std::size_t base = 0; base < f.table.size(); base += block) {
    const std::size_t offset = base + static_cast<std::size_t>(value) * inner;
    for (std::size_t low = 0; low < inner; ++low)
      result.table.push_back(f.table[offset + low]);
  }
  return result;
}

std::vector<int> elimination_order(const Network& net,
                                   const std::set<int>& keep,
                                   const std::set<int>& evidence_vars) {
  const int n = net.num_variables();
  FillGraph graph;
  graph.names.reserve(n);
  for (const Variable& v : net.variables) graph.names.push_back(v.name);
  graph.adj.assign(n, std::vector<char>(n, 0));
  graph.removed.assign(n, 0);

  // Moralize over the sliced factor scopes: evidence variables drop out of
  // each scope, but the rest of the scope stays mutually connected.
  for (int v = 0; v < n; ++v) {
    std::vector<int> scope;
    if (!evidence_vars.contains(v)) scope.push_back(v);
    for (int p : net.parents[v])
      if (!evidence_vars.contains(p)) scope.push_back(p);
    for (std::size_t i = 0; i < scope.size(); ++i)
      for (std::size_t j = i + 1; j < scope.size(); ++j)
        graph.adj[scope[i]][scope[j]] = graph.adj[scope[j]][scope[i]] = 1;
  }

  std::vector<int> order;
  order.reserve(n - keep.size());
  for (int step = 0; step < n - static_cast<int>(keep.size()); ++step) {
    int best = -1;
    int best_fill = 0;
    for (int v = 0; v < n; ++v) {
      if (graph.removed[v] || keep.contains(v)) continue;
      const int fill = graph.fill_count(v);
      if (best < 0 || fill < best_fill ||
          (fill == best_fill && graph.names[v] < graph.names[best])) {
        best = v;
        best_fill = fill;
      }
    }
    assert(best >= 0);
    graph.eliminate(best);
    order.push_back(best);
  }
  return order;
}

QueryResult query_with_order(const Network& net, int target, const Evidence& e,
                             std::span<const int> order) {
  const int n = net.num_variables();
  if (target < 0 || target >= n) {
    throw Error(ErrorKind::unknown_variable,
                "query target outside the network");
  }

  // CPT factors with evidence applied by slicing. The target keeps its
  // dimension even when observed; the mask at the end zeroes the rest.
  std::vector<Factor> factors;
  factors.reserve(n);
  for (int v = 0; v < n; ++v) {
    Factor f = cpt_factor(net, v);
    for (const auto& [var, value] : e.assignments) {
      if (var == target) continue;
      if (std::ranges::find(f.scope, var) != f.scope.end())
        f = factor_reduce(f, var, value);
    }
    factors.push_back(std::move(f));
  }

  for (int v : order) {
    if (v == target) {
      throw Error(ErrorKind::invalid_argument,
                  "elimination order must not contain the query target");
    }
    Factor combined = Factor::unit();
    bool found = false;
    std::vector<Factor> rest;
    rest.reserve(factors.size());
    for (Factor& f : factors) {
      if (std::ranges::find(f.scope, v) != f.scope.end()) {
        combined = found ? factor_product(combined, f) : std::move(f);
        found = true;
      } else {
        rest.push_back(std::move(f));
      }
    }
    if (found) rest.push_back(factor_marginalize(combined, v));
    factors = std::move(rest);
  }

  Factor result = Factor::unit();
  for (const Factor& f : factors) result = factor_product(result, f);
  if (result.scope.size() != 1 || result.scope[0] != target) {
    throw Error(ErrorKind::invalid_argument,
                "elimination order must cover every non-target variable");
  }

  QueryResult out;
  out.joint = std::move(result.table);
  if (const auto it = e.assignments.find(target); it != e.assignments.end()) {
    for (int i = 0; i < static_cast<int>(out.joint.size()); ++i)
      if (i != it->second) out.joint[i] = 0.0;
  }
  double sum = 0.0;
  for (double p : out.joint) sum += p;
  out.evidence_prob = sum;
  return out;
}

QueryResult query(const Network& net, int target, const Evidence& e) {
  std::set<int> evidence_vars;
  for (const auto& [var, value] : e.assignments) {
    if (var != target) evidence_vars.insert(var);
  }
  const auto order = elimination_order(net, {target}, evidence_vars);
  return query_with_order(net, target, e, order);
}

}  // namespace bnsens
