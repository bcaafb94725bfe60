#include "bnsens/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bnsens/errors.hpp"

namespace bnsens::oracle {

namespace {

constexpr double kMassTol = 1e-12;

// splitmix64: identical stream on every platform, unlike <random>
// distributions.
struct Rng {
  std::uint64_t state;

  explicit Rng(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
};

void check_cap(const Network& net, std::uint64_t cap) {
  std::uint64_t states = 1;
  for (const Variable& v : net.variables) {
    states *= static_cast<std::uint64_t>(v.cardinality());
    if (states > cap) {
      throw Error(ErrorKind::network_too_large,
                  "joint state space exceeds the enumeration cap");
    }
  }
}

int lowest_argmax(std::span<const double> values) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

// Per-state coefficients of the scan over one varied column:
//   joint_i(x) = constant[i] + sum_v weight[i][v] * column_x[v]
// gathered in a single enumeration pass, grouped by the value the varied
// variable takes in states whose parent configuration matches the
// parameter. No propagation machinery involved; the per-x evaluation below
// still computes the covaried column numerically.
struct ScanCoefficients {
  std::vector<double> constant;
  std::vector<std::vector<double>> weight;
  std::vector<double> base_column;
  int varied_config = -1;
};

ScanCoefficients build_scan(const Network& net, const ParameterRef& p,
                            int target, const Evidence& e, std::uint64_t cap) {
  check_parameter(net, p);
  check_cap(net, cap);
  const int n = net.num_variables();
  const int target_card = net.variables[target].cardinality();
  const int varied = p.variable;
  const Cpt& varied_cpt = net.cpts[varied];
  const int varied_card = varied_cpt.cardinality;

  ScanCoefficients scan;
  scan.varied_config = varied_cpt.config_index(p.parent_config);
  const auto column = varied_cpt.column(scan.varied_config);
  scan.base_column.assign(column.begin(), column.end());
  scan.constant.assign(target_card, 0.0);
  scan.weight.assign(target_card, std::vector<double>(varied_card, 0.0));

  std::vector<int> state(n, 0);
  std::vector<char> fixed(n, 0);
  for (const auto& [var, value] : e.assignments) {
    state[var] = value;
    fixed[var] = 1;
  }
  std::vector<int> free_vars;
  for (int v = 0; v < n; ++v)
    if (!fixed[v]) free_vars.push_back(v);

  for (;;) {
    double product = 1.0;
    int varied_config = 0;
    for (int v = 0; v < n; ++v) {
      const Cpt& cpt = net.cpts[v];
      int config = 0;
      for (int parent : net.parents[v])
        config = config * net.variables[parent].cardinality() + state[parent];
      if (v == varied) {
        varied_config = config;
        continue;  // the varied variable's own entry is applied per x
      }
      product *= cpt.table[static_cast<std::size_t>(config) * cpt.cardinality +
                           state[v]];
    }
    if (varied_config == scan.varied_config) {
      scan.weight[state[target]][state[varied]] += product;
    } else {
      const double entry =
          varied_cpt.table[static_cast<std::size_t>(varied_config) *
                               varied_card +
                           state[varied]];
      scan.constant[state[target]] += product * entry;
    }

    std::size_t pos = free_vars.size();
    while (pos > 0) {
      const int v = free_vars[pos - 1];
      if (++state[v] < net.variables[v].cardinality()) break;
      state[v] = 0;
      --pos;
    }
    if (pos == 0) break;
  }
  return scan;
}

std::vector<double> scan_joint(const ScanCoefficients& scan,
                               const ParameterRef& p, double x,
                               CovaryFallback fallback) {
  const auto column = covary_column(scan.base_column, p.value_index, x, fallback);
  std::vector<double> joint(scan.constant.begin(), scan.constant.end());
  for (std::size_t i = 0; i < joint.size(); ++i) {
    for (std::size_t v = 0; v < column.size(); ++v)
      joint[i] += scan.weight[i][v] * column[v];
  }
  return joint;
}

}  // namespace

QueryResult enumerate_query(const Network& net, int target, const Evidence& e,
                            std::uint64_t cap) {
  if (target < 0 || target >= net.num_variables()) {
    throw Error(ErrorKind::unknown_variable,
                "enumeration target outside the network");
  }
  check_cap(net, cap);
  const int n = net.num_variables();

  std::vector<int> state(n, 0);
  std::vector<char> fixed(n, 0);
  for (const auto& [var, value] : e.assignments) {
    state[var] = value;
    fixed[var] = 1;
  }
  std::vector<int> free_vars;
  for (int v = 0; v < n; ++v)
    if (!fixed[v]) free_vars.push_back(v);

  QueryResult result;
  result.joint.assign(net.variables[target].cardinality(), 0.0);

  // Textbook sum over joint states: one product of CPT entries per state.
  for (;;) {
    double product = 1.0;
    for (int v = 0; v < n; ++v) {
      const Cpt& cpt = net.cpts[v];
      int config = 0;
      for (int parent : net.parents[v])
        config = config * net.variables[parent].cardinality() + state[parent];
      product *= cpt.table[static_cast<std::size_t>(config) * cpt.cardinality +
                           state[v]];
    }
    result.joint[state[target]] += product;

    std::size_t pos = free_vars.size();
    while (pos > 0) {
      const int v = free_vars[pos - 1];
      if (++state[v] < net.variables[v].cardinality()) break;
      state[v] = 0;
      --pos;
    }
    if (pos == 0) break;
  }

  double sum = 0.0;
  for (double p : result.joint) sum += p;
  result.evidence_prob = sum;
  return result;
}

GridReport grid_check_bundle(const Network& net, const FunctionBundle& bundle,
                             int n, std::uint64_t cap) {
  if (n < 2) {
    throw Error(ErrorKind::invalid_argument, "grid needs at least two points");
  }
  GridReport report;
  report.parameter = bundle.parameter;
  report.per_value_errors.assign(bundle.functions.size(), 0.0);

  const double c = bundle.functions.front().c;
  const double d = bundle.functions.front().d;
  // Ill-conditioned points (evidence mass a vanishing fraction of the
  // endpoint masses) carry no information about the functional form.
  const double skip_tol =
      std::max(kMassTol, 1e-7 * std::max(std::abs(d), std::abs(c + d)));

  for (int k = 0; k < n; ++k) {
    const double x = static_cast<double>(k) / (n - 1);
    report.grid_points.push_back(x);

    const Network varied = apply_parameter(net, bundle.parameter, x);
    const QueryResult direct =
        enumerate_query(varied, bundle.target, bundle.evidence, cap);
    const double den = std::fma(c, x, d);
    if (direct.evidence_prob <= skip_tol || den <= skip_tol) {
      report.argmax_trace.push_back(-1);
      ++report.skipped_points;
      continue;
    }
    report.argmax_trace.push_back(lowest_argmax(direct.joint));
    for (std::size_t i = 0; i < bundle.functions.size(); ++i) {
      const double fitted = eval(bundle.functions[i], x);
      const double expected = direct.joint[i] / direct.evidence_prob;
      const double err = std::abs(fitted - expected);
      report.per_value_errors[i] = std::max(report.per_value_errors[i], err);
      report.max_abs_error = std::max(report.max_abs_error, err);
    }
  }
  return report;
}

GridReport grid_check(const Network& net, const ParameterRef& p, int target,
                      const Evidence& e, int n, double tol, std::uint64_t cap) {
  const FunctionBundle bundle = fit_bundle(net, p, target, e);
  GridReport report = grid_check_bundle(net, bundle, n, cap);
  report.tolerance = tol;
  return report;
}

DeviationCheck deviation_check(const Network& net, const ParameterRef& p,
                               int target, const Evidence& e,
                               const AdmissibleDeviation& dev,
                               std::uint64_t cap) {
  constexpr int kGridPoints = 10001;
  constexpr double kStep = 1.0 / (kGridPoints - 1);

  const ScanCoefficients scan = build_scan(net, p, target, e, cap);

  const double inside_lo = dev.crossing_left.value_or(dev.interval_lo);
  const double inside_hi = dev.crossing_right.value_or(dev.interval_hi);

  DeviationCheck check;
  auto argmax_at_point = [&](double x) -> int {
    const auto joint = scan_joint(scan, p, x, CovaryFallback::error);
    double sum = 0.0;
    for (double j : joint) sum += j;
    if (sum <= kMassTol) return -1;  // no evidence mass, argmax undefined
    return lowest_argmax(joint);
  };

  // Stability inside the interval, one grid step of slack at each bound.
  for (int k = 0; k < kGridPoints; ++k) {
    const double x = static_cast<double>(k) / (kGridPoints - 1);
    if (x <= inside_lo + kStep || x >= inside_hi - kStep) continue;
    const int am = argmax_at_point(x);
    if (am < 0) continue;
    if (am != dev.leader_at_x0) {
      check.pass = false;
      check.witness_x = x;
      std::ostringstream msg;
      msg << "leader changed to value index " << am
          << " inside the admissible interval at x = " << x;
      check.reason = msg.str();
      return check;
    }
  }

  // Beyond each finite bound the leader must differ within one grid step.
  // The probe backs off half a step from the crossing so its margin is not
  // drowned by round-off.
  auto probe = [&](double crossing, bool leftward) -> std::optional<double> {
    double x = leftward ? std::floor(crossing / kStep) * kStep
                        : std::ceil(crossing / kStep) * kStep;
    if (leftward) {
      while (x > crossing - kStep / 4) x -= kStep;
      if (x <= dev.interval_lo || x < 0.0) return std::nullopt;
    } else {
      while (x < crossing + kStep / 4) x += kStep;
      if (x >= dev.interval_hi || x > 1.0) return std::nullopt;
    }
    return x;
  };

  for (const bool leftward : {true, false}) {
    const auto& crossing = leftward ? dev.crossing_left : dev.crossing_right;
    if (!crossing) continue;
    const auto x_check = probe(*crossing, leftward);
    if (!x_check) continue;  // bound within a step of the interval edge
    const int am = argmax_at_point(*x_check);
    if (am < 0) continue;
    if (am == dev.leader_at_x0) {
      check.pass = false;
      check.witness_x = *x_check;
      std::ostringstream msg;
      msg << "leader did not change just beyond the "
          << (leftward ? "left" : "right") << " bound, probed at x = "
          << *x_check;
      check.reason = msg.str();
      return check;
    }
  }

  return check;
}

Network random_network(std::uint64_t seed, const RandomNetworkOptions& options) {
  Rng rng(seed * 0x9e3779b97f4a7c15ULL + 0x7f4a7c15ULL);
  Network net;
  net.name = "synth-" + std::to_string(seed);

  const int span = options.max_variables - options.min_variables + 1;
  const int n = options.min_variables + rng.below(span);

  std::vector<int> cards(n);
  std::uint64_t states = 1;
  for (int i = 0; i < n; ++i) {
    cards[i] = options.min_cardinality +
               rng.below(options.max_cardinality - options.min_cardinality + 1);
    states *= static_cast<std::uint64_t>(cards[i]);
  }
  for (int i = 0; states > options.max_joint_states && i < 8 * n; ++i) {
    const int v = i % n;
    if (cards[v] > 2) {
      states = states / cards[v] * (cards[v] - 1);
      cards[v] -= 1;
    }
  }

  for (int i = 0; i < n; ++i) {
    Variable var;
    var.name = "V" + std::string(i < 10 ? "0" : "") + std::to_string(i);
    for (int k = 0; k < cards[i]; ++k) var.values.push_back("s" + std::to_string(k));
    net.variables.push_back(std::move(var));
  }

  net.parents.resize(n);
  for (int i = 1; i < n; ++i) {
    // Skewed in-degree: mostly sparse, capped by max_parents.
    const int roll = rng.below(100);
    int k = roll < 30 ? 0 : roll < 75 ? 1 : roll < 95 ? 2 : 3;
    k = std::min({k, i, options.max_parents});
    std::vector<int> chosen;
    while (static_cast<int>(chosen.size()) < k) {
      const int cand = rng.below(i);
      if (std::ranges::find(chosen, cand) == chosen.end())
        chosen.push_back(cand);
    }
    std::ranges::sort(chosen);
    net.parents[i] = std::move(chosen);
  }

  for (int i = 0; i < n; ++i) {
    Cpt cpt;
    cpt.cardinality = cards[i];
    for (int p : net.parents[i]) cpt.parent_cards.push_back(cards[p]);
    cpt.table.resize(static_cast<std::size_t>(cpt.num_configs()) * cards[i]);
    for (int config = 0; config < cpt.num_configs(); ++config) {
      auto column = cpt.column(config);
      double sum = 0.0;
      for (double& entry : column) {
        entry = rng.uniform() + 1e-3;
        sum += entry;
      }
      for (double& entry : column) entry /= sum;
    }
    net.cpts.push_back(std::move(cpt));
  }
  return net;
}

Evidence random_evidence(const Network& net, std::uint64_t seed,
                         int max_assignments, int exclude_variable) {
  Rng rng(seed ^ 0xa5a5a5a5deadbeefULL);
  Evidence e;
  const int n = net.num_variables();
  const int upper = std::min(max_assignments, exclude_variable >= 0 ? n - 1 : n);
  if (upper <= 0) return e;
  const int count = 1 + rng.below(upper);
  int guard = 0;
  while (static_cast<int>(e.assignments.size()) < count && guard++ < 64) {
    const int v = rng.below(n);
    if (v == exclude_variable) continue;
    e.assignments[v] = rng.below(net.variables[v].cardinality());
  }
  return e;
}

}  // namespace bnsens::oracle
