#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bnsens/admissible.hpp"
#include "bnsens/engine.hpp"
#include "bnsens/model.hpp"
#include "bnsens/sensitivity.hpp"

namespace bnsens::oracle {

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 22;

/// Outcome of comparing a fitted bundle against brute-force enumeration on
/// a grid over [0,1].
struct GridReport {
  ParameterRef parameter;
  std::vector<double> grid_points;
  double max_abs_error = 0.0;
  std::vector<double> per_value_errors;  // per target value
  std::vector<int> argmax_trace;         // enumerated leader per grid point
  int skipped_points = 0;                // grid points with Pr(e) ~ 0
  double tolerance = 0.0;                // tol the check was run against
  bool passed(double tol) const { return max_abs_error <= tol; }
  bool passed() const { return passed(tolerance); }
};

struct DeviationCheck {
  bool pass = true;
  double witness_x = 0.0;
  std::string reason;
};

/// Brute-force reference for query(): sums products of CPT entries over all
/// joint states. Shares no factor or elimination code with the engine.
QueryResult enumerate_query(const Network& net, int target, const Evidence& e,
                            std::uint64_t cap = kDefaultEnumerationCap);

/// Fits a bundle for p and compares its values against enumeration at n
/// equispaced points. Grid points where both sides report ~zero evidence
/// mass are skipped and counted.
GridReport grid_check(const Network& net, const ParameterRef& p, int target,
                      const Evidence& e, int n, double tol,
                      std::uint64_t cap = kDefaultEnumerationCap);

/// Same comparison for an already-fitted (possibly corrupted) bundle.
GridReport grid_check_bundle(const Network& net, const FunctionBundle& bundle,
                             int n, std::uint64_t cap = kDefaultEnumerationCap);

/// Scans 10001 grid points of enumerated argmax: the leader must be stable
/// strictly inside the deviation interval and must change within one grid
/// step beyond each finite bound.
DeviationCheck deviation_check(const Network& net, const ParameterRef& p,
                               int target, const Evidence& e,
                               const AdmissibleDeviation& dev,
                               std::uint64_t cap = kDefaultEnumerationCap);

struct RandomNetworkOptions {
  int min_variables = 4;
  int max_variables = 10;
  int min_cardinality = 2;
  int max_cardinality = 4;
  int max_parents = 3;
  std::uint64_t max_joint_states = std::uint64_t{1} << 16;
};

/// Deterministic random network for property tests: DAG over variables
/// v0..vN in topological order, flat-Dirichlet-style columns (normalized
/// uniform positives). Identical seed, identical network, on any platform.
Network random_network(std::uint64_t seed,
                       const RandomNetworkOptions& options = {});

/// Deterministic random evidence over at most max_assignments variables,
/// optionally excluding one variable (the query target).
Evidence random_evidence(const Network& net, std::uint64_t seed,
                         int max_assignments, int exclude_variable = -1);

}  // namespace bnsens::oracle
