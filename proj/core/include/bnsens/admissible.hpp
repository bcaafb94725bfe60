#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "bnsens/sensitivity.hpp"

namespace bnsens {

inline constexpr double kBoundary = std::numeric_limits<double>::infinity();

/// Widest interval (x0 - left, x0 + right) within which the most likely
/// target value is unchanged. An infinite bound means the leader persists
/// to the edge of the probability interval (or of the pole-free interval
/// when `restricted` is set).
struct AdmissibleDeviation {
  double left = kBoundary;
  double right = kBoundary;
  int leader_at_x0 = -1;
  std::optional<double> crossing_left;
  std::optional<double> crossing_right;
  bool restricted = false;      // denominator root inside [0,1]
  double interval_lo = 0.0;     // pole-free interval containing x0
  double interval_hi = 1.0;

  bool left_is_boundary() const { return !crossing_left.has_value(); }
  bool right_is_boundary() const { return !crossing_right.has_value(); }
};

/// One breakpoint of the upper envelope of the numerator lines.
struct LeaderChange {
  double x = 0.0;
  int old_leader = -1;
  int new_leader = -1;
};

/// Index of the most likely target value at x: argmax over the numerator
/// lines a_i*x + b_i (the shared positive denominator cancels). Exact ties
/// resolve to the lowest index.
int argmax_at(const FunctionBundle& bundle, double x);

/// Breakpoints of the upper envelope of the numerator lines restricted to
/// (0,1), in increasing x; only crossings where the leader actually changes
/// are kept. Throws total-tie if two identical lines share the envelope.
std::vector<LeaderChange> leader_intersections(const FunctionBundle& bundle);

/// Computes the admissible deviation around bundle.x0. Throws total-tie and
/// tie-at-assessment (two numerators equal-maximal exactly at x0).
AdmissibleDeviation admissible_deviation(const FunctionBundle& bundle);

}  // namespace bnsens
