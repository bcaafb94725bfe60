#include "bnsens/admissible.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bnsens/errors.hpp"

namespace bnsens {

namespace {

constexpr double kPoleTol = 1e-12;

double numerator_at(const RationalLinearFunction& f, double x) {
  return std::fma(f.a, x, f.b);
}

void require_positive_denominator(const FunctionBundle& bundle, double x) {
  if (bundle.functions.empty()) {
    throw Error(ErrorKind::invalid_argument, "empty function bundle");
  }
  const auto& f = bundle.functions.front();
  if (!(std::fma(f.c, x, f.d) > kPoleTol)) {
    std::ostringstream msg;
    msg << "shared denominator is not positive at x = " << x;
    throw Error(ErrorKind::pole_at_x, msg.str());
  }
}

struct ArgmaxResult {
  int index = 0;
  bool tied = false;
};

// Lowest index among the maximal numerator lines; tied reports an exact
// value tie between two distinct lines at x.
ArgmaxResult argmax_with_tie(const FunctionBundle& bundle, double x) {
  ArgmaxResult result;
  double best = numerator_at(bundle.functions[0], x);
  for (int i = 1; i < static_cast<int>(bundle.functions.size()); ++i) {
    const double value = numerator_at(bundle.functions[i], x);
    if (value > best) {
      best = value;
      result.index = i;
      result.tied = false;
    } else if (value == best) {
      result.tied = true;
    }
  }
  return result;
}

[[noreturn]] void throw_total_tie(int i, int j) {
  throw Error(ErrorKind::total_tie,
              "numerator lines " + std::to_string(i) + " and " +
                  std::to_string(j) +
                  " are identical and jointly maximal; the most likely value "
                  "is ill-defined");
}

}  // namespace

int argmax_at(const FunctionBundle& bundle, double x) {
  require_positive_denominator(bundle, x);
  return argmax_with_tie(bundle, x).index;
}

std::vector<LeaderChange> leader_intersections(const FunctionBundle& bundle) {
  const auto& fs = bundle.functions;
  const int n = static_cast<int>(fs.size());
  if (n == 0) {
    throw Error(ErrorKind::invalid_argument, "empty function bundle");
  }

  // Leader of the first envelope segment: maximal value at 0, then maximal
  // slope. A second line matching both is identical and jointly maximal.
  int cur = 0;
  for (int i = 1; i < n; ++i) {
    if (fs[i].b > fs[cur].b ||
        (fs[i].b == fs[cur].b && fs[i].a > fs[cur].a)) {
      cur = i;
    }
  }
  for (int i = 0; i < n; ++i) {
    if (i != cur && fs[i].b == fs[cur].b && fs[i].a == fs[cur].a) {
      throw_total_tie(cur, i);
    }
  }

  std::vector<LeaderChange> changes;
  double x_cur = 0.0;
  for (;;) {
    // Only a strictly steeper line can overtake the current leader.
    double x_next = 1.0;
    int next = -1;
    for (int i = 0; i < n; ++i) {
      if (i == cur || fs[i].a <= fs[cur].a) continue;
      const double x_cross = (fs[cur].b - fs[i].b) / (fs[i].a - fs[cur].a);
      if (x_cross <= x_cur || x_cross >= 1.0) continue;
      if (next < 0 || x_cross < x_next) {
        x_next = x_cross;
        next = i;
      } else if (x_cross == x_next) {
        // Simultaneous overtake: the steeper line leads afterwards. Equal
        // slope through one point means the lines coincide.
        if (fs[i].a == fs[next].a && fs[i].b == fs[next].b) {
          throw_total_tie(next, i);
        }
        if (fs[i].a > fs[next].a ||
            (fs[i].a == fs[next].a && fs[i].b > fs[next].b)) {
          next = i;
        }
      }
    }
    if (next < 0) break;
    changes.push_back(LeaderChange{x_next, cur, next});
    cur = next;
    x_cur = x_next;
  }
  return changes;
}

AdmissibleDeviation admissible_deviation(const FunctionBundle& bundle) {
  const double x0 = bundle.x0;
  require_positive_denominator(bundle, x0);

  AdmissibleDeviation dev;

  // A denominator root strictly inside [0,1] caps the analysable range at
  // the pole; the computation then runs on the pole-free side of x0.
  const auto& f0 = bundle.functions.front();
  if (std::abs(f0.c) > kPoleTol) {
    const double pole = -f0.d / f0.c;
    if (pole > 0.0 && pole < 1.0) {
      dev.restricted = true;
      if (pole < x0) {
        dev.interval_lo = pole;
      } else {
        dev.interval_hi = pole;
      }
    }
  }

  const ArgmaxResult leader = argmax_with_tie(bundle, x0);
  if (leader.tied) {
    throw Error(ErrorKind::tie_at_assessment,
                "two sensitivity functions are equal-maximal exactly at the "
                "original assessment; the admissible deviation is undefined");
  }
  dev.leader_at_x0 = leader.index;

  for (const LeaderChange& change : leader_intersections(bundle)) {
    if (change.x == x0) {
      throw Error(ErrorKind::tie_at_assessment,
                  "an envelope breakpoint coincides with the original "
                  "assessment; the admissible deviation is undefined");
    }
    if (change.x <= dev.interval_lo || change.x >= dev.interval_hi) continue;
    if (change.x < x0) {
      // Largest breakpoint below x0 wins; the walk emits increasing x.
      dev.crossing_left = change.x;
    } else if (!dev.crossing_right) {
      dev.crossing_right = change.x;
    }
  }

  dev.left = dev.crossing_left ? x0 - *dev.crossing_left : kBoundary;
  dev.right = dev.crossing_right ? *dev.crossing_right - x0 : kBoundary;
  return dev;
}

}  // namespace bnsens
