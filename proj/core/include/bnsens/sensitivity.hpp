#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "bnsens/engine.hpp"
#include "bnsens/model.hpp"

namespace bnsens {

/// f(x) = (a*x + b) / (c*x + d). Constants are kept in units of joint
/// probability mass (numerator Pr(a_i, e)(x), denominator Pr(e)(x)); no
/// rescaling is applied, so all functions of one bundle share (c, d)
/// bit-for-bit and sum_i a_i ~= c, sum_i b_i ~= d.
struct RationalLinearFunction {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
};

enum class FunctionClass { constant, linear, hyperbolic };

/// Equivalent hyperbola form f(x) = r/(x - s) + t with asymptotes x = s and
/// f = t; (s, t) is the center.
struct HyperbolaForm {
  double r = 0.0;
  double s = 0.0;
  double t = 0.0;
};

/// Vertex of the hyperbola: the point where |f'| = 1. Both solutions of
/// s +- sqrt(|r|) are reported; x_hat is the branch on the same side of the
/// pole as the unit interval.
struct VertexInfo {
  double x_hat = 0.0;
  std::pair<double, double> branches{0.0, 0.0};  // (s - sqrt|r|, s + sqrt|r|)
  double distance_to_assessment = std::numeric_limits<double>::quiet_NaN();
  bool in_unit_interval = false;
};

/// The family of sensitivity functions for all values of a target variable,
/// fitted against one parameter.
struct FunctionBundle {
  ParameterRef parameter;
  double x0 = 0.0;
  int target = -1;
  Evidence evidence;
  std::vector<RationalLinearFunction> functions;  // one per target value
};

struct FitOptions {
  double self_check_tol = 1e-9;
  CovaryFallback fallback = CovaryFallback::error;
};

/// Fits the whole bundle from two endpoint propagations (x = 0 and x = 1);
/// numerator and denominator are both linear in x, so the endpoints pin all
/// constants. A third propagation at the original assessment x0 verifies
/// |f_i(x0) - Pr(a_i|e)| <= self_check_tol and that Pr(e)(x0) > 0.
FunctionBundle fit_bundle(const Network& net, const ParameterRef& p,
                          int target, const Evidence& e,
                          const FitOptions& options = {});

/// (a*x + b) / (c*x + d); throws pole-at-x when |c*x + d| <= 1e-12.
double eval(const RationalLinearFunction& f, double x);

/// f'(x) = (a*d - b*c) / (c*x + d)^2.
double derivative_at(const RationalLinearFunction& f, double x);

/// |f'(x0)|.
double sensitivity_value(const RationalLinearFunction& f, double x0);

FunctionClass classify(const RationalLinearFunction& f);

/// Requires classify(f) == hyperbolic.
HyperbolaForm hyperbola_form(const RationalLinearFunction& f);

/// Requires classify(f) == hyperbolic. When x0 is supplied,
/// distance_to_assessment = |x0 - x_hat|.
VertexInfo vertex(const RationalLinearFunction& f,
                  double x0 = std::numeric_limits<double>::quiet_NaN());

}  // namespace bnsens
