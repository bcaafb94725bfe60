#include "bnsens/sensitivity.hpp"

#include <cmath>
#include <sstream>

#include "bnsens/errors.hpp"

namespace bnsens {

namespace {

constexpr double kPoleTol = 1e-12;
constexpr double kConstantTol = 1e-12;  // on |a*d - b*c|, relative to max(1, d^2)
constexpr double kLinearTol = 1e-9;     // on |c|, relative to max(|c|+|d|, 1)

double denominator_at(const RationalLinearFunction& f, double x) {
  return std::fma(f.c, x, f.d);
}

void require_off_pole(const RationalLinearFunction& f, double x) {
  if (std::abs(denominator_at(f, x)) <= kPoleTol) {
    std::ostringstream msg;
    msg << "sensitivity function has a pole at x = " << x;
    throw Error(ErrorKind::pole_at_x, msg.str());
  }
}

}  // namespace

FunctionBundle fit_bundle(const Network& net, const ParameterRef& p,
                          int target, const Evidence& e,
                          const FitOptions& options) {
  const double x0 = get_assessment(net, p);

  const Network at_zero = apply_parameter(net, p, 0.0, options.fallback);
  const Network at_one = apply_parameter(net, p, 1.0, options.fallback);
  const QueryResult q0 = query(at_zero, target, e);
  const QueryResult q1 = query(at_one, target, e);

  FunctionBundle bundle;
  bundle.parameter = p;
  bundle.x0 = x0;
  bundle.target = target;
  bundle.evidence = e;

  // Numerator and denominator are linear in x, so the two endpoints pin
  // every constant. The shared (c, d) is stored bit-identically per value.
  const double d = q0.evidence_prob;
  const double c = q1.evidence_prob - d;
  bundle.functions.reserve(q0.joint.size());
  for (std::size_t i = 0; i < q0.joint.size(); ++i) {
    const double b = q0.joint[i];
    const double a = q1.joint[i] - b;
    bundle.functions.push_back(RationalLinearFunction{a, b, c, d});
  }

  // Third propagation at the original assessment: both a positivity gate on
  // Pr(e)(x0) and an end-to-end check of the linearity assumption.
  const QueryResult qx0 = query(net, target, e);
  if (qx0.evidence_prob <= 0.0) {
    throw Error(ErrorKind::zero_evidence_probability,
                "evidence has zero probability at the original assessment");
  }
  for (std::size_t i = 0; i < bundle.functions.size(); ++i) {
    const double fitted = eval(bundle.functions[i], x0);
    const double direct = qx0.joint[i] / qx0.evidence_prob;
    if (std::abs(fitted - direct) > options.self_check_tol) {
      std::ostringstream msg;
      msg << "fit self-check failed for value index " << i << ": fitted "
          << fitted << " vs direct " << direct << " at x0 = " << x0;
      throw Error(ErrorKind::fit_self_check_failed, msg.str());
    }
  }
  return bundle;
}

double eval(const RationalLinearFunction& f, double x) {
  require_off_pole(f, x);
  return std::fma(f.a, x, f.b) / denominator_at(f, x);
}

double derivative_at(const RationalLinearFunction& f, double x) {
  require_off_pole(f, x);
  const double den = denominator_at(f, x);
  return (f.a * f.d - f.b * f.c) / (den * den);
}

double sensitivity_value(const RationalLinearFunction& f, double x0) {
  return std::abs(derivative_at(f, x0));
}

FunctionClass classify(const RationalLinearFunction& f) {
  const double det = f.a * f.d - f.b * f.c;
  if (std::abs(det) <= kConstantTol * std::max(1.0, f.d * f.d))
    return FunctionClass::constant;
  if (std::abs(f.c) <= kLinearTol * std::max(std::abs(f.c) + std::abs(f.d), 1.0))
    return FunctionClass::linear;
  return FunctionClass::hyperbolic;
}

HyperbolaForm hyperbola_form(const RationalLinearFunction& f) {
  if (classify(f) != FunctionClass::hyperbolic) {
    throw Error(ErrorKind::not_hyperbolic,
                "hyperbola form requires a hyperbolic sensitivity function");
  }
  return HyperbolaForm{(f.b * f.c - f.a * f.d) / (f.c * f.c), -f.d / f.c,
                       f.a / f.c};
}

VertexInfo vertex(const RationalLinearFunction& f, double x0) {
  const HyperbolaForm h = hyperbola_form(f);
  const double radius = std::sqrt(std::abs(h.r));

  VertexInfo info;
  info.branches = {h.s - radius, h.s + radius};
  // The pole x = s splits the plane; the branch on the same side as [0,1]
  // is the one the analysis can reach: upper for s < 0, lower for s > 1.
  // With a pole inside [0,1] both are reachable; the upper one is reported.
  info.x_hat = h.s > 1.0 ? info.branches.first : info.branches.second;
  info.in_unit_interval = info.x_hat >= 0.0 && info.x_hat <= 1.0;
  if (!std::isnan(x0)) info.distance_to_assessment = std::abs(x0 - info.x_hat);
  return info;
}

}  // namespace bnsens
