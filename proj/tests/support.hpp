#pragma once

#include <string>
#include <vector>

#include "bnsens/model.hpp"
#include "bnsens/sensitivity.hpp"

namespace bnsens::testing {

/// A -> B with p(a1)=0.4, p(b1|a1)=0.9, p(b1|a2)=0.2.
inline Network toy_chain() {
  Network net;
  net.name = "toy-chain";
  net.variables = {Variable{"A", {"a1", "a2"}}, Variable{"B", {"b1", "b2"}}};
  net.parents = {{}, {0}};
  net.cpts = {Cpt{2, {}, {0.4, 0.6}}, Cpt{2, {2}, {0.9, 0.1, 0.2, 0.8}}};
  return net;
}

/// Single binary variable B with p(b1) = x0.
inline Network single_binary(double x0 = 0.3) {
  Network net;
  net.name = "single";
  net.variables = {Variable{"B", {"b1", "b2"}}};
  net.parents = {{}};
  net.cpts = {Cpt{2, {}, {x0, 1.0 - x0}}};
  return net;
}

/// Detached two-line bundle with numerators N1 = x and N2 = 2*chi - x,
/// crossing exactly at chi (all operations round-free), constant
/// denominator d = 2*chi.
inline FunctionBundle crossing_bundle(double chi, double x0) {
  FunctionBundle bundle;
  bundle.x0 = x0;
  bundle.functions = {RationalLinearFunction{1.0, 0.0, 0.0, 2.0 * chi},
                      RationalLinearFunction{-1.0, 2.0 * chi, 0.0, 2.0 * chi}};
  return bundle;
}

/// Bundle whose first line dominates everywhere on [0,1].
inline FunctionBundle dominated_bundle(double x0 = 0.05) {
  FunctionBundle bundle;
  bundle.x0 = x0;
  bundle.functions = {RationalLinearFunction{0.0, 0.6, 0.1, 0.8},
                      RationalLinearFunction{0.1, 0.2, 0.1, 0.8}};
  return bundle;
}

inline FunctionBundle lines_bundle(std::vector<RationalLinearFunction> fs,
                                   double x0) {
  FunctionBundle bundle;
  bundle.x0 = x0;
  bundle.functions = std::move(fs);
  return bundle;
}

}  // namespace bnsens::testing
