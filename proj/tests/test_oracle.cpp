#include <cmath>

#include "bnsens/admissible.hpp"
#include "bnsens/netparse.hpp"
#include "bnsens/oracle.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace bnsens;
using bnsens::testing::single_binary;
using bnsens::testing::toy_chain;

TEST_CASE("enumerate_query matches hand enumeration on the toy chain") {
  const QueryResult result = oracle::enumerate_query(toy_chain(), 1, {});
  CHECK(result.joint[0] == doctest::Approx(0.48).epsilon(1e-12));
  CHECK(result.joint[1] == doctest::Approx(0.52).epsilon(1e-12));
  CHECK(result.evidence_prob == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("enumerate_query: total probability and zero-mass evidence") {
  for (std::uint64_t seed = 3; seed <= 8; ++seed) {
    const Network net = oracle::random_network(seed);
    const QueryResult prior = oracle::enumerate_query(net, 0, {});
    CHECK(std::abs(prior.evidence_prob - 1.0) <= 1e-12);
  }

  Network deterministic = toy_chain();
  deterministic.cpts[0].table = {1.0, 0.0};
  const QueryResult impossible =
      oracle::enumerate_query(deterministic, 1, Evidence{{{0, 1}}});
  CHECK(impossible.evidence_prob == 0.0);
}

TEST_CASE("enumerate_query enforces the state-space cap") {
  const Network net = oracle::random_network(11);
  CHECK_THROWS_WITH_AS(oracle::enumerate_query(net, 0, {}, 8),
                       doctest::Contains("cap"), Error);
}

TEST_CASE("engine and enumeration agree on random networks") {
  for (std::uint64_t seed = 21; seed <= 50; ++seed) {
    const Network net = oracle::random_network(seed);
    REQUIRE(validate_network(net).empty());
    const int target = static_cast<int>(seed) % net.num_variables();
    const Evidence e = oracle::random_evidence(net, seed, 3, target);

    const QueryResult ve = query(net, target, e);
    const QueryResult brute = oracle::enumerate_query(net, target, e);
    REQUIRE(ve.joint.size() == brute.joint.size());
    for (std::size_t i = 0; i < ve.joint.size(); ++i)
      CHECK(std::abs(ve.joint[i] - brute.joint[i]) <= 1e-10);
    CHECK(std::abs(ve.evidence_prob - brute.evidence_prob) <= 1e-10);
  }
}

TEST_CASE("grid_check certifies the fit on the toy chain") {
  const oracle::GridReport report =
      oracle::grid_check(toy_chain(), ParameterRef{0, 0, {}}, 1, {}, 11, 1e-9);
  CHECK(report.grid_points.size() == 11);
  CHECK(report.max_abs_error <= 1e-12);
  CHECK(report.passed(1e-9));
  CHECK(report.skipped_points == 0);
}

TEST_CASE("grid_check on a d-separated parameter sees constant functions") {
  Network net = toy_chain();
  net.variables.push_back(Variable{"C", {"c1", "c2"}});
  net.parents.push_back({});
  net.cpts.push_back(Cpt{2, {}, {0.25, 0.75}});

  const oracle::GridReport report =
      oracle::grid_check(net, ParameterRef{2, 0, {}}, 1, {}, 11, 1e-9);
  CHECK(report.max_abs_error <= 1e-12);
  for (double err : report.per_value_errors) CHECK(err <= 1e-12);
  for (int leader : report.argmax_trace)
    CHECK(leader == report.argmax_trace.front());
}

TEST_CASE("grid_check passes on a random 8-variable network") {
  oracle::RandomNetworkOptions options;
  options.min_variables = options.max_variables = 8;
  const Network net = oracle::random_network(77, options);
  const Evidence e = oracle::random_evidence(net, 77, 2, 0);
  const auto params = all_parameters(net);
  for (std::size_t i = 0; i < params.size(); i += 7) {
    const oracle::GridReport report =
        oracle::grid_check(net, params[i], 0, e, 11, 1e-9);
    CHECK(report.passed(1e-9));
  }
}

TEST_CASE("grid_check_bundle flags a corrupted constant") {
  const Network net = toy_chain();
  FunctionBundle bundle = fit_bundle(net, ParameterRef{0, 0, {}}, 1, {});
  bundle.functions[0].a += 0.05;
  const oracle::GridReport report = oracle::grid_check_bundle(net, bundle, 11);
  CHECK(!report.passed(1e-9));
  CHECK(report.max_abs_error > 1e-3);
}

TEST_CASE("deviation_check confirms analytic bounds") {
  // single binary variable: numerators are exactly x and 1-x
  const Network net = single_binary(0.7);
  const ParameterRef p{0, 0, {}};
  const FunctionBundle bundle = fit_bundle(net, p, 0, {});
  const AdmissibleDeviation dev = admissible_deviation(bundle);
  CHECK(dev.left == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(dev.right_is_boundary());

  const auto check = oracle::deviation_check(net, p, 0, {}, dev);
  CHECK(check.pass);

  SUBCASE("artificially widened bounds fail with a witness") {
    AdmissibleDeviation widened = dev;
    widened.left = 0.4;
    widened.crossing_left = 0.3;
    const auto bad = oracle::deviation_check(net, p, 0, {}, widened);
    CHECK(!bad.pass);
    CHECK(bad.witness_x > 0.3);
    CHECK(bad.witness_x < 0.5);
  }

  SUBCASE("artificially narrowed bounds fail beyond the bound") {
    AdmissibleDeviation narrowed = dev;
    narrowed.left = 0.1;
    narrowed.crossing_left = 0.6;
    const auto bad = oracle::deviation_check(net, p, 0, {}, narrowed);
    CHECK(!bad.pass);
  }
}

TEST_CASE("deviation_check accepts a dominated bundle with infinite bounds") {
  // C is disconnected, so both numerators are constant and never cross.
  Network net = toy_chain();
  net.variables.push_back(Variable{"C", {"c1", "c2"}});
  net.parents.push_back({});
  net.cpts.push_back(Cpt{2, {}, {0.25, 0.75}});
  const ParameterRef p{2, 0, {}};
  const FunctionBundle bundle = fit_bundle(net, p, 1, {});
  const AdmissibleDeviation dev = admissible_deviation(bundle);
  CHECK(dev.left_is_boundary());
  CHECK(dev.right_is_boundary());
  CHECK(oracle::deviation_check(net, p, 1, {}, dev).pass);
}

TEST_CASE("random networks are reproducible and valid") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Network a = oracle::random_network(seed);
    const Network b = oracle::random_network(seed);
    CHECK(serialize_network({"1", a, std::nullopt}) ==
          serialize_network({"1", b, std::nullopt}));
    CHECK(validate_network(a).empty());

    std::uint64_t states = 1;
    for (const Variable& v : a.variables) states *= v.cardinality();
    CHECK(states <= oracle::RandomNetworkOptions{}.max_joint_states);
  }
  // different seeds give different networks
  const Network a = oracle::random_network(1);
  const Network b = oracle::random_network(2);
  CHECK(serialize_network({"1", a, std::nullopt}) !=
        serialize_network({"1", b, std::nullopt}));
}
