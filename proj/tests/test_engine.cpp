#include <cmath>

#include "bnsens/engine.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace bnsens;
using bnsens::testing::toy_chain;

namespace {

Factor over_a() { return Factor{{0}, {2}, {0.4, 0.6}}; }

}  // namespace

TEST_CASE("factor_product with the unit factor is the identity") {
  const Factor f = over_a();
  const Factor product = factor_product(f, Factor::unit());
  CHECK(product.scope == f.scope);
  CHECK(product.table == f.table);
}

TEST_CASE("factor_product multiplies aligned entries pointwise") {
  const Factor g{{0}, {2}, {0.5, 0.5}};
  const Factor product = factor_product(over_a(), g);
  CHECK(product.table[0] == doctest::Approx(0.2));
  CHECK(product.table[1] == doctest::Approx(0.3));
}

TEST_CASE("factor_product of disjoint scopes is the outer product") {
  const Factor g{{1}, {2}, {0.5, 0.5}};
  const Factor product = factor_product(over_a(), g);
  REQUIRE(product.scope == std::vector<int>{0, 1});
  // four cells by hand: (0.4*0.5, 0.4*0.5, 0.6*0.5, 0.6*0.5)
  CHECK(product.table[0] == doctest::Approx(0.2));
  CHECK(product.table[1] == doctest::Approx(0.2));
  CHECK(product.table[2] == doctest::Approx(0.3));
  CHECK(product.table[3] == doctest::Approx(0.3));
}

TEST_CASE("factor_marginalize sums a variable out") {
  const Factor f = over_a();
  const Factor scalar = factor_marginalize(f, 0);
  CHECK(scalar.scope.empty());
  CHECK(scalar.table[0] == doctest::Approx(1.0));

  const Factor g{{1}, {2}, {0.5, 0.5}};
  const Factor product = factor_product(f, g);
  const Factor back = factor_marginalize(product, 1);
  CHECK(back.scope == std::vector<int>{0});
  CHECK(back.table[0] == doctest::Approx(0.4));
  CHECK(back.table[1] == doctest::Approx(0.6));

  CHECK_THROWS_AS(factor_marginalize(f, 3), Error);
}

TEST_CASE("factor_reduce slices an observed value") {
  const Factor g{{0, 1}, {2, 2}, {0.9, 0.1, 0.2, 0.8}};
  const Factor sliced = factor_reduce(g, 0, 1);
  CHECK(sliced.scope == std::vector<int>{1});
  CHECK(sliced.table == std::vector<double>{0.2, 0.8});
}

TEST_CASE("elimination_order covers everything outside keep exactly once") {
  Network chain;  // A -> B -> C
  chain.variables = {Variable{"A", {"a1", "a2"}}, Variable{"B", {"b1", "b2"}},
                     Variable{"C", {"c1", "c2"}}};
  chain.parents = {{}, {0}, {1}};
  chain.cpts = {Cpt{2, {}, {0.5, 0.5}}, Cpt{2, {2}, {0.9, 0.1, 0.2, 0.8}},
                Cpt{2, {2}, {0.7, 0.3, 0.4, 0.6}}};

  SUBCASE("chain keeps the target last") {
    // fill counts by hand: A has the single neighbour B (fill 0), B sits
    // between A and C (fill 1), so A goes first, then B.
    const auto order = elimination_order(chain, {2}, {});
    CHECK(order == std::vector<int>{0, 1});
  }
  SUBCASE("keep everything, empty order") {
    CHECK(elimination_order(chain, {0, 1, 2}, {}).empty());
  }
  SUBCASE("single variable network") {
    const auto order =
        elimination_order(bnsens::testing::single_binary(), {}, {});
    CHECK(order == std::vector<int>{0});
  }

  SUBCASE("ties break on the variable name, not the index") {
    Network net;
    net.variables = {Variable{"Z", {"z1", "z2"}}, Variable{"A", {"a1", "a2"}}};
    net.parents = {{}, {}};
    net.cpts = {Cpt{2, {}, {0.5, 0.5}}, Cpt{2, {}, {0.5, 0.5}}};
    // both isolated, fill count 0 each: lexicographic name decides
    CHECK(elimination_order(net, {}, {}) == std::vector<int>{1, 0});
  }
}

TEST_CASE("query reproduces hand enumeration on the toy chain") {
  const Network net = toy_chain();

  SUBCASE("prior over B") {
    const QueryResult result = query(net, 1, Evidence{});
    // four joint states by hand: 0.4*0.9 + 0.6*0.2 and 0.4*0.1 + 0.6*0.8
    CHECK(result.joint[0] == doctest::Approx(0.48).epsilon(1e-12));
    CHECK(result.joint[1] == doctest::Approx(0.52).epsilon(1e-12));
    CHECK(result.evidence_prob == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("posterior of A given B=b1") {
    const QueryResult result = query(net, 0, Evidence{{{1, 0}}});
    CHECK(result.joint[0] == doctest::Approx(0.36).epsilon(1e-12));
    CHECK(result.joint[1] == doctest::Approx(0.12).epsilon(1e-12));
    CHECK(result.evidence_prob == doctest::Approx(0.48).epsilon(1e-12));
  }

  SUBCASE("evidence on the target concentrates the mass") {
    const QueryResult result = query(net, 0, Evidence{{{0, 0}}});
    CHECK(result.joint[0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(result.joint[1] == 0.0);
  }
}

TEST_CASE("query results do not depend on the elimination order") {
  Network net;  // diamond: A -> B, A -> C, (B,C) -> D
  net.variables = {Variable{"A", {"a1", "a2"}}, Variable{"B", {"b1", "b2"}},
                   Variable{"C", {"c1", "c2"}}, Variable{"D", {"d1", "d2"}}};
  net.parents = {{}, {0}, {0}, {1, 2}};
  net.cpts = {Cpt{2, {}, {0.3, 0.7}}, Cpt{2, {2}, {0.9, 0.1, 0.2, 0.8}},
              Cpt{2, {2}, {0.6, 0.4, 0.5, 0.5}},
              Cpt{2, {2, 2}, {0.1, 0.9, 0.4, 0.6, 0.7, 0.3, 0.8, 0.2}}};
  REQUIRE(validate_network(net).empty());

  const Evidence e{{{3, 0}}};
  const QueryResult reference = query(net, 0, e);
  CHECK(std::abs(reference.joint[0] + reference.joint[1] -
                 reference.evidence_prob) <= 1e-12);

  const std::vector<std::vector<int>> orders{{1, 2, 3}, {3, 2, 1}, {2, 3, 1},
                                             {3, 1, 2}};
  for (const auto& order : orders) {
    const QueryResult alt = query_with_order(net, 0, e, order);
    CHECK(std::abs(alt.joint[0] - reference.joint[0]) <= 1e-12);
    CHECK(std::abs(alt.joint[1] - reference.joint[1]) <= 1e-12);
    CHECK(std::abs(alt.evidence_prob - reference.evidence_prob) <= 1e-12);
  }

  // evidence variables are sliced away, so {1,2} is already complete;
  // an order missing a live variable is rejected
  CHECK_NOTHROW(query_with_order(net, 0, e, std::vector<int>{1, 2}));
  CHECK_THROWS_AS(query_with_order(net, 0, e, std::vector<int>{1}), Error);
}

TEST_CASE("zero-probability evidence is a valid result") {
  Network net = toy_chain();
  net.cpts[0].table = {1.0, 0.0};
  const QueryResult result = query(net, 1, Evidence{{{0, 1}}});
  CHECK(result.evidence_prob == 0.0);
}
