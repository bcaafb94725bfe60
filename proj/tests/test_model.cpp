#include <cmath>

#include "bnsens/model.hpp"
#include "bnsens/oracle.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace bnsens;
using bnsens::testing::toy_chain;

TEST_CASE("validate_network accepts a proper two-node chain") {
  CHECK(validate_network(toy_chain()).empty());
}

TEST_CASE("validate_network flags a column that does not sum to one") {
  Network net = toy_chain();
  net.cpts[0].table = {0.5, 0.6};
  const auto violations = validate_network(net);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("A") != std::string::npos);
  CHECK(violations[0].find("sum") != std::string::npos);
}

TEST_CASE("validate_network flags a cyclic parent graph") {
  Network net = toy_chain();
  net.parents[0] = {1};  // A -> B -> A
  net.cpts[0] = Cpt{2, {2}, {0.5, 0.5, 0.5, 0.5}};
  const auto violations = validate_network(net);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("cyclic") != std::string::npos);
}

TEST_CASE("validate_network flags entries outside [0,1] and bad shapes") {
  Network net = toy_chain();
  net.cpts[1].table = {1.2, -0.2, 0.2, 0.8};
  CHECK(!validate_network(net).empty());

  Network short_values = toy_chain();
  short_values.variables[0].values = {"a1"};
  CHECK(!validate_network(short_values).empty());
}

TEST_CASE("covary_column rescales the column-mates proportionally") {
  const std::vector<double> column{0.2, 0.5, 0.3};
  const auto varied = covary_column(column, 0, 0.6);
  REQUIRE(varied.size() == 3);
  CHECK(varied[0] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(varied[1] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(varied[2] == doctest::Approx(0.15).epsilon(1e-14));
}

TEST_CASE("covary_column is the identity at the current assessment") {
  const std::vector<double> column{0.2, 0.5, 0.3};
  const auto varied = covary_column(column, 0, 0.2);
  for (int i = 0; i < 3; ++i)
    CHECK(varied[i] == doctest::Approx(column[i]).epsilon(1e-15));
}

TEST_CASE("covary_column forces the binary complement") {
  const auto varied = covary_column(std::vector<double>{0.3, 0.7}, 0, 0.9);
  CHECK(varied[0] == 0.9);
  CHECK(varied[1] == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("covary_column on a saturated wide column errors by default") {
  const std::vector<double> column{1.0, 0.0, 0.0};
  CHECK_THROWS_WITH_AS(covary_column(column, 0, 0.4),
                       doctest::Contains("co-variation undefined"), Error);
  const auto fallback =
      covary_column(column, 0, 0.4, CovaryFallback::uniform);
  CHECK(fallback[0] == 0.4);
  CHECK(fallback[1] == doctest::Approx(0.3));
  CHECK(fallback[2] == doctest::Approx(0.3));
}

TEST_CASE("covary_column output sums to one and preserves ratios") {
  // property over random columns and a grid of x
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const Network net = oracle::random_network(seed);
    for (int v = 0; v < net.num_variables(); ++v) {
      const auto column = net.cpts[v].column(0);
      for (int step = 0; step <= 10; ++step) {
        const double x = step / 10.0;
        const auto varied = covary_column(column, 0, x);
        double sum = 0.0;
        for (double p : varied) {
          CHECK(p >= 0.0);
          CHECK(p <= 1.0 + 1e-15);
          sum += p;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
        // mutual ratios of the column-mates survive (vacuous at x = 1,
        // where all of them are zero)
        for (std::size_t j = 1; j + 1 < varied.size(); ++j) {
          if (column[j + 1] <= 0.0 || varied[j + 1] <= 0.0) continue;
          CHECK(varied[j] / varied[j + 1] ==
                doctest::Approx(column[j] / column[j + 1]).epsilon(1e-9));
        }
      }
    }
  }
}

TEST_CASE("apply_parameter swaps one column and leaves the input alone") {
  const Network net = toy_chain();
  const ParameterRef p{1, 0, {0}};  // p(b1 | a1)

  SUBCASE("identity at the current assessment") {
    const Network same = apply_parameter(net, p, 0.9);
    for (int v = 0; v < 2; ++v)
      for (std::size_t i = 0; i < net.cpts[v].table.size(); ++i)
        CHECK(same.cpts[v].table[i] ==
              doctest::Approx(net.cpts[v].table[i]).epsilon(1e-12));
  }

  SUBCASE("endpoint substitution reads back exactly") {
    const Network zero = apply_parameter(net, p, 0.0);
    CHECK(get_assessment(zero, p) == 0.0);
    CHECK(get_assessment(net, p) == 0.9);  // input untouched

    const Network one = apply_parameter(net, p, 1.0);
    CHECK(get_assessment(one, p) == 1.0);
    CHECK(one.cpts[1].column(0)[1] == 0.0);
  }

  SUBCASE("write then read returns x exactly") {
    const Network varied = apply_parameter(net, p, 0.4);
    CHECK(get_assessment(varied, p) == 0.4);
  }

  SUBCASE("validation holds on every varied network") {
    for (int step = 0; step <= 10; ++step) {
      const Network varied = apply_parameter(net, p, step / 10.0);
      CHECK(validate_network(varied).empty());
    }
  }
}

TEST_CASE("apply_parameter keeps random networks valid and readable") {
  for (std::uint64_t seed = 31; seed <= 36; ++seed) {
    const Network net = oracle::random_network(seed);
    const auto params = all_parameters(net);
    for (std::size_t i = 0; i < params.size(); i += 9) {
      for (const double x : {0.0, 0.25, 1.0}) {
        const Network varied = apply_parameter(net, params[i], x);
        CHECK(get_assessment(varied, params[i]) == x);
        CHECK(validate_network(varied).empty());
      }
    }
  }
}

TEST_CASE("get_assessment rejects bad addresses") {
  const Network net = toy_chain();
  CHECK(get_assessment(net, ParameterRef{1, 0, {1}}) == 0.2);
  CHECK_THROWS_AS(get_assessment(net, ParameterRef{1, 0, {2}}), Error);
  CHECK_THROWS_AS(get_assessment(net, ParameterRef{1, 5, {0}}), Error);
  CHECK_THROWS_AS(get_assessment(net, ParameterRef{7, 0, {}}), Error);
}

TEST_CASE("parameter specs format and parse canonically") {
  const Network net = toy_chain();
  const ParameterRef p{1, 1, {0}};
  const std::string spec = format_parameter(net, p);
  CHECK(spec == "B=b2 | A=a1");
  CHECK(parse_parameter_spec(net, spec) == p);
  CHECK(parse_parameter_spec(net, "  B = b2|A= a1 ") == p);
  CHECK(parse_parameter_spec(net, "A=a1") == ParameterRef{0, 0, {}});

  CHECK_THROWS_AS(parse_parameter_spec(net, "C=c1"), Error);
  CHECK_THROWS_AS(parse_parameter_spec(net, "B=nope | A=a1"), Error);
  CHECK_THROWS_AS(parse_parameter_spec(net, "B=b1"), Error);  // missing parent
  CHECK_THROWS_AS(parse_parameter_spec(net, "B=b1 | B=b1"), Error);
}

TEST_CASE("all_parameters enumerates every CPT entry deterministically") {
  const Network net = toy_chain();
  const auto params = all_parameters(net);
  REQUIRE(params.size() == net.num_parameters());
  REQUIRE(params.size() == 6);
  CHECK(params[0] == ParameterRef{0, 0, {}});
  CHECK(params[2] == ParameterRef{1, 0, {0}});
  CHECK(params[5] == ParameterRef{1, 1, {1}});
}
