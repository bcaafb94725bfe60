#include <algorithm>
#include <set>

#include "bnsens/analysis.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace bnsens;
using bnsens::testing::single_binary;
using bnsens::testing::toy_chain;

TEST_CASE("analyze_network covers all three toy-chain columns") {
  const Network net = toy_chain();
  const ReportDocument doc = analyze_network(
      net, std::nullopt, 1, std::nullopt, all_parameters(net), {}, false);
  CHECK(doc.parameters_analyzed == 6);
  CHECK(doc.constant_only == 0);
  REQUIRE(doc.entries.size() == 6);

  // column identity = variable plus parent configuration
  std::set<std::string> columns;
  for (const ReportEntry& entry : doc.entries) {
    const auto bar = entry.parameter_spec.find('|');
    std::string column =
        entry.parameter_spec.substr(0, entry.parameter_spec.find('='));
    if (bar != std::string::npos) column += entry.parameter_spec.substr(bar);
    columns.insert(column);
  }
  CHECK(columns.size() == 3);  // A, B|a1, B|a2

  // p(a1)'s bundle carries the constants (0.7, 0.2, 0, 1) up to shared scale
  const auto it = std::ranges::find_if(doc.entries.begin(), doc.entries.end(), [](const ReportEntry& e) {
    return e.parameter_spec == "A=a1";
  });
  REQUIRE(it != doc.entries.end());
  CHECK(it->values[0].a / it->d == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(it->values[0].b / it->d == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(it->c == 0.0);
}

TEST_CASE("constant-only bundles are summarized, not listed") {
  Network net = toy_chain();
  net.variables.push_back(Variable{"C", {"c1", "c2"}});
  net.parents.push_back({});
  net.cpts.push_back(Cpt{2, {}, {0.25, 0.75}});

  const ReportDocument doc = analyze_network(
      net, std::nullopt, 1, std::nullopt, all_parameters(net), {}, false);
  CHECK(doc.parameters_analyzed == 8);
  CHECK(doc.constant_only == 2);  // both entries of C's column
  CHECK(doc.entries.size() == 6);
  for (const ReportEntry& entry : doc.entries)
    CHECK(entry.parameter_spec.find("C=") == std::string::npos);
}

TEST_CASE("admissible mode attaches deviations") {
  const Network net = single_binary(0.7);
  const ReportDocument doc = analyze_network(
      net, std::nullopt, 0, std::nullopt, all_parameters(net), {}, true);
  REQUIRE(doc.entries.size() == 2);
  for (const ReportEntry& entry : doc.entries) {
    REQUIRE(entry.deviation.has_value());
    const double finite = entry.deviation->left_is_boundary()
                              ? entry.deviation->right
                              : entry.deviation->left;
    CHECK(finite == doctest::Approx(0.2).epsilon(1e-12));
  }
}

TEST_CASE("thread counts do not change the produced report") {
  const Network net = toy_chain();
  AnalysisConfig one;
  one.threads = 1;
  AnalysisConfig many;
  many.threads = 4;
  const auto params = all_parameters(net);
  const ReportDocument a =
      analyze_network(net, std::nullopt, 1, std::nullopt, params, one, true);
  const ReportDocument b =
      analyze_network(net, std::nullopt, 1, std::nullopt, params, many, true);
  CHECK(write_report(a) == write_report(b));
}

TEST_CASE("analysis propagates input errors but flags degeneracies") {
  Network net = toy_chain();

  SUBCASE("zero-probability evidence fails the command") {
    net.cpts[0].table = {1.0, 0.0};
    CHECK_THROWS_AS(analyze_network(net, CaseDocument{"c", Evidence{{{0, 1}}}},
                                    1, std::nullopt, all_parameters(net), {},
                                    false),
                    Error);
  }

  SUBCASE("saturated wide column becomes a flagged entry") {
    net.variables[0].values.push_back("a3");
    net.cpts[0] = Cpt{3, {}, {1.0, 0.0, 0.0}};
    net.cpts[1] = Cpt{2, {3}, {0.9, 0.1, 0.2, 0.8, 0.5, 0.5}};
    REQUIRE(validate_network(net).empty());
    const ReportDocument doc = analyze_network(
        net, std::nullopt, 1, std::nullopt, all_parameters(net), {}, false);
    bool flagged = false;
    for (const ReportEntry& entry : doc.entries) {
      for (const std::string& flag : entry.degenerate_flags)
        if (flag == "covariation_undefined") flagged = true;
    }
    CHECK(flagged);
  }
}

TEST_CASE("sample_csv renders the identity bundle exactly") {
  NamedBundle bundle;
  bundle.parameter_spec = "B=b1";
  bundle.target = "B";
  bundle.value_names = {"b1", "b2"};
  bundle.x0 = 0.3;
  bundle.functions = {RationalLinearFunction{1, 0, 0, 1},
                      RationalLinearFunction{-1, 1, 0, 1}};

  CHECK(sample_csv(bundle, 3) == "x,b1,b2\n0,0,1\n0.5,0.5,0.5\n1,1,0\n");
  CHECK(sample_csv(bundle, 2) == "x,b1,b2\n0,0,1\n1,1,0\n");
  CHECK_THROWS_AS(sample_csv(bundle, 1), Error);
}

TEST_CASE("sample_csv marks pole rows and leaves their cells empty") {
  NamedBundle bundle;
  bundle.value_names = {"v0", "v1"};
  bundle.x0 = 0.5;
  // denominator x: vanishes at the left endpoint
  bundle.functions = {RationalLinearFunction{0.5, 0, 1, 0},
                      RationalLinearFunction{0.5, 0, 1, 0}};
  const std::string csv = sample_csv(bundle, 3);
  CHECK(csv.find("0,,,pole\n") != std::string::npos);
  CHECK(csv.find("1,0.5,0.5\n") != std::string::npos);
}

TEST_CASE("target specs resolve variables and values") {
  const Network net = toy_chain();
  const TargetSpec bare = parse_target_spec(net, "B");
  CHECK(bare.variable == 1);
  CHECK(!bare.value.has_value());

  const TargetSpec focused = parse_target_spec(net, "B=b2");
  CHECK(focused.variable == 1);
  CHECK(focused.value == 1);

  CHECK_THROWS_AS(parse_target_spec(net, "Q"), Error);
  CHECK_THROWS_AS(parse_target_spec(net, "B=zz"), Error);
}

TEST_CASE("analyze_bundle mirrors the fitted path for replayed constants") {
  NamedBundle bundle;
  bundle.parameter_spec = "X=yes | M=no";
  bundle.target = "Stage";
  bundle.value_names = {"IVB", "rest"};
  bundle.x0 = 0.05;
  bundle.functions = {
      RationalLinearFunction{0.09208, 1.17403, 1.0, 1.17403},
      RationalLinearFunction{1.0 - 0.09208, 0.0, 1.0, 1.17403}};

  const ReportEntry entry = analyze_bundle(bundle, {}, false);
  CHECK(entry.max_sensitivity == doctest::Approx(0.71145).epsilon(1e-4));
  REQUIRE(entry.values[0].vertex.has_value());
  CHECK(entry.values[0].vertex->x_hat == doctest::Approx(-0.1416).epsilon(1e-3));
}
