#include <gtest/gtest.h>

#include "micromorph/error.hpp"
#include "support.hpp"

using namespace micromorph;
using testing_support::Rng;

namespace {

const char* kMinimal = R"({
  "name": "minimal",
  "material": { "isotropic": { "A": [1, 1, 1], "B": [1, 1, 1], "E": [0, 0, 0] } },
  "fields": { "u": ["x1", "0", "0"], "phi": ["0","0","0","0","0","0","0","0","0"] },
  "domain": { "box": { "lo": [-1, -1, -1], "hi": [1, 1, 1] } }
})";

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  EXPECT_NE(at, std::string::npos) << from;
  if (at != std::string::npos) text.replace(at, from.size(), to);
  return text;
}

std::string parse_error_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Manufacture, ZeroFieldsNeedNoSources) {
  Rng rng(61);
  const MaterialModel m = testing_support::random_material(rng, true);
  const Sources s = manufacture_sources(m, {}, {});
  for (const auto& e : s.force) EXPECT_TRUE(e.is_zero());
  for (const auto& e : s.couple) EXPECT_TRUE(e.is_zero());
}

TEST(Manufacture, LinearUConstantPhiLeavesOnlyTheCouple) {
  Rng rng(62);
  const MaterialModel m = testing_support::random_material(rng, false);
  const Expression x1 = Expression::variable(0), x2 = Expression::variable(1);
  const FieldSet::Vector u{Expression(0.3) * x1 + x2, Expression(-0.2) * x2, Expression(0.5) * x1};
  FieldSet::Matrix phi;
  for (int a = 0; a < 9; ++a) phi[a] = Expression(0.1 * (a + 1));
  const Sources s = manufacture_sources(m, u, phi);
  const Point x{0.2, -0.3, 0.4};
  for (const auto& e : s.force) EXPECT_NEAR(e.evaluate(x), 0.0, 1e-14);
  const PointSample ps = sample_point(FieldSet(u, phi, {}, {}, testing_support::unit_domain()), m, x);
  for (int a = 0; a < 9; ++a) {
    EXPECT_NEAR(s.couple[a].evaluate(x), -(ps.state.stress.t[a] - ps.state.stress.s[a]), 1e-13);
  }
}

TEST(Manufacture, IsDeterministic) {
  Rng r1(63), r2(63);
  const auto build = [](Rng& rng) {
    const MaterialModel m = testing_support::random_material(rng, true);
    return manufacture_sources(m, testing_support::random_vector(rng, true), testing_support::random_matrix(rng, true));
  };
  const Sources a = build(r1), b = build(r2);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(a.force[k].to_string(), b.force[k].to_string());
  for (int k = 0; k < 9; ++k) EXPECT_EQ(a.couple[k].to_string(), b.couple[k].to_string());
}

TEST(Manufacture, DefaultRuleIsCentredHalfBall) {
  const QuadratureRule r = default_rule(Box{{0, 0, 0}, {2, 4, 6}});
  const Ball* b = std::get_if<Ball>(&r.geometry);
  ASSERT_NE(b, nullptr);
  EXPECT_EQ(b->center, (Point{1, 2, 3}));
  EXPECT_DOUBLE_EQ(b->radius, 0.5);
}

TEST(Builtins, AllLoadAndMatchTheirNames) {
  const auto list = builtin_list();
  ASSERT_GE(list.size(), 4u);
  for (const auto& info : list) {
    const Scenario s = builtin_scenario(info.name);
    EXPECT_EQ(s.name, info.name);
    EXPECT_FALSE(builtin_source(info.name).empty());
    EXPECT_TRUE(region_inside(s.rule.geometry, s.fields.domain()));
  }
  EXPECT_THROW(builtin_scenario("no-such-scenario"), ParseError);
}

TEST(Builtins, ScenarioAIsIsotropicSourceFree) {
  const Scenario a = builtin_scenario("a");
  EXPECT_TRUE(a.material.isotropic());
  EXPECT_TRUE(a.material.homogeneous());
  EXPECT_EQ(a.provenance, Provenance::kPrescribed);
  for (const auto& e : a.fields.force()) EXPECT_TRUE(e.is_zero());
}

TEST(Parse, MinimalDocumentUsesDefaults) {
  const Scenario s = parse_scenario(kMinimal);
  EXPECT_EQ(s.name, "minimal");
  EXPECT_EQ(s.provenance, Provenance::kManufactured);
  EXPECT_EQ(s.dims.n, 3);
  EXPECT_EQ(s.tolerances.el_residual, 1e-10);
  EXPECT_TRUE(std::holds_alternative<Ball>(s.rule.geometry));
}

TEST(Parse, CommentsAreAllowed) {
  EXPECT_NO_THROW(parse_scenario(std::string("// leading note\n") + kMinimal));
}

TEST(Parse, SyntaxErrorCarriesOffset) {
  const std::string bad = replace(kMinimal, "\"name\": \"minimal\",", "\"name\": \"minimal\" oops,");
  try {
    parse_scenario(bad);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_GT(e.position(), 0u);
    EXPECT_LT(e.position(), bad.size());
  }
}

TEST(Parse, SchemaErrorsNameTheOffendingKey) {
  EXPECT_NE(parse_error_of(replace(kMinimal, "\"name\"", "\"nmae\"")).find("nmae"), std::string::npos);
  EXPECT_NE(parse_error_of(replace(kMinimal, "[\"x1\", \"0\", \"0\"]", "[\"x1\", \"0\"]")).find("/fields/u"),
            std::string::npos);
  EXPECT_NE(parse_error_of(replace(kMinimal, "\"x1\"", "\"x1 +\"")).find("/fields/u/0"), std::string::npos);
  EXPECT_NE(parse_error_of(replace(kMinimal, "\"A\": [1, 1, 1]", "\"A\": [1, 1]")).find("/material"),
            std::string::npos);
}

TEST(Parse, GeometryOutsideDomainIsRejected) {
  const std::string text = replace(kMinimal, "\"domain\"",
                                   "\"quadrature\": { \"geometry\": { \"ball\": { \"center\": [0.5, 0, 0], "
                                   "\"radius\": 0.8 } } },\n  \"domain\"");
  EXPECT_THROW(parse_scenario(text), ParseError);
}

TEST(Parse, MissingFileIsAParseError) {
  EXPECT_THROW(load_scenario_file("/nonexistent/scenario.json"), ParseError);
  EXPECT_THROW(resolve_scenario("/nonexistent/scenario.json"), ParseError);
}

TEST(Parse, BuiltinRoundTripsThroughText) {
  const Scenario direct = builtin_scenario("b");
  const Scenario reparsed = parse_scenario(builtin_source("b"));
  const Point x{0.1, 0.2, 0.3};
  const auto m1 = direct.material.evaluate(x), m2 = reparsed.material.evaluate(x);
  EXPECT_EQ(max_abs_difference(m1.C, m2.C), 0.0);
  EXPECT_EQ(max_abs_difference(direct.fields.evaluate_jet(x).force.value, reparsed.fields.evaluate_jet(x).force.value),
            0.0);
}

TEST(SamplePoints, DeterministicAndInside) {
  const Region box = Box{{-1, -2, 0}, {1, 2, 3}};
  const auto a = sample_points(box, 200, 9);
  const auto b = sample_points(box, 200, 9);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, sample_points(box, 200, 10));
  const Region shrunk = Box{{-0.95, -1.9, 0.075}, {0.95, 1.9, 2.925}};
  for (const Point& x : a) EXPECT_TRUE(contains(shrunk, x));
  const Region ball = Ball{{0.5, 0, 0}, 2.0};
  for (const Point& x : sample_points(ball, 200, 3, 0.5)) EXPECT_TRUE(contains(Ball{{0.5, 0, 0}, 1.0}, x));
}

TEST(SamplePoints, UnitUniformRange) {
  EXPECT_EQ(unit_uniform(0), 0.0);
  EXPECT_LT(unit_uniform(~std::uint64_t{0}), 1.0);
  EXPECT_EQ(unit_uniform(std::uint64_t{1} << 63), 0.5);
}
