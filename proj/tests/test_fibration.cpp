#include "cbf/fibration.hpp"
#include "cbf/model_io.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace cbf;

namespace {

// Blow-up of a point on a surface, local chart over the base curve H: z = w_{H'} w_E.
FibrationModel blowup(const Rational& a) {
  return FibrationModel(1, 1, {{1}, {1}}, {a, a - 1}, {"H"}, {"H'", "E"}, {"H"});
}

bool has_item(const std::vector<Violation>& vs, int item) {
  for (const auto& v : vs)
    if (v.item == item) return true;
  return false;
}

}  // namespace

TEST(Pullback, BlowupPullsBackToStrictTransformPlusExceptional) {
  auto d = pullback(blowup(0), DivisorQ::on_base({{"H", 1}}));
  EXPECT_EQ(d, (DivisorQ{{PrimeComponent::vertical("H'"), 1}, {PrimeComponent::vertical("E"), 1}}));
}

TEST(Pullback, MultipleFiber) {
  for (int mult : {2, 3, 5}) {
    FibrationModel model(1, 0, {{mult}}, {}, {"Q"}, {"F"}, {"Q"});
    EXPECT_EQ(pullback(model, DivisorQ::on_base({{"Q", 1}})),
              (DivisorQ{{PrimeComponent::vertical("F"), Rational(mult)}}));
  }
}

TEST(Pullback, EmptyAndUnknown) {
  EXPECT_TRUE(pullback(blowup(0), DivisorQ{}).empty());
  EXPECT_THROW(pullback(blowup(0), DivisorQ::on_base({{"nope", 1}})), DomainError);
}

TEST(Pullback, Linear) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    auto model = testkit::random_model(rng);
    std::vector<DivisorQ::Term> t1, t2;
    for (std::size_t i = 0; i < model.base_dim(); ++i) {
      t1.emplace_back(PrimeComponent::base(model.base_name(i)), testkit::random_rational(rng, -3, 3));
      t2.emplace_back(PrimeComponent::base(model.base_name(i)), testkit::random_rational(rng, -3, 3));
    }
    DivisorQ d1(t1), d2(t2);
    EXPECT_EQ(pullback(model, d1 + d2), pullback(model, d1) + pullback(model, d2));
  }
}

TEST(ClassifyVariables, Node) {
  FibrationModel node(1, 1, {{1}, {1}}, {}, {"z1"});
  EXPECT_EQ(classify_variables(node), (VariableGroups{{0}, {1}, {}}));
}

TEST(ClassifyVariables, DoubleFiberWithFreeCoordinate) {
  FibrationModel model(1, 1, {{2}, {0}}, {}, {"z1"});
  EXPECT_EQ(classify_variables(model), (VariableGroups{{0}, {}, {1}}));
}

TEST(ClassifyVariables, TwoDimensionalBase) {
  FibrationModel model(2, 1, {{1, 0}, {0, 1}, {0, 1}}, {}, {"z1", "z2"});
  EXPECT_EQ(classify_variables(model), (VariableGroups{{0, 1}, {2}, {}}));
}

TEST(ClassifyVariables, SkipsSingularLeadingBlock) {
  // rows 0 and 1 are parallel; the first invertible pair is {0, 2}
  FibrationModel model(2, 1, {{1, 1}, {2, 2}, {0, 1}}, {}, {"z1", "z2"});
  EXPECT_EQ(classify_variables(model), (VariableGroups{{0, 2}, {1}, {}}));
}

TEST(ClassifyVariables, RankDeficientIsModelError) {
  FibrationModel model(2, 1, {{1, 1}, {2, 2}, {0, 0}}, {}, {"z1", "z2"});
  EXPECT_THROW(classify_variables(model), ModelError);
  EXPECT_TRUE(has_item(validate(model), 0));
}

TEST(ClassifyVariables, GroupsInvariantAndDeterministic) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    auto model = testkit::random_model(rng);
    auto g = classify_variables(model);
    EXPECT_EQ(g, classify_variables(model));
    EXPECT_EQ(g.a_group.size(), model.base_dim());
    EXPECT_EQ(g.a_group.size() + g.b_group.size() + g.c_group.size(), model.rows());
    for (auto j : g.b_group) EXPECT_TRUE(model.is_vertical(j));
    for (auto j : g.c_group) EXPECT_FALSE(model.is_vertical(j));
  }
}

TEST(Validate, NodeWithTrivialDivisor) {
  EXPECT_TRUE(validate(FibrationModel(1, 1, {{1}, {1}}, {}, {"z1"})).empty());
}

TEST(Validate, HorizontalCoefficientOneViolatesItem7) {
  FibrationModel model(1, 1, {{1}, {0}}, {0, 1}, {"z1"});
  auto vs = validate(model);
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_EQ(vs[0].item, 7);
  EXPECT_NE(vs[0].describe().find("Def. 4.1(7)"), std::string::npos);
}

TEST(Validate, VerticalComponentOffBViolatesItem3) {
  // w2 maps into {z2 = 0}, which is not in B
  FibrationModel model(2, 1, {{1, 0}, {0, 1}, {0, 0}}, {0, Rational(1, 2), 0}, {"z1"});
  EXPECT_TRUE(has_item(validate(model), 3));
}

TEST(Validate, NonSmoothOffBViolatesItem5) {
  FibrationModel node(1, 1, {{1}, {1}}, {}, {});
  EXPECT_TRUE(has_item(validate(node), 5));
}

TEST(Validate, StructuralErrorsThrowOnConstruction) {
  EXPECT_THROW(FibrationModel(1, 1, {{1}}, {}, {"z1"}), DomainError);
  EXPECT_THROW(FibrationModel(1, 1, {{1}, {-1}}, {}, {"z1"}), DomainError);
  EXPECT_THROW(FibrationModel(1, 1, {{1}, {1}}, {}, {"zz"}), DomainError);
  EXPECT_THROW(FibrationModel(1, 1, {{1}, {1}}, {}, {"z1"}, {"a", "a"}), DomainError);
}

TEST(ModelJson, LoadsNamesAndCoefficients) {
  auto j = nlohmann::json::parse(R"({
    "m": 1, "n": 1, "exponents": [[1], [1]],
    "r": {"H'": "1/2", "E": "-1/2"},
    "base_divisor": ["H"],
    "names": {"upstairs": ["H'", "E"], "base": ["H"]}})");
  auto model = io::model_from_json(j);
  EXPECT_EQ(model.r(0), Rational(1, 2));
  EXPECT_EQ(model.r(1), Rational(-1, 2));
  EXPECT_TRUE(model.in_base_divisor(0));
  auto again = io::model_from_json(io::model_to_json(model));
  EXPECT_EQ(again.r(), model.r());
  EXPECT_EQ(again.exponents(), model.exponents());
  EXPECT_EQ(again.upstairs_names(), model.upstairs_names());
}

TEST(ModelJson, RejectsMalformed) {
  EXPECT_THROW(io::model_from_json(nlohmann::json::parse(R"({"m": 1})")), DomainError);
  EXPECT_THROW(io::model_from_json(nlohmann::json::parse(
                   R"({"m": 1, "n": 0, "exponents": [[1]], "r": {"w9": "1"}})")),
               DomainError);
  EXPECT_THROW(io::model_from_json(nlohmann::json::parse(
                   R"({"m": 1, "n": 0, "exponents": [[1]], "r": {"w1": 0.5}})")),
               DomainError);
}
