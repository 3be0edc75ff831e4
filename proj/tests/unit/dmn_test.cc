#include "fodot/dmn.h"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "fodot/error.h"
#include "fodot/inference.h"
#include "test_util.h"

namespace fodot {
namespace {

using testing::load;
using testing::with;

std::string read(const std::string& name) {
  std::ifstream in(std::string(FODOT_TEST_DATA) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kVocabulary = read("bmi.idp");

// BMILevel propagated from the translated table at a given BMI.
std::string level_at(const std::string& definition, const std::string& bmi) {
  auto kb = load(kVocabulary + "theory T:V {\n" + definition + "}\n");
  Reasoner r(kb.tkb, kb.structure);
  PartialStructure s = with(kb.structure, "BMI() = " + bmi);
  Consequences c = propagate(r, s);
  auto term = r.theory().find_term(GroundTerm{*kb.tkb->table.find_symbol("BMILevel"), {}});
  auto it = c.values.find(*term);
  return it == c.values.end() ? "?" : s.value_to_string(it->second);
}

template <typename F>
ErrorKind error_of(F f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::kInvalidArgument;
}

TEST(Dmn, ParsesTheBmiTable) {
  DecisionTable t = parse_table(read("bmi.dmn"));
  EXPECT_EQ(t.name, "BMILevel");
  ASSERT_EQ(t.inputs.size(), 1u);
  ASSERT_EQ(t.outputs.size(), 1u);
  EXPECT_EQ(t.rows, 4u);
  const Condition& normal = t.inputs[0].conditions[1];
  EXPECT_EQ(normal.kind, Condition::Kind::kInterval);
  EXPECT_TRUE(normal.lo_closed);
  EXPECT_FALSE(normal.hi_closed);
  EXPECT_EQ(normal.lo, "18.5");
  EXPECT_EQ(normal.hi, "25");
  EXPECT_EQ(t.outputs[0].values[3], "Obese");
}

TEST(Dmn, TranslatesRowsToRules) {
  auto kb = load(kVocabulary);
  std::string text = to_definition_text(parse_table(read("bmi.dmn")), *kb.tkb);
  EXPECT_NE(text.find("BMILevel() = Underweight <- BMI() < 18.5."), std::string::npos) << text;
  EXPECT_NE(text.find("BMILevel() = Normal <- 18.5 =< BMI() < 25."), std::string::npos) << text;
  Definition d = to_definition(parse_table(read("bmi.dmn")), *kb.tkb);
  EXPECT_EQ(d.rules.size(), 4u);
}

TEST(Dmn, TranslationReproducesTheTable) {
  auto kb = load(kVocabulary);
  std::string def = to_definition_text(parse_table(read("bmi.dmn")), *kb.tkb);
  EXPECT_EQ(level_at(def, "27"), "Overweight");
  EXPECT_EQ(level_at(def, "18.5"), "Normal");
  EXPECT_EQ(level_at(def, "18.4"), "Underweight");
  EXPECT_EQ(level_at(def, "25"), "Overweight");
  EXPECT_EQ(level_at(def, "30"), "Obese");
}

TEST(Dmn, CatchAllRow) {
  auto kb = load("vocabulary V { type L := {a, b}  x: () -> Int  out: () -> L }");
  DecisionTable t = parse_table("table T U\nin: x ; out: out\n- | a\n");
  EXPECT_EQ(to_definition_text(t, *kb.tkb), "{\n  out() = a <- true.\n}\n");
}

TEST(Dmn, MalformedTables) {
  EXPECT_EQ(error_of([] { parse_table("table T U\nin: x ; out: y\n1 | a | b\n"); }), ErrorKind::kMalformedTable);
  EXPECT_EQ(error_of([] { parse_table("table T U\n"); }), ErrorKind::kMalformedTable);
  EXPECT_EQ(error_of([] { parse_table("table T F\nin: x ; out: y\n1 | a\n"); }), ErrorKind::kUnknownHitPolicy);
  auto kb = load(kVocabulary);
  EXPECT_EQ(error_of([&] { to_definition_text(parse_table("table T U\nin: weight ; out: BMILevel\n- | Normal\n"), *kb.tkb); }),
            ErrorKind::kUnknownSymbol);
}

TEST(Dmn, BmiTableIsCompleteAndUnique) {
  auto kb = load(kVocabulary);
  TableCheck c = check_table(parse_table(read("bmi.dmn")), kb.tkb, kb.structure, {{"BMI", 0, 100}});
  EXPECT_TRUE(c.complete);
  EXPECT_TRUE(c.unique);
}

TEST(Dmn, MissingRowLeavesAGap) {
  auto kb = load(kVocabulary);
  std::string text = read("bmi.dmn");
  text = text.substr(0, text.find(">= 30"));
  TableCheck c = check_table(parse_table(text), kb.tkb, kb.structure, {{"BMI", 0, 100}});
  ASSERT_FALSE(c.complete);
  Number gap = parse_expr(c.gap->inputs.at("BMI"))->number;
  EXPECT_GE(gap, 30);
  EXPECT_TRUE(c.unique);
}

TEST(Dmn, DuplicatedRowOverlaps) {
  auto kb = load(kVocabulary);
  TableCheck c = check_table(parse_table(read("bmi.dmn") + ">= 30 | Obese\n"), kb.tkb, kb.structure, {{"BMI", 0, 100}});
  EXPECT_TRUE(c.complete);
  ASSERT_FALSE(c.unique);
  EXPECT_EQ(c.overlap->rows, (std::vector<size_t>{4, 5}));
}

TEST(Dmn, UnboundedNumericInput) {
  auto kb = load(kVocabulary);
  EXPECT_EQ(error_of([&] { check_table(parse_table(read("bmi.dmn")), kb.tkb, kb.structure, {}); }),
            ErrorKind::kUnboundedInput);
}

TEST(Dmn, FiniteInputsNeedNoBounds) {
  auto kb = load("vocabulary V { type C := {red, green, blue}  colour: () -> C  warm: () -> Bool }");
  DecisionTable t = parse_table("table Warm U\nin: colour ; out: warm\nred | true\ngreen, blue | false\n");
  TableCheck c = check_table(t, kb.tkb, kb.structure, {});
  EXPECT_TRUE(c.complete);
  EXPECT_TRUE(c.unique);
  EXPECT_EQ(to_definition_text(t, *kb.tkb), "{\n  warm() <- colour() = red.\n}\n");
}

}  // namespace
}  // namespace fodot
