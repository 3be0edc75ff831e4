#include "fodot/consult.h"

#include <gtest/gtest.h>

#include <algorithm>

#include "test_util.h"

namespace fodot {
namespace {

using testing::load;

const char* kVoting = R"(
vocabulary V {
  type Age := {0..120}
  age: () -> Age
  vote: () -> Bool
}
theory T:V { vote() <=> 18 =< age(). }
)";

DisplayStatus status(const ConsultSession& c, const std::string& atom) {
  auto idx = c.theory().find_atom(atom);
  EXPECT_TRUE(idx) << atom;
  return idx ? c.status(*idx) : DisplayStatus::kUnknown;
}

std::vector<std::string> labels(const Explanation& e) {
  std::vector<std::string> out;
  for (const auto& item : e.items) out.push_back(item.label);
  std::sort(out.begin(), out.end());
  return out;
}

TEST(Consult, FreshVotingSessionIsUndecided) {
  auto kb = load(kVoting);
  ConsultSession c(kb.tkb, kb.structure);
  for (DisplayStatus st : c.status_table()) {
    EXPECT_TRUE(st == DisplayStatus::kUnknown || st == DisplayStatus::kIrrelevant);
  }
  EXPECT_EQ(status(c, "vote()"), DisplayStatus::kUnknown);
}

TEST(Consult, UnitAxiomPropagatesAtCreation) {
  auto kb = load("vocabulary V { p: () -> Bool } theory T:V { p(). }");
  ConsultSession c(kb.tkb, kb.structure);
  EXPECT_EQ(status(c, "p()"), DisplayStatus::kPropagatedTrue);
}

TEST(Consult, UnsatisfiableKBIsRejected) {
  auto kb = load("vocabulary V { p: () -> Bool } theory T:V { p(). ~p(). }");
  try {
    ConsultSession c(kb.tkb, kb.structure);
    FAIL() << "expected InconsistentKB";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInconsistentKB);
  }
}

TEST(Consult, AssertAndRetract) {
  auto kb = load(kVoting);
  ConsultSession c(kb.tkb, kb.structure);
  const std::vector<DisplayStatus> fresh = c.status_table();
  auto changed = c.assert_text("vote()");
  EXPECT_FALSE(changed.empty());
  EXPECT_EQ(status(c, "vote()"), DisplayStatus::kUser);
  EXPECT_EQ(status(c, "18 =< age()"), DisplayStatus::kPropagatedTrue);
  EXPECT_EQ(c.consequences(), propagate(c.reasoner(), c.structure()));

  c.retract_text("vote()");
  EXPECT_EQ(status(c, "18 =< age()"), DisplayStatus::kUnknown);
  EXPECT_EQ(c.consequences(), propagate(c.reasoner(), c.structure()));
  EXPECT_EQ(c.status_table(), fresh);
}

TEST(Consult, ConflictingAssertIsExplained) {
  auto kb = load(kVoting);
  ConsultSession c(kb.tkb, kb.structure);
  c.assert_text("vote()");
  const auto before = c.status_table();
  try {
    c.assert_text("age() = 17");
    FAIL() << "expected ConflictingAssert";
  } catch (const ConflictError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConflictingAssert);
    EXPECT_EQ(labels(e.explanation()), (std::vector<std::string>{"axiom:1", "fact:age()", "fact:vote()"}));
  }
  EXPECT_EQ(c.status_table(), before);
  EXPECT_EQ(c.structure().user_facts().size(), 1u);
}

TEST(Consult, ReplacingAFactRepropagates) {
  auto kb = load(kVoting);
  ConsultSession c(kb.tkb, kb.structure);
  c.assert_text("age() = 17");
  EXPECT_EQ(status(c, "vote()"), DisplayStatus::kPropagatedFalse);
  c.assert_text("age() = 30");
  EXPECT_EQ(status(c, "vote()"), DisplayStatus::kPropagatedTrue);
  EXPECT_EQ(c.consequences(), propagate(c.reasoner(), c.structure()));
}

TEST(Consult, ExplainAndOptimize) {
  auto kb = load(kVoting);
  ConsultSession c(kb.tkb, kb.structure);
  c.assert_text("vote()");
  EXPECT_EQ(labels(c.explain("18 =< age()")),
            (std::vector<std::string>{"axiom:1", "fact:vote()", "negated:18 =< age()"}));
  EXPECT_EQ(c.optimize("age()", Direction::kMinimize).value, Value::of_number(18));
  try {
    c.explain("age() = 30");
    FAIL() << "expected NotAConsequence";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotAConsequence);
  }
}

TEST(Consult, RetractingANonFactFails) {
  auto kb = load(kVoting);
  ConsultSession c(kb.tkb, kb.structure);
  try {
    c.retract_text("vote()");
    FAIL() << "expected NotUserFact";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotUserFact);
  }
}

TEST(Consult, IrrelevantAtomsAreGreyed) {
  auto kb = load("vocabulary V { a, b: () -> Bool } theory T:V { a() => b(). }");
  ConsultSession c(kb.tkb, kb.structure);
  c.assert_text("b()");
  EXPECT_EQ(status(c, "a()"), DisplayStatus::kIrrelevant);
}

}  // namespace
}  // namespace fodot
