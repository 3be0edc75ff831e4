#include "fodot/inference.h"

#include <gtest/gtest.h>

#include "fodot/error.h"
#include "fodot/parser.h"
#include "oracle_check.h"
#include "test_util.h"

namespace fodot {
namespace {

using testing::check_against_oracle;
using testing::load;
using testing::with;

const char* kVoting = R"(
vocabulary V {
  type Age := {0..120}
  age: () -> Age
  vote: () -> Bool
}
theory T:V { vote() <=> 18 =< age(). }
)";

const char* kDriving = R"(
vocabulary V {
  type Age := {80, 90}
  age: () -> Age
  has_license, tested, can_drive: () -> Bool
}
theory T:V {
  { can_drive() <- has_license() & age() =< 85.
    can_drive() <- has_license() & tested(). }
}
)";

const char* kClosure = R"(
vocabulary V { type N := {1..3}  edge, tc: N * N -> Bool }
theory T:V {
  { !x, y in N: tc(x, y) <- edge(x, y).
    !x, y, z in N: tc(x, z) <- tc(x, y) & edge(y, z). }
}
)";

AtomStatus status_of(const Reasoner& r, const Consequences& c, const std::string& atom) {
  auto idx = r.theory().find_atom(atom);
  EXPECT_TRUE(idx) << atom;
  return idx ? c.status[*idx] : AtomStatus::kUnknown;
}

std::vector<std::string> labels(const Explanation& e) {
  std::vector<std::string> out;
  for (const auto& item : e.items) out.push_back(item.label);
  std::sort(out.begin(), out.end());
  return out;
}

ExprPtr term(const Reasoner& r, const std::string& text) { return check_expr(r.kb(), parse_expr(text)); }

TEST(ModelCheck, VotingExamples) {
  auto kb = load(kVoting);
  Reasoner r(kb.tkb, kb.structure);
  EXPECT_TRUE(model_check(r, kb.structure));
  EXPECT_FALSE(model_check(r, with(with(kb.structure, "vote()"), "age() = 17")));
  EXPECT_TRUE(model_check(r, with(kb.structure, "age() = 17")));
}

TEST(ModelCheck, EmptyTheory) {
  auto kb = load("vocabulary V { p: () -> Bool } theory T:V { }");
  EXPECT_TRUE(model_check(kb.tkb, kb.structure));
}

TEST(ModelExpand, BiconditionalForcesVote) {
  auto kb = load(kVoting);
  Reasoner r(kb.tkb, kb.structure);
  PartialStructure s = with(kb.structure, "age() = 20");
  auto models = model_expand(r, s, 1);
  ASSERT_EQ(models.size(), 1u);
  EXPECT_EQ(models[0].values.at(GroundTerm{kb.tkb->table.find_symbol("vote").value(), {}}), Value::of_bool(true));
  EXPECT_TRUE(oracle_satisfies(*kb.tkb, s, models[0]));
}

TEST(ModelExpand, UnsatGivesNoModels) {
  auto kb = load(kVoting);
  Reasoner r(kb.tkb, kb.structure);
  EXPECT_TRUE(model_expand(r, with(with(kb.structure, "vote()"), "age() = 17"), 5).empty());
}

TEST(ModelExpand, GraphsWithAGivenClosure) {
  auto kb = load(std::string(kClosure) + "structure S:V { tc := {(1,2), (2,3), (1,3)}. }");
  Reasoner r(kb.tkb, kb.structure);
  auto models = model_expand(r, kb.structure, 100);
  auto expected = oracle_enumerate(*kb.tkb, kb.structure);
  ASSERT_FALSE(models.empty());
  EXPECT_EQ(models.size(), expected.size());
  for (const Model& m : models) EXPECT_TRUE(oracle_satisfies(*kb.tkb, kb.structure, m));
}

TEST(Propagate, VotingExamples) {
  auto kb = load(kVoting);
  Reasoner r(kb.tkb, kb.structure);
  Consequences c = propagate(r, with(kb.structure, "vote()"));
  EXPECT_EQ(status_of(r, c, "18 =< age()"), AtomStatus::kTrue);
  EXPECT_EQ(status_of(r, c, "age() = 17"), AtomStatus::kFalse);
  EXPECT_EQ(status_of(r, c, "age() = 30"), AtomStatus::kUnknown);
  EXPECT_TRUE(c.user[*r.theory().find_atom("vote()")]);

  c = propagate(r, with(kb.structure, "age() = 17"));
  EXPECT_EQ(status_of(r, c, "vote()"), AtomStatus::kFalse);
  EXPECT_FALSE(c.user[*r.theory().find_atom("vote()")]);
  EXPECT_EQ(c.values.at(*r.theory().find_term(GroundTerm{kb.tkb->table.find_symbol("age").value(), {}})),
            Value::of_number(17));
}

TEST(Propagate, OnlyTheAssertedFact) {
  auto kb = load("vocabulary V { p, q: () -> Bool } theory T:V { }");
  Reasoner r(kb.tkb, kb.structure);
  Consequences c = propagate(r, with(kb.structure, "p()"));
  EXPECT_EQ(status_of(r, c, "p()"), AtomStatus::kTrue);
  EXPECT_TRUE(c.user[*r.theory().find_atom("p()")]);
  EXPECT_EQ(status_of(r, c, "q()"), AtomStatus::kUnknown);
}

TEST(Propagate, InconsistentIsReported) {
  auto kb = load(kVoting);
  Reasoner r(kb.tkb, kb.structure);
  try {
    propagate(r, with(with(kb.structure, "vote()"), "age() = 17"));
    FAIL() << "expected Inconsistent";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInconsistent);
  }
}

TEST(Propagate, IncrementalMatchesFromScratch) {
  auto kb = load(kDriving);
  Reasoner r(kb.tkb, kb.structure);
  PartialStructure s = with(kb.structure, "has_license()");
  Consequences before = propagate(r, s);
  s = with(s, "tested()");
  std::vector<bool> unknown(before.status.size());
  for (size_t a = 0; a < unknown.size(); ++a) unknown[a] = !before.decided(static_cast<int>(a));
  EXPECT_EQ(propagate_from(r, s, before, unknown), propagate(r, s));
}

TEST(Explain, VotingConsequence) {
  auto kb = load(kVoting);
  Reasoner r(kb.tkb, kb.structure);
  PartialStructure s = with(kb.structure, "age() = 20");
  Explanation e = explain(r, s, *r.theory().find_atom("vote()"), true);
  EXPECT_EQ(labels(e), (std::vector<std::string>{"axiom:1", "fact:age()", "negated:vote()"}));
}

TEST(Explain, UserFactExplainsItself) {
  auto kb = load(kVoting);
  Reasoner r(kb.tkb, kb.structure);
  Explanation e = explain(r, with(kb.structure, "vote()"), *r.theory().find_atom("vote()"), true);
  EXPECT_EQ(labels(e), (std::vector<std::string>{"fact:vote()", "negated:vote()"}));
}

TEST(Explain, DrivingUsesTheSecondRule) {
  auto kb = load(kDriving);
  Reasoner r(kb.tkb, kb.structure);
  PartialStructure s = with(with(kb.structure, "has_license()"), "tested()");
  Explanation e = explain(r, s, *r.theory().find_atom("can_drive()"), true);
  EXPECT_EQ(labels(e),
            (std::vector<std::string>{"fact:has_license()", "fact:tested()", "negated:can_drive()", "rule:1.2"}));
}

TEST(Explain, NonConsequenceIsRejected) {
  auto kb = load(kVoting);
  Reasoner r(kb.tkb, kb.structure);
  try {
    explain(r, kb.structure, *r.theory().find_atom("vote()"), true);
    FAIL() << "expected NotAConsequence";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotAConsequence);
  }
}

TEST(Optimize, MinimumVotingAge) {
  auto kb = load(kVoting);
  Reasoner r(kb.tkb, kb.structure);
  Optimum o = optimize(r, with(kb.structure, "vote()"), term(r, "age()"), Direction::kMinimize);
  EXPECT_EQ(o.value, Value::of_number(18));
  o = optimize(r, kb.structure, term(r, "age()"), Direction::kMaximize);
  EXPECT_EQ(o.value, Value::of_number(120));
}

TEST(Optimize, ConstantObjective) {
  auto kb = load(kVoting);
  Reasoner r(kb.tkb, kb.structure);
  EXPECT_EQ(optimize(r, kb.structure, term(r, "5"), Direction::kMinimize).value, Value::of_number(5));
}

TEST(Optimize, CountOfTrueAtoms) {
  auto kb = load("vocabulary V { type Person := {Bob, Alice}  p: Person -> Bool } theory T:V { }");
  Reasoner r(kb.tkb, kb.structure);
  Optimum o = optimize(r, kb.structure, term(r, "#{x in Person: p(x)}"), Direction::kMaximize);
  EXPECT_EQ(o.value, Value::of_number(2));
}

TEST(Optimize, RealObjectiveWithinTolerance) {
  auto kb = load("vocabulary V { x: () -> Real } theory T:V { x() > 1/3. x() < 10. }");
  Reasoner r(kb.tkb, kb.structure);
  Optimum o = optimize(r, kb.structure, term(r, "x()"), Direction::kMinimize);
  EXPECT_NEAR(o.value.number.convert_to<double>(), 1.0 / 3, kRealTolerance);
  EXPECT_GT(o.value.number, Number(1) / 3);
}

TEST(Optimize, UnboundedIsReported) {
  auto kb = load("vocabulary V { x: () -> Int } theory T:V { x() < 10. }");
  Reasoner r(kb.tkb, kb.structure);
  try {
    optimize(r, kb.structure, term(r, "x()"), Direction::kMinimize);
    FAIL() << "expected Unbounded";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnbounded);
  }
}

TEST(Relevance, ImpliedConclusionMakesPremiseIrrelevant) {
  auto kb = load("vocabulary V { a, b: () -> Bool } theory T:V { a() => b(). }");
  Reasoner r(kb.tkb, kb.structure);
  const int a = *r.theory().find_atom("a()"), b = *r.theory().find_atom("b()");
  Relevance rel = relevance(r, with(kb.structure, "b()"));
  EXPECT_FALSE(rel.relevant[a]);
  EXPECT_TRUE(rel.relevant[b]);

  rel = relevance(r, with(kb.structure, "a()"));
  EXPECT_EQ(rel.consequences.status[b], AtomStatus::kTrue);
  EXPECT_TRUE(rel.consequences.user[a]);

  rel = relevance(r, kb.structure);
  EXPECT_TRUE(rel.relevant[a]);
  EXPECT_TRUE(rel.relevant[b]);
}

TEST(Relevance, ConstrainedTermStaysRelevant) {
  auto kb = load(kVoting);
  Reasoner r(kb.tkb, kb.structure);
  Relevance rel = relevance(r, with(kb.structure, "vote()"));
  EXPECT_TRUE(rel.relevant[*r.theory().find_atom("age() = 30")]);
}

TEST(Oracle, VotingOverSmallAges) {
  auto kb = load(R"(
vocabulary V { type Age := {16, 17, 18}  age: () -> Age  vote: () -> Bool }
theory T:V { vote() <=> 18 =< age(). }
)");
  EXPECT_EQ(oracle_enumerate(*kb.tkb, kb.structure).size(), 3u);
}

TEST(Oracle, OnePropositionHasTwoModels) {
  auto kb = load("vocabulary V { p: () -> Bool } theory T:V { }");
  EXPECT_EQ(oracle_enumerate(*kb.tkb, kb.structure).size(), 2u);
}

TEST(Oracle, DrivingMatchesCompletion) {
  auto kb = load(kDriving);
  auto models = oracle_enumerate(*kb.tkb, kb.structure);
  // 2 ages x 2 licences x 2 tests, can_drive determined by the rules.
  EXPECT_EQ(models.size(), 8u);
  Reasoner r(kb.tkb, kb.structure);
  EXPECT_EQ(check_against_oracle(r, kb.structure), "");
}

TEST(Oracle, TooLargeIsReported) {
  auto kb = load(kVoting);
  auto big = load("vocabulary V { type N := {1..30}  p: N -> Bool } theory T:V { }");
  try {
    oracle_enumerate(*big.tkb, big.structure);
    FAIL() << "expected TooLarge";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kTooLarge);
  }
}

TEST(Oracle, AgreesOnExamples) {
  for (const std::string source : {std::string(kDriving), std::string(kClosure),
                                   std::string("vocabulary V { type P := {a, b, c}  p, q: P -> Bool  n: () -> P }"
                                               "theory T:V { !x in P: p(x) => q(x). #{x in P: q(x)} =< 2. p(n()). }")}) {
    auto kb = load(source);
    Reasoner r(kb.tkb, kb.structure);
    EXPECT_EQ(check_against_oracle(r, kb.structure), "") << source;
  }
}

}  // namespace
}  // namespace fodot
