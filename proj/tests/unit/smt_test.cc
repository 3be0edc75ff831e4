#include "fodot/smt.h"

#include <gtest/gtest.h>

#include "fodot/error.h"
#include "test_util.h"

namespace fodot {
namespace {

using testing::load;

TEST(SExpr, ReadsNestedAndQuoted) {
  size_t pos = 0;
  auto e = read_sexpr("((|age()| (- 3)) (x \"a\"\"b\"))\n", pos);
  ASSERT_TRUE(e);
  EXPECT_EQ(e->to_string(), "((age() (- 3)) (x a\"b))");
  pos = 0;
  EXPECT_FALSE(read_sexpr("(a (b", pos));
}

TEST(SExpr, Numbers) {
  size_t pos = 0;
  EXPECT_EQ(*parse_smt_number(*read_sexpr("(/ 37.0 2.0) ", pos)), Number(37) / 2);
  pos = 0;
  EXPECT_EQ(*parse_smt_number(*read_sexpr("(- (/ 1 3)) ", pos)), Number(-1) / 3);
}

const char* kVoting = R"(
vocabulary V {
  type Age := {0..120}
  age: () -> Age
  vote: () -> Bool
}
theory T:V { vote() <=> 18 =< age(). }
)";

TEST(Solver, EmptySessionIsSat) {
  SolverSession session(SolverConfig{});
  EXPECT_EQ(session.check_sat(), SatStatus::kSat);
}

TEST(Solver, MissingExecutableIsSpawnError) {
  SolverConfig config;
  config.command = {"/nonexistent/solver-binary"};
  try {
    SolverSession session(config);
    FAIL() << "expected SolverSpawnError";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSolverSpawn);
  }
}

TEST(Solver, VotingCheckUnder) {
  auto kb = load(kVoting);
  GroundTheory gt = ground_theory(*kb.tkb, kb.structure);
  SolverSession session(SolverConfig{});
  session.load(gt);
  const int vote = *gt.find_term(parse_fact(kb.structure, "vote()").first);
  const int age = *gt.find_term(parse_fact(kb.structure, "age() = 1").first);

  SolverAnswer free = session.check_under({});
  ASSERT_EQ(free.status, SatStatus::kSat);
  ASSERT_TRUE(free.model);
  EXPECT_EQ(free.model->terms[vote].boolean, free.model->terms[age].number >= 18);

  auto [vt, vv] = parse_fact(kb.structure, "vote()");
  auto [at, av] = parse_fact(kb.structure, "age() = 17");
  SolverAnswer bad = session.check_under({{"a1", gt.fact_formula(vt, vv)}, {"a2", gt.fact_formula(at, av)}},
                                         false, true);
  EXPECT_EQ(bad.status, SatStatus::kUnsat);
  EXPECT_FALSE(bad.core.empty());

  SolverAnswer voted = session.check_under({{"a1", gt.fact_formula(vt, vv)}});
  ASSERT_EQ(voted.status, SatStatus::kSat);
  EXPECT_GE(voted.model->terms[age].number, 18);
  EXPECT_EQ(session.depth(), 0);
}

TEST(Solver, FalseAssertionIsItsOwnCore) {
  auto kb = load("vocabulary V { p: () -> Bool } theory T:V { p(). false. }");
  GroundTheory gt = ground_theory(*kb.tkb, kb.structure);
  SolverSession session(SolverConfig{});
  session.load(gt);
  SolverAnswer a = session.check_under({}, false, true);
  ASSERT_EQ(a.status, SatStatus::kUnsat);
  EXPECT_EQ(a.core, std::vector<std::string>{"axiom:2"});
}

TEST(Solver, CustomSortValues) {
  auto kb = load(R"(
vocabulary V { type Person := {Bob, Alice, Carol}  best: () -> Person }
theory T:V { best() ~= Bob & best() ~= Carol. }
)");
  GroundTheory gt = ground_theory(*kb.tkb, kb.structure);
  SolverSession session(SolverConfig{});
  session.load(gt);
  SolverAnswer a = session.check_under({});
  ASSERT_EQ(a.status, SatStatus::kSat);
  EXPECT_EQ(kb.structure.value_to_string(a.model->terms[0]), "Alice");
}

}  // namespace
}  // namespace fodot
