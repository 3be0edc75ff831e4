#include "fodot/typecheck.h"

#include <gtest/gtest.h>

#include <variant>

#include "fodot/parser.h"

namespace fodot {
namespace {

const char* kVoting = R"(
vocabulary V {
  type Age := {0..120}
  age: () -> Age
  vote: () -> Bool
}
theory T:V { vote() <=> 18 =< age(). }
)";

std::vector<Diagnostic> type_errors(const std::string& source) {
  KnowledgeBase kb = parse_kb(source);
  try {
    check(kb);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kType);
    return e.diagnostics();
  }
  return {};
}

const Axiom& first_axiom(const TypedKB& tkb) {
  return std::get<Axiom>(tkb.kb.theories.at(0).statements.at(0));
}

TEST(Typecheck, VotingIsWellTyped) {
  TypedKB tkb = check(parse_kb(kVoting));
  const Axiom& ax = first_axiom(tkb);
  EXPECT_EQ(ax.formula->type, kBoolType);
  const ExprPtr& cmp = ax.formula->args[1];
  EXPECT_EQ(cmp->kind, ExprKind::kCompare);
  EXPECT_EQ(cmp->type, kBoolType);
  EXPECT_EQ(cmp->args[1]->type, *tkb.table.find_type("Age"));
  ExprPtr e = check_expr(tkb, parse_expr("18 =< age()"));
  EXPECT_EQ(e->type, kBoolType);
}

TEST(Typecheck, WrongArgumentType) {
  auto diags = type_errors(R"(
vocabulary V {
  type Person := {Bob}
  weight: Person -> Real
}
theory T:V { weight(3) > 0. }
)");
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_NE(diags[0].message.find("expected Person"), std::string::npos) << diags[0].message;
  EXPECT_EQ(diags[0].span.line, 6);
}

TEST(Typecheck, ReportsEveryError) {
  auto diags = type_errors(R"(
vocabulary V {
  type Person := {Bob}
  weight: Person -> Real
  p: () -> Bool
}
theory T:V {
  weight(3) > 0.
  p() + 1 = 2.
  q().
}
)");
  EXPECT_EQ(diags.size(), 3u);
}

TEST(Typecheck, ConceptCount) {
  const char* source = R"(
vocabulary V {
  type Person := {Bob, Alice}
  tall: Person -> Bool
  old: Person -> Bool
  n: () -> Int
}
theory T:V { n() = #{c in Concept[Person -> Bool]: $(c)(Bob)}. }
)";
  TypedKB tkb = check(parse_kb(source));
  const ExprPtr& count = first_axiom(tkb).formula->args[1];
  EXPECT_EQ(count->kind, ExprKind::kCount);
  EXPECT_EQ(count->type, kIntType);
  auto concept_id = count->binders[0].type;
  EXPECT_TRUE(concept_id.is_parameterized_concept());
}

TEST(Typecheck, ApplyingUnparameterizedConcept) {
  auto diags = type_errors(R"(
vocabulary V {
  type Person := {Bob}
  tall: Person -> Bool
}
theory T:V { ?c in Concept: $(c)(Bob). }
)");
  EXPECT_FALSE(diags.empty());
}

TEST(Typecheck, DivisionIsReal) {
  TypedKB tkb = check(parse_kb(R"(
vocabulary V {
  a: () -> Int
  b: () -> Int
}
theory T:V { a() / b() > 1. }
)"));
  const ExprPtr& div = first_axiom(tkb).formula->args[0];
  EXPECT_EQ(div->kind, ExprKind::kDiv);
  EXPECT_EQ(tkb.table.numeric_kind(div->type), TypeKind::kReal);
}

TEST(Typecheck, Idempotent) {
  TypedKB once = check(parse_kb(kVoting));
  TypedKB twice = check(once.kb);
  EXPECT_TRUE(once.kb == twice.kb);
  EXPECT_EQ(first_axiom(once).formula->args[1]->args[1]->type,
            first_axiom(twice).formula->args[1]->args[1]->type);
}

}  // namespace
}  // namespace fodot
