#include "fodot/structure.h"

#include <gtest/gtest.h>

#include <functional>

#include "test_util.h"

namespace fodot {
namespace {

using testing::load;
using testing::with;

const char* kPeople = R"(
vocabulary V {
  type Person := {Bob, Alice}
  weight: Person -> Real
  tall: Person -> Bool
  age: () -> Int
}
theory T:V { }
structure S:V {
  weight := {Bob -> 80.5, Alice -> 60}
}
)";

ErrorKind error_kind(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error";
  return ErrorKind::kInvalidArgument;
}

GroundTerm term(const PartialStructure& s, const std::string& text) {
  return resolve_term(s, check_expr(s.kb(), parse_expr(text)));
}

TEST(Structure, FunctionEnumeration) {
  auto kb = load(kPeople);
  auto a = kb.structure.lookup(term(kb.structure, "weight(Bob)"));
  ASSERT_TRUE(a);
  EXPECT_EQ(a->origin, Origin::kEnumeration);
  EXPECT_EQ(a->value, Value::of_number(Number(161) / 2));
  auto b = kb.structure.lookup(term(kb.structure, "weight(Alice)"));
  ASSERT_TRUE(b);
  EXPECT_EQ(b->value, Value::of_number(Number(60)));
  EXPECT_FALSE(kb.structure.lookup(term(kb.structure, "tall(Bob)")));
}

TEST(Structure, PredicateEnumerationIsTwoValued) {
  auto kb = load(R"(
vocabulary V {
  type Person := {Bob, Alice}
  tall: Person -> Bool
}
theory T:V { }
structure S:V { tall := {Bob} }
)");
  auto bob = kb.structure.lookup(term(kb.structure, "tall(Bob)"));
  auto alice = kb.structure.lookup(term(kb.structure, "tall(Alice)"));
  ASSERT_TRUE(bob);
  ASSERT_TRUE(alice);
  EXPECT_EQ(bob->value, Value::of_bool(true));
  EXPECT_EQ(alice->value, Value::of_bool(false));
}

TEST(Structure, EmptyBlockLeavesEverythingUnknown) {
  auto kb = load(R"(
vocabulary V {
  type Person := {Bob, Alice}
  tall: Person -> Bool
  age: () -> Int
}
theory T:V { }
structure S:V { }
)");
  EXPECT_FALSE(kb.structure.lookup(term(kb.structure, "tall(Bob)")));
  EXPECT_FALSE(kb.structure.lookup(term(kb.structure, "age()")));
  EXPECT_TRUE(kb.structure.user_facts().empty());
}

TEST(Structure, AssertThenRetractRestores) {
  auto kb = load(kPeople);
  PartialStructure s = with(kb.structure, "tall(Bob)");
  EXPECT_FALSE(s == kb.structure);
  auto a = s.lookup(term(s, "tall(Bob)"));
  ASSERT_TRUE(a);
  EXPECT_EQ(a->origin, Origin::kUser);
  EXPECT_EQ(s.user_facts().size(), 1u);
  PartialStructure back = retract_fact(s, term(s, "tall(Bob)"));
  EXPECT_TRUE(back == kb.structure);
}

TEST(Structure, AssertOverEnumerationFails) {
  auto kb = load(kPeople);
  EXPECT_EQ(error_kind([&] { with(kb.structure, "weight(Bob) = 70"); }),
            ErrorKind::kOverwriteEnumeration);
}

TEST(Structure, RetractRequiresUserFact) {
  auto kb = load(kPeople);
  PartialStructure s = with(kb.structure, "age() = 3");
  PartialStructure back = retract_fact(s, term(s, "age()"));
  EXPECT_EQ(error_kind([&] { retract_fact(back, term(back, "age()")); }), ErrorKind::kNotUserFact);
  EXPECT_EQ(error_kind([&] { retract_fact(s, term(s, "weight(Bob)")); }), ErrorKind::kNotUserFact);
}

TEST(Structure, MissingExtension) {
  EXPECT_EQ(error_kind([] {
              load("vocabulary V { type P\n q: P -> Bool }\ntheory T:V { }\n");
            }),
            ErrorKind::kMissingExtension);
}

TEST(Structure, ValueOutsideType) {
  EXPECT_EQ(error_kind([] {
              load("vocabulary V { type A := {0..5}\n a: () -> A }\ntheory T:V { }\n"
                   "structure S:V { a := 9 }\n");
            }),
            ErrorKind::kValueOutsideType);
  auto kb = load("vocabulary V { type A := {0..5}\n a: () -> A }\ntheory T:V { }\n");
  // A user edit out of range is a type mismatch rather than a bad structure.
  EXPECT_EQ(error_kind([&] { with(kb.structure, "a() = 6"); }), ErrorKind::kTypeMismatch);
}

}  // namespace
}  // namespace fodot
