// Shared helpers for unit tests.
#ifndef FODOT_TESTS_TEST_UTIL_H_
#define FODOT_TESTS_TEST_UTIL_H_

#include <memory>
#include <string>

#include "fodot/ground.h"
#include "fodot/parser.h"
#include "fodot/structure.h"
#include "fodot/typecheck.h"

namespace fodot::testing {

struct Loaded {
  std::shared_ptr<const TypedKB> tkb;
  PartialStructure structure;
};

inline Loaded load(const std::string& source) {
  auto tkb = std::make_shared<const TypedKB>(check(parse_kb(source)));
  PartialStructure s = build_structure(tkb);
  return {tkb, s};
}

inline PartialStructure with(const PartialStructure& s, const std::string& fact) {
  auto [term, value] = parse_fact(s, fact);
  return assert_fact(s, term, value);
}

}  // namespace fodot::testing

#endif  // FODOT_TESTS_TEST_UTIL_H_
