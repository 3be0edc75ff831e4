// Unique-hit decision tables: a plain-text format, translation to FO(.)
// definitions, and completeness/overlap checks.
//
//   table BMILevel U
//   in: BMI() ; out: BMILevel()
//   < 18.5      | Underweight
//   [18.5..25)  | Normal
//   [25..30)    | Overweight
//   >= 30       | Obese
//
// Input cells are `-` (any value), a comparison (`< 18.5`, `>= 30`, `= a`,
// `~= a`), an interval with open or closed ends (`[18.5..25)`), or a
// comma-separated list of values (`Bob, Alice`).
#ifndef FODOT_DMN_H_
#define FODOT_DMN_H_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fodot/ast.h"
#include "fodot/number.h"
#include "fodot/structure.h"
#include "fodot/typecheck.h"

namespace fodot {

struct Condition {
  enum class Kind { kAny, kCompare, kInterval, kValues };
  Kind kind = Kind::kAny;
  CmpOp op = CmpOp::kEq;            // kCompare
  std::string value;                // kCompare
  std::string lo, hi;               // kInterval
  bool lo_closed = true, hi_closed = true;
  std::vector<std::string> values;  // kValues
  std::string text;                 // the cell as written
};

struct TableInput {
  std::string expr;
  std::vector<Condition> conditions;  // one per row
};

struct TableOutput {
  std::string symbol;
  std::vector<std::string> values;  // one per row
};

struct DecisionTable {
  std::string name;
  std::string hit_policy = "U";
  std::vector<TableInput> inputs;
  std::vector<TableOutput> outputs;
  size_t rows = 0;
};

// Throws MalformedTable, UnknownHitPolicy.
DecisionTable parse_table(std::string_view text);

// FO(.) text of the condition applied to an input expression.
std::string condition_text(const Condition& c, const std::string& input);

// One rule per row and output: `out() = value <- conditions.` (Bool outputs
// give `out() <- conditions.` for true and no rule for false). Throws
// UnknownSymbol when an input or output mentions a symbol missing from the
// vocabulary.
std::string to_definition_text(const DecisionTable& t, const TypedKB& tkb);
Definition to_definition(const DecisionTable& t, const TypedKB& tkb);

// Bounds of a numeric input expression without a finite extension.
struct InputBound {
  std::string input;
  Number lo, hi;
};

struct TableWitness {
  std::map<std::string, std::string> inputs;  // input expression -> value
  std::vector<size_t> rows;                   // 1-based rows involved
};

struct TableCheck {
  bool complete = true;
  std::optional<TableWitness> gap;  // input matched by no row
  bool unique = true;
  std::optional<TableWitness> overlap;  // input matched by two rows
};

// Checks the rows over the input space given by the structure's type
// extensions and the bounds. Throws UnboundedInput.
TableCheck check_table(const DecisionTable& t, std::shared_ptr<const TypedKB> tkb, const PartialStructure& s,
                       const std::vector<InputBound>& bounds);

}  // namespace fodot

#endif  // FODOT_DMN_H_
