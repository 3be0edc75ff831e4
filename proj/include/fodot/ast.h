// Abstract syntax of FO(.) knowledge bases.
//
// Expression nodes are immutable and shared (ExprPtr). The parser produces
// unannotated trees; the type checker rebuilds them with `type` and name
// resolution filled in. Structural equality (same_tree and the operator==
// overloads below) ignores source spans and annotations.
#ifndef FODOT_AST_H_
#define FODOT_AST_H_

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fodot/error.h"
#include "fodot/number.h"

namespace fodot {

struct Signature;

// A type as written in source: a name, or Concept[signature].
struct TypeRef {
  std::string name;
  std::shared_ptr<const Signature> concept_signature;

  bool is_parameterized_concept() const { return concept_signature != nullptr; }
};

struct Signature {
  std::vector<TypeRef> args;
  TypeRef result;
};

bool operator==(const TypeRef& a, const TypeRef& b);
bool operator==(const Signature& a, const Signature& b);

enum class ExprKind {
  kBool,         // true / false
  kNumber,       // numeric literal
  kName,         // bare identifier: variable or domain element
  kConceptLit,   // `sym
  kApply,        // sym(args)
  kNot,
  kNeg,          // unary minus
  kAnd,          // n-ary
  kOr,           // n-ary
  kImplies,
  kIff,
  kCompare,      // chained: args[0] ops[0] args[1] ops[1] args[2] ...
  kAdd,
  kSub,
  kMul,
  kDiv,
  kForall,
  kExists,
  kCount,        // #{binders: body}
  kSum,          // sum(lambda binders: body)
  kMin,
  kMax,
  kConceptApply,  // $(args[0])(args[1..])
  kIte,           // if args[0] then args[1] else args[2]
};

enum class CmpOp { kEq, kNe, kLt, kLe, kGt, kGe };

const char* cmp_op_text(CmpOp op);

struct Binder {
  std::vector<std::string> vars;
  TypeRef type;
};

// How the type checker resolved a kName node.
enum class NameKind { kUnresolved, kVariable, kElement };

using TypeId = int;
inline constexpr TypeId kNoType = -1;

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprKind kind = ExprKind::kBool;
  SourceSpan span;

  bool boolean = false;          // kBool
  Number number;                 // kNumber
  bool is_real = false;          // kNumber: written with a decimal point
  std::string name;              // kName, kConceptLit, kApply
  std::vector<ExprPtr> args;
  std::vector<CmpOp> ops;        // kCompare
  std::vector<Binder> binders;   // quantifiers and aggregates

  // Annotations filled in by the type checker.
  TypeId type = kNoType;
  NameKind name_kind = NameKind::kUnresolved;
};

bool same_tree(const Expr& a, const Expr& b);
bool same_tree(const ExprPtr& a, const ExprPtr& b);

// Node constructors used by the parser, the DMN translator and tests.
ExprPtr make_bool(bool value, SourceSpan span = {});
ExprPtr make_number(const Number& value, bool is_real, SourceSpan span = {});
ExprPtr make_name(std::string name, SourceSpan span = {});
ExprPtr make_concept_lit(std::string name, SourceSpan span = {});
ExprPtr make_apply(std::string symbol, std::vector<ExprPtr> args, SourceSpan span = {});
ExprPtr make_unary(ExprKind kind, ExprPtr arg, SourceSpan span = {});
ExprPtr make_nary(ExprKind kind, std::vector<ExprPtr> args, SourceSpan span = {});
ExprPtr make_compare(std::vector<ExprPtr> operands, std::vector<CmpOp> ops, SourceSpan span = {});
ExprPtr make_binding(ExprKind kind, std::vector<Binder> binders, ExprPtr body, SourceSpan span = {});

struct SymbolDecl {
  std::string name;
  Signature signature;
  SourceSpan span;
};

// A literal constant in an enumeration: identifier, number or truth value.
struct Constant {
  enum class Kind { kIdentifier, kNumber, kBool };
  Kind kind = Kind::kIdentifier;
  std::string identifier;
  Number number;
  bool is_real = false;
  bool boolean = false;

  std::string to_string() const;
};

bool operator==(const Constant& a, const Constant& b);

struct EnumEntry {
  std::vector<Constant> args;
  std::optional<Constant> result;  // function maps only
};

bool operator==(const EnumEntry& a, const EnumEntry& b);

struct Enumeration {
  enum class Kind {
    kTuples,       // `T := {a, b}` (type extension) or `p := {(a,b), ...}`
    kFunctionMap,  // `f := {a -> 1, ...}`, or `c := 3` (single nullary entry)
  };
  std::string target;
  Kind kind = Kind::kTuples;
  std::vector<EnumEntry> entries;
  std::optional<std::pair<BigInt, BigInt>> range;  // `{lo..hi}`
  SourceSpan span;
};

bool operator==(const Enumeration& a, const Enumeration& b);

struct TypeDecl {
  std::string name;
  std::optional<Enumeration> constructors;  // `type T := {...}`
  SourceSpan span;
};

struct Vocabulary {
  std::string name;
  std::vector<TypeDecl> types;
  std::vector<SymbolDecl> symbols;
  SourceSpan span;

  const SymbolDecl* find_symbol(const std::string& name) const;
  const TypeDecl* find_type(const std::string& name) const;
};

struct Rule {
  std::vector<Binder> binders;  // explicit `!x in T:` prefix, may be empty
  ExprPtr head;                 // kApply on the defined symbol
  ExprPtr value;                // `= term` for function heads, else null
  ExprPtr body;                 // null for unconditional rules `p(a).`
  SourceSpan span;
};

struct Definition {
  std::vector<Rule> rules;
  SourceSpan span;
};

struct Axiom {
  ExprPtr formula;
  SourceSpan span;
};

using Statement = std::variant<Axiom, Definition>;

struct Theory {
  std::string name;
  std::string vocabulary;
  std::vector<Statement> statements;
  SourceSpan span;
};

struct StructureBlock {
  std::string name;
  std::string vocabulary;
  std::vector<Enumeration> enumerations;
  SourceSpan span;
};

struct KnowledgeBase {
  std::vector<Vocabulary> vocabularies;
  std::vector<Theory> theories;
  std::vector<StructureBlock> structures;

  const Vocabulary* find_vocabulary(const std::string& name) const;
};

bool operator==(const KnowledgeBase& a, const KnowledgeBase& b);

inline bool is_builtin_type(const std::string& name) {
  return name == "Bool" || name == "Int" || name == "Real" || name == "Concept";
}

}  // namespace fodot

#endif  // FODOT_AST_H_
