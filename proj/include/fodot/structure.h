// Values, type extensions and (partial) structures.
//
// A PartialStructure is an immutable value: assert_fact / retract_fact
// return updated copies.
#ifndef FODOT_STRUCTURE_H_
#define FODOT_STRUCTURE_H_

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fodot/ast.h"
#include "fodot/typecheck.h"

namespace fodot {

// A truth value, a number, or a domain element of a custom/concept type.
struct Value {
  enum class Kind { kBool, kNumber, kElement };
  Kind kind = Kind::kBool;
  bool boolean = false;
  Number number;
  TypeId type = kNoType;  // kElement
  int ordinal = -1;       // kElement: position in the type extension

  static Value of_bool(bool b);
  static Value of_number(const Number& n);
  static Value of_element(TypeId type, int ordinal);
};

bool operator==(const Value& a, const Value& b);
bool operator!=(const Value& a, const Value& b);
bool operator<(const Value& a, const Value& b);

// A symbol applied to element/number arguments.
struct GroundTerm {
  int symbol = -1;
  std::vector<Value> args;
};

bool operator==(const GroundTerm& a, const GroundTerm& b);
bool operator<(const GroundTerm& a, const GroundTerm& b);

struct TypeExtension {
  std::vector<Value> elements;     // ordered; ordinal = index
  std::vector<std::string> names;  // display names
};

enum class Origin { kEnumeration, kUser };

struct Assignment {
  Value value;
  Origin origin = Origin::kUser;
};

class PartialStructure {
 public:
  PartialStructure() = default;
  explicit PartialStructure(std::shared_ptr<const TypedKB> tkb);

  const TypedKB& kb() const { return *tkb_; }
  const std::shared_ptr<const TypedKB>& kb_ptr() const { return tkb_; }
  const TypeTable& table() const { return tkb_->table; }

  // nullptr when the type has no finite extension (Int, Real, undeclared).
  const TypeExtension* extension(TypeId type) const;
  bool has_extension(TypeId type) const { return extension(type) != nullptr; }
  std::optional<Value> element_named(TypeId type, const std::string& name) const;
  // Looks an identifier up across all custom and concept types.
  std::optional<Value> element_named(const std::string& name) const;
  bool in_type(const Value& v, TypeId type) const;

  bool is_enumerated(int symbol) const { return enumerated_.count(symbol) > 0; }
  // Value of a term: enumeration (completed under CA) or user fact.
  std::optional<Assignment> lookup(const GroundTerm& term) const;
  const std::map<GroundTerm, Value>& user_facts() const { return user_; }

  // All argument tuples of a symbol, or nullopt when some argument type is
  // not finite.
  std::optional<std::vector<std::vector<Value>>> tuples(int symbol) const;

  std::string value_to_string(const Value& v) const;
  std::string term_to_string(const GroundTerm& t) const;

  // Used by build_structure.
  void set_extension(TypeId type, TypeExtension ext);
  void set_enumerated(const GroundTerm& term, const Value& v);
  void mark_enumerated(int symbol, std::optional<Value> default_value);

  PartialStructure with_fact(const GroundTerm& term, const Value& v) const;
  PartialStructure without_fact(const GroundTerm& term) const;
  // The same structure with the symbol left open.
  PartialStructure without_enumeration(int symbol) const;

  friend bool operator==(const PartialStructure& a, const PartialStructure& b);

 private:
  std::shared_ptr<const TypedKB> tkb_;
  std::map<TypeId, TypeExtension> extensions_;
  std::set<int> enumerated_;
  std::map<int, Value> enumerated_default_;
  std::map<GroundTerm, Value> enumerated_values_;
  std::map<GroundTerm, Value> user_;
};

// Builds the structure described by the vocabulary's type constructors and the
// given structure blocks.
PartialStructure build_structure(std::shared_ptr<const TypedKB> tkb,
                                 const std::vector<const StructureBlock*>& blocks);
PartialStructure build_structure(std::shared_ptr<const TypedKB> tkb, const StructureBlock& block);
// Uses every structure block over the checked vocabulary.
PartialStructure build_structure(std::shared_ptr<const TypedKB> tkb);

PartialStructure assert_fact(const PartialStructure& s, const GroundTerm& term, const Value& value);
PartialStructure retract_fact(const PartialStructure& s, const GroundTerm& term);

// Resolves a ground applied term such as `weight(Bob)` (already type-checked).
GroundTerm resolve_term(const PartialStructure& s, const ExprPtr& typed_term);
// Resolves a constant expression (`true`, `17`, `Bob`, `` `sym ``) against a type.
Value resolve_value(const PartialStructure& s, const ExprPtr& e, TypeId expected);

// Parses "term = value" / "term" (meaning true) / "~term" (false) as used by
// the CLI and the service.
std::pair<GroundTerm, Value> parse_fact(const PartialStructure& s, const std::string& text);

}  // namespace fodot

#endif  // FODOT_STRUCTURE_H_
