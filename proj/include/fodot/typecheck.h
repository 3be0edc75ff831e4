// Type checking and name resolution.
#ifndef FODOT_TYPECHECK_H_
#define FODOT_TYPECHECK_H_

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "fodot/ast.h"

namespace fodot {

enum class TypeKind { kBool, kInt, kReal, kCustom, kConcept };

struct TypeInfo {
  std::string name;  // display name, e.g. "Concept[Person -> Bool]"
  TypeKind kind = TypeKind::kCustom;
  // For custom types: kInt / kReal when the extension is numeric, else kCustom.
  TypeKind numeric_base = TypeKind::kCustom;
  // For Concept[sigma]: the signature sigma.
  bool parameterized = false;
  std::vector<TypeId> concept_args;
  TypeId concept_result = kNoType;
};

struct SymbolInfo {
  std::string name;
  std::vector<TypeId> args;
  TypeId result = kNoType;
};

inline constexpr TypeId kBoolType = 0;
inline constexpr TypeId kIntType = 1;
inline constexpr TypeId kRealType = 2;
inline constexpr TypeId kConceptType = 3;

// Symbol and type tables for one vocabulary.
class TypeTable {
 public:
  TypeTable();

  const TypeInfo& type(TypeId id) const { return types_.at(id); }
  size_t type_count() const { return types_.size(); }
  std::optional<TypeId> find_type(const std::string& name) const;
  TypeId add_type(TypeInfo info);
  // Returns the id of Concept[args -> result], creating it on first use.
  TypeId concept_type(const std::vector<TypeId>& args, TypeId result);

  const SymbolInfo& symbol(int id) const { return symbols_.at(id); }
  size_t symbol_count() const { return symbols_.size(); }
  std::optional<int> find_symbol(const std::string& name) const;
  int add_symbol(SymbolInfo info);

  // Domain elements named by identifiers, with their type.
  std::optional<TypeId> element_type(const std::string& name) const;
  void add_element(const std::string& name, TypeId type) { elements_[name] = type; }

  bool is_numeric(TypeId t) const;
  // kInt or kReal for numeric types.
  TypeKind numeric_kind(TypeId t) const;
  // Whether a value of type `found` may be used where `expected` is required.
  bool accepts(TypeId expected, TypeId found) const;
  // Declared symbols whose signature is exactly that of the concept type.
  std::vector<std::string> concept_members(TypeId concept_id) const;

 private:
  std::vector<TypeInfo> types_;
  std::map<std::string, TypeId> type_index_;
  std::vector<SymbolInfo> symbols_;
  std::map<std::string, int> symbol_index_;
  std::map<std::string, TypeId> elements_;
};

struct TypedKB {
  KnowledgeBase kb;  // trees annotated with types and name resolution
  std::string vocabulary;
  TypeTable table;
  // Variables bound implicitly by rule heads, keyed by (theory, statement, rule).
  std::map<std::tuple<size_t, size_t, size_t>, std::vector<Binder>> implicit_head_vars;

  const std::vector<Binder>& head_vars(size_t theory, size_t statement, size_t rule) const;
};

// Checks every block of the knowledge base. The returned tables describe the
// vocabulary named `vocabulary` (the first one when empty). Throws
// Error(kType) listing every type error found.
TypedKB check(const KnowledgeBase& kb, const std::string& vocabulary = "");

// Type-checks a free-standing expression (e.g. a CLI term) against a checked KB.
ExprPtr check_expr(const TypedKB& tkb, const ExprPtr& e);

}  // namespace fodot

#endif  // FODOT_TYPECHECK_H_
