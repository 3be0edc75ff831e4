#include "fodot/ast.h"

namespace fodot {

bool operator==(const TypeRef& a, const TypeRef& b) {
  if (a.name != b.name) return false;
  if (!a.concept_signature || !b.concept_signature) {
    return !a.concept_signature && !b.concept_signature;
  }
  return *a.concept_signature == *b.concept_signature;
}

bool operator==(const Signature& a, const Signature& b) {
  return a.args == b.args && a.result == b.result;
}

const char* cmp_op_text(CmpOp op) {
  switch (op) {
    case CmpOp::kEq: return "=";
    case CmpOp::kNe: return "~=";
    case CmpOp::kLt: return "<";
    case CmpOp::kLe: return "=<";
    case CmpOp::kGt: return ">";
    case CmpOp::kGe: return ">=";
  }
  return "?";
}

namespace {

bool same_binders(const std::vector<Binder>& a, const std::vector<Binder>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].vars != b[i].vars || !(a[i].type == b[i].type)) return false;
  }
  return true;
}

}  // namespace

bool same_tree(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprKind::kBool:
      return a.boolean == b.boolean;
    case ExprKind::kNumber:
      return a.number == b.number && a.is_real == b.is_real;
    case ExprKind::kName:
    case ExprKind::kConceptLit:
      return a.name == b.name;
    default:
      break;
  }
  if (a.name != b.name || a.ops != b.ops || !same_binders(a.binders, b.binders)) return false;
  if (a.args.size() != b.args.size()) return false;
  for (size_t i = 0; i < a.args.size(); ++i) {
    if (!same_tree(a.args[i], b.args[i])) return false;
  }
  return true;
}

bool same_tree(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return same_tree(*a, *b);
}

ExprPtr make_bool(bool value, SourceSpan span) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::kBool;
  e->boolean = value;
  e->span = span;
  return e;
}

ExprPtr make_number(const Number& value, bool is_real, SourceSpan span) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::kNumber;
  e->number = value;
  e->is_real = is_real;
  e->span = span;
  return e;
}

ExprPtr make_name(std::string name, SourceSpan span) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::kName;
  e->name = std::move(name);
  e->span = span;
  return e;
}

ExprPtr make_concept_lit(std::string name, SourceSpan span) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::kConceptLit;
  e->name = std::move(name);
  e->span = span;
  return e;
}

ExprPtr make_apply(std::string symbol, std::vector<ExprPtr> args, SourceSpan span) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::kApply;
  e->name = std::move(symbol);
  e->args = std::move(args);
  e->span = span;
  return e;
}

ExprPtr make_unary(ExprKind kind, ExprPtr arg, SourceSpan span) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->args.push_back(std::move(arg));
  e->span = span;
  return e;
}

ExprPtr make_nary(ExprKind kind, std::vector<ExprPtr> args, SourceSpan span) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->args = std::move(args);
  e->span = span;
  return e;
}

ExprPtr make_compare(std::vector<ExprPtr> operands, std::vector<CmpOp> ops, SourceSpan span) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::kCompare;
  e->args = std::move(operands);
  e->ops = std::move(ops);
  e->span = span;
  return e;
}

ExprPtr make_binding(ExprKind kind, std::vector<Binder> binders, ExprPtr body, SourceSpan span) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->binders = std::move(binders);
  e->args.push_back(std::move(body));
  e->span = span;
  return e;
}

std::string Constant::to_string() const {
  switch (kind) {
    case Kind::kIdentifier: return identifier;
    case Kind::kNumber: return number_to_string(number, is_real);
    case Kind::kBool: return boolean ? "true" : "false";
  }
  return {};
}

bool operator==(const Constant& a, const Constant& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Constant::Kind::kIdentifier: return a.identifier == b.identifier;
    case Constant::Kind::kNumber: return a.number == b.number && a.is_real == b.is_real;
    case Constant::Kind::kBool: return a.boolean == b.boolean;
  }
  return false;
}

bool operator==(const EnumEntry& a, const EnumEntry& b) {
  return a.args == b.args && a.result == b.result;
}

bool operator==(const Enumeration& a, const Enumeration& b) {
  return a.target == b.target && a.kind == b.kind && a.entries == b.entries && a.range == b.range;
}

const SymbolDecl* Vocabulary::find_symbol(const std::string& symbol) const {
  for (const SymbolDecl& d : symbols) {
    if (d.name == symbol) return &d;
  }
  return nullptr;
}

const TypeDecl* Vocabulary::find_type(const std::string& type) const {
  for (const TypeDecl& d : types) {
    if (d.name == type) return &d;
  }
  return nullptr;
}

const Vocabulary* KnowledgeBase::find_vocabulary(const std::string& vocab) const {
  for (const Vocabulary& v : vocabularies) {
    if (v.name == vocab) return &v;
  }
  return nullptr;
}

namespace {

bool same_rule(const Rule& a, const Rule& b) {
  return same_binders(a.binders, b.binders) && same_tree(a.head, b.head) &&
         same_tree(a.value, b.value) && same_tree(a.body, b.body);
}

bool same_statement(const Statement& a, const Statement& b) {
  if (a.index() != b.index()) return false;
  if (const auto* axiom = std::get_if<Axiom>(&a)) {
    return same_tree(axiom->formula, std::get<Axiom>(b).formula);
  }
  const auto& da = std::get<Definition>(a);
  const auto& db = std::get<Definition>(b);
  if (da.rules.size() != db.rules.size()) return false;
  for (size_t i = 0; i < da.rules.size(); ++i) {
    if (!same_rule(da.rules[i], db.rules[i])) return false;
  }
  return true;
}

bool same_vocabulary(const Vocabulary& a, const Vocabulary& b) {
  if (a.name != b.name || a.types.size() != b.types.size() || a.symbols.size() != b.symbols.size()) {
    return false;
  }
  for (size_t i = 0; i < a.types.size(); ++i) {
    if (a.types[i].name != b.types[i].name || a.types[i].constructors != b.types[i].constructors) {
      return false;
    }
  }
  for (size_t i = 0; i < a.symbols.size(); ++i) {
    if (a.symbols[i].name != b.symbols[i].name ||
        !(a.symbols[i].signature == b.symbols[i].signature)) {
      return false;
    }
  }
  return true;
}

}  // namespace

bool operator==(const KnowledgeBase& a, const KnowledgeBase& b) {
  if (a.vocabularies.size() != b.vocabularies.size() || a.theories.size() != b.theories.size() ||
      a.structures.size() != b.structures.size()) {
    return false;
  }
  for (size_t i = 0; i < a.vocabularies.size(); ++i) {
    if (!same_vocabulary(a.vocabularies[i], b.vocabularies[i])) return false;
  }
  for (size_t i = 0; i < a.theories.size(); ++i) {
    const Theory& ta = a.theories[i];
    const Theory& tb = b.theories[i];
    if (ta.name != tb.name || ta.vocabulary != tb.vocabulary ||
        ta.statements.size() != tb.statements.size()) {
      return false;
    }
    for (size_t j = 0; j < ta.statements.size(); ++j) {
      if (!same_statement(ta.statements[j], tb.statements[j])) return false;
    }
  }
  for (size_t i = 0; i < a.structures.size(); ++i) {
    const StructureBlock& sa = a.structures[i];
    const StructureBlock& sb = b.structures[i];
    if (sa.name != sb.name || sa.vocabulary != sb.vocabulary || sa.enumerations != sb.enumerations) {
      return false;
    }
  }
  return true;
}

}  // namespace fodot
