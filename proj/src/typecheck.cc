#include "fodot/typecheck.h"

#include <set>

#include "fodot/parser.h"

namespace fodot {

TypeTable::TypeTable() {
  add_type({"Bool", TypeKind::kBool, TypeKind::kCustom});
  add_type({"Int", TypeKind::kInt, TypeKind::kInt});
  add_type({"Real", TypeKind::kReal, TypeKind::kReal});
  add_type({"Concept", TypeKind::kConcept, TypeKind::kCustom});
}

std::optional<TypeId> TypeTable::find_type(const std::string& name) const {
  auto it = type_index_.find(name);
  if (it == type_index_.end()) return std::nullopt;
  return it->second;
}

TypeId TypeTable::add_type(TypeInfo info) {
  TypeId id = static_cast<TypeId>(types_.size());
  type_index_[info.name] = id;
  types_.push_back(std::move(info));
  return id;
}

TypeId TypeTable::concept_type(const std::vector<TypeId>& args, TypeId result) {
  std::string name = "Concept[";
  if (args.empty()) name += "()";
  for (size_t i = 0; i < args.size(); ++i) {
    if (i > 0) name += " * ";
    name += types_[args[i]].name;
  }
  name += " -> " + types_[result].name + "]";
  if (auto found = find_type(name)) return *found;
  TypeInfo info;
  info.name = name;
  info.kind = TypeKind::kConcept;
  info.parameterized = true;
  info.concept_args = args;
  info.concept_result = result;
  return add_type(std::move(info));
}

std::optional<int> TypeTable::find_symbol(const std::string& name) const {
  auto it = symbol_index_.find(name);
  if (it == symbol_index_.end()) return std::nullopt;
  return it->second;
}

int TypeTable::add_symbol(SymbolInfo info) {
  int id = static_cast<int>(symbols_.size());
  symbol_index_[info.name] = id;
  symbols_.push_back(std::move(info));
  return id;
}

std::optional<TypeId> TypeTable::element_type(const std::string& name) const {
  auto it = elements_.find(name);
  if (it == elements_.end()) return std::nullopt;
  return it->second;
}

bool TypeTable::is_numeric(TypeId t) const {
  if (t < 0) return false;
  const TypeInfo& info = types_[t];
  return info.kind == TypeKind::kInt || info.kind == TypeKind::kReal ||
         (info.kind == TypeKind::kCustom && info.numeric_base != TypeKind::kCustom);
}

TypeKind TypeTable::numeric_kind(TypeId t) const {
  const TypeInfo& info = types_[t];
  if (info.kind == TypeKind::kCustom) return info.numeric_base;
  return info.kind;
}

bool TypeTable::accepts(TypeId expected, TypeId found) const {
  if (expected == found) return true;
  if (is_numeric(expected) && is_numeric(found)) {
    return !(numeric_kind(expected) == TypeKind::kInt && numeric_kind(found) == TypeKind::kReal);
  }
  return false;
}

std::vector<std::string> TypeTable::concept_members(TypeId concept_id) const {
  std::vector<std::string> out;
  const TypeInfo& info = types_[concept_id];
  if (!info.parameterized) return out;
  for (const SymbolInfo& s : symbols_) {
    if (s.args == info.concept_args && s.result == info.concept_result) out.push_back(s.name);
  }
  return out;
}

const std::vector<Binder>& TypedKB::head_vars(size_t theory, size_t statement, size_t rule) const {
  static const std::vector<Binder> kEmpty;
  auto it = implicit_head_vars.find({theory, statement, rule});
  return it == implicit_head_vars.end() ? kEmpty : it->second;
}

namespace {

struct Scope {
  std::vector<std::pair<std::string, TypeId>> vars;

  std::optional<TypeId> lookup(const std::string& name) const {
    for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
      if (it->first == name) return it->second;
    }
    return std::nullopt;
  }
};

class Checker {
 public:
  Checker(TypeTable& table, std::vector<Diagnostic>& errors) : table_(table), errors_(errors) {}

  void error(const SourceSpan& span, std::string message) {
    errors_.push_back(Diagnostic{span, std::move(message), {}});
  }

  std::string type_name(TypeId t) const { return t == kNoType ? "?" : table_.type(t).name; }

  std::optional<TypeId> resolve_type(const TypeRef& ref, const SourceSpan& span) {
    if (ref.concept_signature) {
      std::vector<TypeId> args;
      for (const TypeRef& a : ref.concept_signature->args) {
        auto t = resolve_type(a, span);
        if (!t) return std::nullopt;
        args.push_back(*t);
      }
      auto r = resolve_type(ref.concept_signature->result, span);
      if (!r) return std::nullopt;
      return table_.concept_type(args, *r);
    }
    auto t = table_.find_type(ref.name);
    if (!t) error(span, "unknown type '" + ref.name + "'");
    return t;
  }

  bool push_binders(const std::vector<Binder>& binders, Scope& scope, const SourceSpan& span) {
    bool ok = true;
    for (const Binder& b : binders) {
      auto t = resolve_type(b.type, span);
      if (!t) {
        ok = false;
        continue;
      }
      for (const std::string& v : b.vars) scope.vars.emplace_back(v, *t);
    }
    return ok;
  }

  void pop_binders(const std::vector<Binder>& binders, Scope& scope) {
    size_t n = 0;
    for (const Binder& b : binders) n += b.vars.size();
    scope.vars.resize(scope.vars.size() - n);
  }

  // Rebuilds `e` with annotations. Returns a node typed kNoType after an error.
  ExprPtr check(const ExprPtr& e, Scope& scope) {
    auto out = std::make_shared<Expr>(*e);
    out->type = kNoType;
    switch (e->kind) {
      case ExprKind::kBool:
        out->type = kBoolType;
        break;
      case ExprKind::kNumber:
        out->type = e->is_real ? kRealType : kIntType;
        break;
      case ExprKind::kName:
        if (auto v = scope.lookup(e->name)) {
          out->name_kind = NameKind::kVariable;
          out->type = *v;
        } else if (auto t = table_.element_type(e->name)) {
          out->name_kind = NameKind::kElement;
          out->type = *t;
        } else {
          error(e->span, "unknown identifier '" + e->name + "'");
        }
        break;
      case ExprKind::kConceptLit: {
        auto s = table_.find_symbol(e->name);
        if (!s) {
          error(e->span, "unknown symbol '" + e->name + "' in concept literal");
          break;
        }
        const SymbolInfo& info = table_.symbol(*s);
        out->type = table_.concept_type(info.args, info.result);
        break;
      }
      case ExprKind::kApply: {
        auto s = table_.find_symbol(e->name);
        for (ExprPtr& a : out->args) a = check(a, scope);
        if (!s) {
          error(e->span, "unknown symbol '" + e->name + "'");
          break;
        }
        const SymbolInfo& info = table_.symbol(*s);
        if (info.args.size() != e->args.size()) {
          error(e->span, "'" + e->name + "' expects " + std::to_string(info.args.size()) +
                             " argument(s), found " + std::to_string(e->args.size()));
          break;
        }
        bool ok = true;
        for (size_t i = 0; i < info.args.size(); ++i) {
          ok &= expect(out->args[i], info.args[i]);
        }
        if (ok) out->type = info.result;
        break;
      }
      case ExprKind::kNot:
        out->args[0] = check(e->args[0], scope);
        if (expect(out->args[0], kBoolType)) out->type = kBoolType;
        break;
      case ExprKind::kNeg:
        out->args[0] = check(e->args[0], scope);
        if (expect_numeric(out->args[0])) out->type = base_type(out->args[0]->type);
        break;
      case ExprKind::kAnd:
      case ExprKind::kOr:
      case ExprKind::kImplies:
      case ExprKind::kIff: {
        bool ok = true;
        for (ExprPtr& a : out->args) {
          a = check(a, scope);
          ok &= expect(a, kBoolType);
        }
        if (ok) out->type = kBoolType;
        break;
      }
      case ExprKind::kCompare: {
        bool ok = true;
        for (ExprPtr& a : out->args) a = check(a, scope);
        for (size_t i = 0; i < e->ops.size(); ++i) {
          ok &= check_comparison(e->ops[i], out->args[i], out->args[i + 1], e->span);
        }
        if (ok) out->type = kBoolType;
        break;
      }
      case ExprKind::kAdd:
      case ExprKind::kSub:
      case ExprKind::kMul:
      case ExprKind::kDiv: {
        out->args[0] = check(e->args[0], scope);
        out->args[1] = check(e->args[1], scope);
        bool ok = expect_numeric(out->args[0]);
        ok &= expect_numeric(out->args[1]);
        if (!ok) break;
        if (e->kind == ExprKind::kDiv ||
            table_.numeric_kind(out->args[0]->type) == TypeKind::kReal ||
            table_.numeric_kind(out->args[1]->type) == TypeKind::kReal) {
          out->type = kRealType;
        } else {
          out->type = kIntType;
        }
        break;
      }
      case ExprKind::kForall:
      case ExprKind::kExists:
      case ExprKind::kCount:
      case ExprKind::kSum:
      case ExprKind::kMin:
      case ExprKind::kMax: {
        bool ok = push_binders(e->binders, scope, e->span);
        out->args[0] = check(e->args[0], scope);
        pop_binders(e->binders, scope);
        if (!ok) break;
        if (e->kind == ExprKind::kForall || e->kind == ExprKind::kExists) {
          if (expect(out->args[0], kBoolType)) out->type = kBoolType;
        } else if (e->kind == ExprKind::kCount) {
          if (expect(out->args[0], kBoolType)) out->type = kIntType;
        } else if (expect_numeric(out->args[0])) {
          out->type = base_type(out->args[0]->type);
        }
        break;
      }
      case ExprKind::kConceptApply: {
        for (ExprPtr& a : out->args) a = check(a, scope);
        TypeId ct = out->args[0]->type;
        if (ct == kNoType) break;
        const TypeInfo& info = table_.type(ct);
        if (info.kind != TypeKind::kConcept) {
          error(e->args[0]->span, "'$' expects a Concept, found " + info.name);
          break;
        }
        if (!info.parameterized) {
          error(e->args[0]->span, "'$' needs a parameterized Concept[signature], found Concept");
          break;
        }
        if (info.concept_args.size() + 1 != e->args.size()) {
          error(e->span, "concept application expects " + std::to_string(info.concept_args.size()) +
                             " argument(s)");
          break;
        }
        bool ok = true;
        for (size_t i = 0; i < info.concept_args.size(); ++i) {
          ok &= expect(out->args[i + 1], info.concept_args[i]);
        }
        if (ok) out->type = info.concept_result;
        break;
      }
      case ExprKind::kIte: {
        for (ExprPtr& a : out->args) a = check(a, scope);
        bool ok = expect(out->args[0], kBoolType);
        TypeId a = out->args[1]->type;
        TypeId b = out->args[2]->type;
        if (!ok || a == kNoType || b == kNoType) break;
        if (table_.is_numeric(a) && table_.is_numeric(b)) {
          bool real = table_.numeric_kind(a) == TypeKind::kReal || table_.numeric_kind(b) == TypeKind::kReal;
          out->type = real ? kRealType : (a == b ? a : kIntType);
        } else if (a == b) {
          out->type = a;
        } else {
          error(e->span, "if-then-else branches have types " + type_name(a) + " and " + type_name(b));
        }
        break;
      }
    }
    return out;
  }

  TypeId base_type(TypeId t) const {
    return table_.numeric_kind(t) == TypeKind::kReal ? kRealType : kIntType;
  }

  bool expect(const ExprPtr& e, TypeId expected) {
    if (e->type == kNoType) return false;
    if (table_.accepts(expected, e->type)) return true;
    error(e->span, "expected " + type_name(expected) + ", found " + type_name(e->type) + " in '" +
                       print_expr(*e) + "'");
    return false;
  }

  bool expect_numeric(const ExprPtr& e) {
    if (e->type == kNoType) return false;
    if (table_.is_numeric(e->type)) return true;
    error(e->span, "expected a number, found " + type_name(e->type) + " in '" + print_expr(*e) + "'");
    return false;
  }

  bool check_comparison(CmpOp op, const ExprPtr& a, const ExprPtr& b, const SourceSpan& span) {
    if (a->type == kNoType || b->type == kNoType) return false;
    if (op == CmpOp::kEq || op == CmpOp::kNe) {
      if (table_.is_numeric(a->type) && table_.is_numeric(b->type)) return true;
      if (a->type == b->type) return true;
      error(span, "cannot compare " + type_name(a->type) + " with " + type_name(b->type));
      return false;
    }
    bool ok = expect_numeric(a);
    ok &= expect_numeric(b);
    return ok;
  }

 private:
  TypeTable& table_;
  std::vector<Diagnostic>& errors_;
};

// Determines whether a type extension is numeric: kInt, kReal or kCustom.
TypeKind extension_kind(const Enumeration& e) {
  if (e.range) return TypeKind::kInt;
  if (e.entries.empty()) return TypeKind::kCustom;
  bool numeric = true;
  bool real = false;
  for (const EnumEntry& entry : e.entries) {
    for (const Constant& c : entry.args) {
      if (c.kind != Constant::Kind::kNumber) numeric = false;
      if (c.kind == Constant::Kind::kNumber && c.is_real) real = true;
    }
  }
  if (!numeric) return TypeKind::kCustom;
  return real ? TypeKind::kReal : TypeKind::kInt;
}

class KbChecker {
 public:
  KbChecker(const KnowledgeBase& kb, std::vector<Diagnostic>& errors) : kb_(kb), errors_(errors) {}

  void error(const SourceSpan& span, std::string message) {
    errors_.push_back(Diagnostic{span, std::move(message), {}});
  }

  // Builds the tables for one vocabulary, collecting type extensions from the
  // vocabulary itself and from every structure over it.
  TypeTable build_table(const Vocabulary& v) {
    TypeTable table;
    std::set<std::string> seen_types;
    for (const TypeDecl& td : v.types) {
      if (is_builtin_type(td.name)) {
        error(td.span, "built-in type '" + td.name + "' cannot be redeclared");
        continue;
      }
      if (!seen_types.insert(td.name).second) {
        error(td.span, "type '" + td.name + "' declared twice");
        continue;
      }
      const Enumeration* ext = td.constructors ? &*td.constructors : nullptr;
      if (!ext) {
        for (const StructureBlock& s : kb_.structures) {
          if (s.vocabulary != v.name) continue;
          for (const Enumeration& e : s.enumerations) {
            if (e.target == td.name) {
              ext = &e;
              break;
            }
          }
          if (ext) break;
        }
      }
      TypeInfo info;
      info.name = td.name;
      info.kind = TypeKind::kCustom;
      info.numeric_base = ext ? extension_kind(*ext) : TypeKind::kCustom;
      TypeId id = table.add_type(std::move(info));
      register_elements(table, id, td.constructors ? &*td.constructors : nullptr);
      for (const StructureBlock& s : kb_.structures) {
        if (s.vocabulary != v.name) continue;
        for (const Enumeration& e : s.enumerations) {
          if (e.target == td.name) register_elements(table, id, &e);
        }
      }
    }
    Checker checker(table, errors_);
    for (const SymbolDecl& sd : v.symbols) {
      if (table.find_symbol(sd.name)) {
        error(sd.span, "symbol '" + sd.name + "' declared twice");
        continue;
      }
      if (table.find_type(sd.name)) {
        error(sd.span, "symbol '" + sd.name + "' clashes with a type name");
        continue;
      }
      SymbolInfo info;
      info.name = sd.name;
      bool ok = true;
      for (const TypeRef& a : sd.signature.args) {
        auto t = checker.resolve_type(a, sd.span);
        ok &= t.has_value();
        if (t) info.args.push_back(*t);
      }
      auto r = checker.resolve_type(sd.signature.result, sd.span);
      if (!ok || !r) continue;
      info.result = *r;
      table.add_symbol(std::move(info));
    }
    for (size_t i = 0; i < table.symbol_count(); ++i) {
      table.concept_type(table.symbol(static_cast<int>(i)).args, table.symbol(static_cast<int>(i)).result);
    }
    return table;
  }

  void register_elements(TypeTable& table, TypeId type, const Enumeration* e) {
    if (!e) return;
    for (const EnumEntry& entry : e->entries) {
      if (entry.args.size() != 1 || entry.result) {
        error(e->span, "type extension of '" + table.type(type).name + "' must list single elements");
        continue;
      }
      const Constant& c = entry.args[0];
      if (c.kind != Constant::Kind::kIdentifier) continue;
      auto existing = table.element_type(c.identifier);
      if (existing && *existing != type) {
        error(e->span, "element '" + c.identifier + "' belongs to both " + table.type(*existing).name +
                           " and " + table.type(type).name);
        continue;
      }
      table.add_element(c.identifier, type);
    }
  }

  void check_theory(TypeTable& table, Theory& th, size_t theory_index, TypedKB* out) {
    Checker checker(table, errors_);
    for (size_t si = 0; si < th.statements.size(); ++si) {
      Statement& st = th.statements[si];
      if (auto* axiom = std::get_if<Axiom>(&st)) {
        Scope scope;
        axiom->formula = checker.check(axiom->formula, scope);
        checker.expect(axiom->formula, kBoolType);
        continue;
      }
      auto& def = std::get<Definition>(st);
      for (size_t ri = 0; ri < def.rules.size(); ++ri) {
        Rule& rule = def.rules[ri];
        Scope scope;
        if (!checker.push_binders(rule.binders, scope, rule.span)) continue;
        auto sym = table.find_symbol(rule.head->name);
        if (!sym) {
          error(rule.head->span, "rule head uses undeclared symbol '" + rule.head->name + "'");
          continue;
        }
        const SymbolInfo& info = table.symbol(*sym);
        if (info.args.size() != rule.head->args.size()) {
          error(rule.head->span, "'" + info.name + "' expects " + std::to_string(info.args.size()) +
                                     " argument(s)");
          continue;
        }
        // Head arguments that are neither bound variables nor elements become
        // implicitly quantified variables of the argument type.
        std::vector<Binder> implicit;
        for (size_t i = 0; i < rule.head->args.size(); ++i) {
          const ExprPtr& a = rule.head->args[i];
          if (a->kind == ExprKind::kName && !scope.lookup(a->name) && !table.element_type(a->name)) {
            bool seen = false;
            for (const Binder& b : implicit) seen |= b.vars[0] == a->name;
            if (seen) continue;
            implicit.push_back(Binder{{a->name}, TypeRef{table.type(info.args[i]).name, nullptr}});
            scope.vars.emplace_back(a->name, info.args[i]);
          }
        }
        rule.head = checker.check(rule.head, scope);
        if (rule.value) {
          if (info.result == kBoolType) {
            error(rule.span, "predicate rule for '" + info.name + "' cannot have a '= value' head");
          } else {
            rule.value = checker.check(rule.value, scope);
            checker.expect(rule.value, info.result);
          }
        } else if (info.result != kBoolType) {
          error(rule.span, "rule for function '" + info.name + "' needs a '= value' head");
        }
        if (rule.body) {
          rule.body = checker.check(rule.body, scope);
          checker.expect(rule.body, kBoolType);
        }
        if (out && !implicit.empty()) {
          out->implicit_head_vars[{theory_index, si, ri}] = std::move(implicit);
        }
      }
    }
  }

  void check_structure(const TypeTable& table, const StructureBlock& s) {
    for (const Enumeration& e : s.enumerations) {
      if (auto t = table.find_type(e.target)) {
        if (*t < 4) error(e.span, "cannot enumerate built-in type '" + e.target + "'");
        if (e.kind != Enumeration::Kind::kTuples) {
          error(e.span, "type '" + e.target + "' must be enumerated as a set of elements");
        }
        continue;
      }
      auto sym = table.find_symbol(e.target);
      if (!sym) {
        error(e.span, "enumeration of unknown symbol '" + e.target + "'");
        continue;
      }
      const SymbolInfo& info = table.symbol(*sym);
      bool predicate = info.result == kBoolType;
      if (e.range) {
        error(e.span, "ranges only enumerate types");
        continue;
      }
      std::set<std::string> seen_args;
      for (const EnumEntry& entry : e.entries) {
        bool nullary_value = entry.args.empty() && entry.result;
        if (!nullary_value && entry.args.size() != info.args.size()) {
          error(e.span, "entry arity does not match '" + info.name + "'");
          continue;
        }
        for (size_t i = 0; i < entry.args.size(); ++i) {
          check_constant(table, entry.args[i], info.args[i], e.span);
        }
        if (predicate && e.kind == Enumeration::Kind::kTuples) continue;
        if (!entry.result) {
          error(e.span, "function '" + info.name + "' needs 'args -> value' entries");
          continue;
        }
        check_constant(table, *entry.result, info.result, e.span);
        std::string key;
        for (const Constant& c : entry.args) key += c.to_string() + ",";
        if (!seen_args.insert(key).second) {
          error(e.span, "'" + info.name + "' maps (" + key + ") twice");
        }
      }
    }
  }

  void check_constant(const TypeTable& table, const Constant& c, TypeId expected, const SourceSpan& span) {
    switch (c.kind) {
      case Constant::Kind::kBool:
        if (expected != kBoolType) error(span, "expected " + table.type(expected).name + ", found Bool");
        return;
      case Constant::Kind::kNumber:
        if (!table.accepts(expected, c.is_real ? kRealType : kIntType)) {
          error(span, "expected " + table.type(expected).name + ", found number " + c.to_string());
        }
        return;
      case Constant::Kind::kIdentifier: {
        auto t = table.element_type(c.identifier);
        if (!t) {
          if (table.find_symbol(c.identifier) && table.type(expected).kind == TypeKind::kConcept) return;
          error(span, "unknown element '" + c.identifier + "'");
        } else if (*t != expected) {
          error(span, "expected " + table.type(expected).name + ", found " + table.type(*t).name);
        }
        return;
      }
    }
  }

 private:
  const KnowledgeBase& kb_;
  std::vector<Diagnostic>& errors_;
};

}  // namespace

TypedKB check(const KnowledgeBase& kb, const std::string& vocabulary) {
  std::vector<Diagnostic> errors;
  KbChecker kc(kb, errors);
  TypedKB out;
  out.kb = kb;

  auto unique_names = [&](auto const& blocks, const char* kind) {
    std::set<std::string> names;
    for (const auto& b : blocks) {
      if (!names.insert(b.name).second) {
        errors.push_back(Diagnostic{b.span, std::string(kind) + " '" + b.name + "' defined twice", {}});
      }
    }
  };
  unique_names(kb.vocabularies, "vocabulary");
  unique_names(kb.theories, "theory");
  unique_names(kb.structures, "structure");

  if (kb.vocabularies.empty() && (!kb.theories.empty() || !kb.structures.empty())) {
    errors.push_back(Diagnostic{{}, "knowledge base has no vocabulary", {}});
  }
  out.vocabulary = vocabulary.empty() && !kb.vocabularies.empty() ? kb.vocabularies[0].name : vocabulary;
  if (!vocabulary.empty() && !kb.find_vocabulary(vocabulary)) {
    errors.push_back(Diagnostic{{}, "unknown vocabulary '" + vocabulary + "'", {}});
  }

  for (const Vocabulary& v : kb.vocabularies) {
    TypeTable table = kc.build_table(v);
    for (size_t ti = 0; ti < out.kb.theories.size(); ++ti) {
      Theory& th = out.kb.theories[ti];
      if (th.vocabulary != v.name) continue;
      kc.check_theory(table, th, ti, v.name == out.vocabulary ? &out : nullptr);
    }
    for (const StructureBlock& s : kb.structures) {
      if (s.vocabulary == v.name) kc.check_structure(table, s);
    }
    if (v.name == out.vocabulary) out.table = std::move(table);
  }
  for (const Theory& th : kb.theories) {
    if (!kb.find_vocabulary(th.vocabulary)) {
      errors.push_back(Diagnostic{th.span, "theory '" + th.name + "' references unknown vocabulary '" +
                                               th.vocabulary + "'", {}});
    }
  }
  for (const StructureBlock& s : kb.structures) {
    if (!kb.find_vocabulary(s.vocabulary)) {
      errors.push_back(Diagnostic{s.span, "structure '" + s.name + "' references unknown vocabulary '" +
                                              s.vocabulary + "'", {}});
    }
  }
  if (!errors.empty()) throw Error(ErrorKind::kType, std::move(errors));
  return out;
}

ExprPtr check_expr(const TypedKB& tkb, const ExprPtr& e) {
  std::vector<Diagnostic> errors;
  TypeTable table = tkb.table;  // concept types may be added
  Checker checker(table, errors);
  Scope scope;
  ExprPtr out = checker.check(e, scope);
  if (!errors.empty()) throw Error(ErrorKind::kType, std::move(errors));
  return out;
}

}  // namespace fodot
