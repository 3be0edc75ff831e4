#include "fodot/structure.h"

#include <tuple>

#include "fodot/parser.h"

namespace fodot {

Value Value::of_bool(bool b) {
  Value v;
  v.kind = Kind::kBool;
  v.boolean = b;
  return v;
}

Value Value::of_number(const Number& n) {
  Value v;
  v.kind = Kind::kNumber;
  v.number = n;
  return v;
}

Value Value::of_element(TypeId type, int ordinal) {
  Value v;
  v.kind = Kind::kElement;
  v.type = type;
  v.ordinal = ordinal;
  return v;
}

bool operator==(const Value& a, const Value& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Value::Kind::kBool: return a.boolean == b.boolean;
    case Value::Kind::kNumber: return a.number == b.number;
    case Value::Kind::kElement: return a.type == b.type && a.ordinal == b.ordinal;
  }
  return false;
}

bool operator!=(const Value& a, const Value& b) { return !(a == b); }

bool operator<(const Value& a, const Value& b) {
  if (a.kind != b.kind) return a.kind < b.kind;
  switch (a.kind) {
    case Value::Kind::kBool: return a.boolean < b.boolean;
    case Value::Kind::kNumber: return a.number < b.number;
    case Value::Kind::kElement: return std::tie(a.type, a.ordinal) < std::tie(b.type, b.ordinal);
  }
  return false;
}

bool operator==(const GroundTerm& a, const GroundTerm& b) {
  return a.symbol == b.symbol && a.args == b.args;
}

bool operator<(const GroundTerm& a, const GroundTerm& b) {
  if (a.symbol != b.symbol) return a.symbol < b.symbol;
  return a.args < b.args;
}

PartialStructure::PartialStructure(std::shared_ptr<const TypedKB> tkb) : tkb_(std::move(tkb)) {}

const TypeExtension* PartialStructure::extension(TypeId type) const {
  if (type == kBoolType) {
    static const TypeExtension kBools{{Value::of_bool(false), Value::of_bool(true)}, {"false", "true"}};
    return &kBools;
  }
  auto it = extensions_.find(type);
  return it == extensions_.end() ? nullptr : &it->second;
}

std::optional<Value> PartialStructure::element_named(TypeId type, const std::string& name) const {
  const TypeExtension* ext = extension(type);
  if (!ext) return std::nullopt;
  for (size_t i = 0; i < ext->names.size(); ++i) {
    if (ext->names[i] == name) return ext->elements[i];
  }
  return std::nullopt;
}

std::optional<Value> PartialStructure::element_named(const std::string& name) const {
  if (auto t = table().element_type(name)) return element_named(*t, name);
  return std::nullopt;
}

bool PartialStructure::in_type(const Value& v, TypeId type) const {
  const TypeInfo& info = table().type(type);
  switch (info.kind) {
    case TypeKind::kBool:
      return v.kind == Value::Kind::kBool;
    case TypeKind::kInt:
      return v.kind == Value::Kind::kNumber && is_integer(v.number);
    case TypeKind::kReal:
      return v.kind == Value::Kind::kNumber;
    case TypeKind::kCustom:
    case TypeKind::kConcept: {
      const TypeExtension* ext = extension(type);
      if (!ext) return false;
      if (v.kind == Value::Kind::kElement) {
        return v.type == type && v.ordinal >= 0 && v.ordinal < static_cast<int>(ext->elements.size());
      }
      for (const Value& e : ext->elements) {
        if (e == v) return true;
      }
      return false;
    }
  }
  return false;
}

std::optional<Assignment> PartialStructure::lookup(const GroundTerm& term) const {
  if (enumerated_.count(term.symbol)) {
    auto it = enumerated_values_.find(term);
    if (it != enumerated_values_.end()) return Assignment{it->second, Origin::kEnumeration};
    auto d = enumerated_default_.find(term.symbol);
    if (d != enumerated_default_.end()) return Assignment{d->second, Origin::kEnumeration};
    return std::nullopt;
  }
  auto it = user_.find(term);
  if (it != user_.end()) return Assignment{it->second, Origin::kUser};
  return std::nullopt;
}

std::optional<std::vector<std::vector<Value>>> PartialStructure::tuples(int symbol) const {
  const SymbolInfo& info = table().symbol(symbol);
  std::vector<std::vector<Value>> out{{}};
  for (TypeId arg : info.args) {
    const TypeExtension* ext = extension(arg);
    if (!ext) return std::nullopt;
    std::vector<std::vector<Value>> next;
    next.reserve(out.size() * ext->elements.size());
    for (const auto& prefix : out) {
      for (const Value& v : ext->elements) {
        next.push_back(prefix);
        next.back().push_back(v);
      }
    }
    out = std::move(next);
  }
  return out;
}

std::string PartialStructure::value_to_string(const Value& v) const {
  switch (v.kind) {
    case Value::Kind::kBool:
      return v.boolean ? "true" : "false";
    case Value::Kind::kNumber:
      return number_to_string(v.number);
    case Value::Kind::kElement: {
      const TypeExtension* ext = extension(v.type);
      if (ext && v.ordinal >= 0 && v.ordinal < static_cast<int>(ext->names.size())) {
        return ext->names[v.ordinal];
      }
      return "?";
    }
  }
  return "?";
}

std::string PartialStructure::term_to_string(const GroundTerm& t) const {
  std::string out = table().symbol(t.symbol).name + "(";
  for (size_t i = 0; i < t.args.size(); ++i) {
    if (i > 0) out += ", ";
    out += value_to_string(t.args[i]);
  }
  return out + ")";
}

void PartialStructure::set_extension(TypeId type, TypeExtension ext) {
  extensions_[type] = std::move(ext);
}

void PartialStructure::set_enumerated(const GroundTerm& term, const Value& v) {
  enumerated_values_[term] = v;
}

void PartialStructure::mark_enumerated(int symbol, std::optional<Value> default_value) {
  enumerated_.insert(symbol);
  if (default_value) enumerated_default_[symbol] = *default_value;
}

PartialStructure PartialStructure::with_fact(const GroundTerm& term, const Value& v) const {
  PartialStructure out = *this;
  out.user_[term] = v;
  return out;
}

PartialStructure PartialStructure::without_fact(const GroundTerm& term) const {
  PartialStructure out = *this;
  out.user_.erase(term);
  return out;
}

PartialStructure PartialStructure::without_enumeration(int symbol) const {
  PartialStructure out = *this;
  out.enumerated_.erase(symbol);
  out.enumerated_default_.erase(symbol);
  for (auto it = out.enumerated_values_.begin(); it != out.enumerated_values_.end();) {
    it = it->first.symbol == symbol ? out.enumerated_values_.erase(it) : std::next(it);
  }
  return out;
}

bool operator==(const PartialStructure& a, const PartialStructure& b) {
  if (a.tkb_ != b.tkb_ || a.enumerated_ != b.enumerated_ || a.enumerated_default_ != b.enumerated_default_ ||
      a.enumerated_values_ != b.enumerated_values_ || a.user_ != b.user_) {
    return false;
  }
  if (a.extensions_.size() != b.extensions_.size()) return false;
  for (const auto& [type, ext] : a.extensions_) {
    auto it = b.extensions_.find(type);
    if (it == b.extensions_.end() || it->second.elements != ext.elements || it->second.names != ext.names) {
      return false;
    }
  }
  return true;
}

namespace {

Value constant_value(const PartialStructure& s, const Constant& c, TypeId expected) {
  switch (c.kind) {
    case Constant::Kind::kBool:
      return Value::of_bool(c.boolean);
    case Constant::Kind::kNumber:
      return Value::of_number(c.number);
    case Constant::Kind::kIdentifier:
      if (auto v = s.element_named(expected, c.identifier)) return *v;
      throw Error(ErrorKind::kValueOutsideType,
                  "'" + c.identifier + "' is not an element of " + s.table().type(expected).name);
  }
  return {};
}

void require_in_type(const PartialStructure& s, const Value& v, TypeId type, ErrorKind kind) {
  if (!s.in_type(v, type)) {
    throw Error(kind, "value " + s.value_to_string(v) + " is not in type " + s.table().type(type).name);
  }
}

}  // namespace

PartialStructure build_structure(std::shared_ptr<const TypedKB> tkb,
                                 const std::vector<const StructureBlock*>& blocks) {
  PartialStructure s(tkb);
  const TypeTable& table = tkb->table;
  const Vocabulary* vocab = tkb->kb.find_vocabulary(tkb->vocabulary);

  for (const StructureBlock* b : blocks) {
    if (b->vocabulary != tkb->vocabulary) {
      throw Error(ErrorKind::kInvalidArgument,
                  "structure '" + b->name + "' is over vocabulary '" + b->vocabulary + "'");
    }
  }

  // Type extensions (UNA + DCA).
  for (TypeId t = 0; t < static_cast<TypeId>(table.type_count()); ++t) {
    const TypeInfo& info = table.type(t);
    if (info.kind == TypeKind::kConcept) {
      if (!info.parameterized) continue;
      TypeExtension ext;
      for (const std::string& member : table.concept_members(t)) {
        ext.elements.push_back(Value::of_element(t, static_cast<int>(ext.elements.size())));
        ext.names.push_back(member);
      }
      s.set_extension(t, std::move(ext));
      continue;
    }
    if (info.kind != TypeKind::kCustom) continue;
    const Enumeration* source = nullptr;
    if (vocab) {
      if (const TypeDecl* td = vocab->find_type(info.name); td && td->constructors) source = &*td->constructors;
    }
    for (const StructureBlock* b : blocks) {
      for (const Enumeration& e : b->enumerations) {
        if (e.target != info.name) continue;
        if (source) {
          throw Error(ErrorKind::kInvalidArgument, "type '" + info.name + "' is enumerated twice");
        }
        source = &e;
      }
    }
    if (!source) continue;
    TypeExtension ext;
    auto add = [&](Value v, std::string name) {
      for (const std::string& n : ext.names) {
        if (n == name) return;  // listed twice: same element
      }
      ext.elements.push_back(std::move(v));
      ext.names.push_back(std::move(name));
    };
    if (source->range) {
      for (BigInt i = source->range->first; i <= source->range->second; ++i) {
        add(Value::of_number(Number(i)), i.str());
      }
    }
    for (const EnumEntry& entry : source->entries) {
      const Constant& c = entry.args.at(0);
      if (c.kind == Constant::Kind::kNumber) {
        if (info.numeric_base == TypeKind::kCustom) {
          throw Error(ErrorKind::kValueOutsideType, "type '" + info.name + "' mixes numbers and identifiers");
        }
        add(Value::of_number(c.number), number_to_string(c.number));
      } else if (c.kind == Constant::Kind::kIdentifier) {
        if (info.numeric_base != TypeKind::kCustom) {
          throw Error(ErrorKind::kValueOutsideType, "type '" + info.name + "' mixes numbers and identifiers");
        }
        add(Value::of_element(t, static_cast<int>(ext.elements.size())), c.identifier);
      } else {
        throw Error(ErrorKind::kValueOutsideType, "type '" + info.name + "' cannot contain truth values");
      }
    }
    s.set_extension(t, std::move(ext));
  }

  for (size_t i = 0; i < table.symbol_count(); ++i) {
    const SymbolInfo& info = table.symbol(static_cast<int>(i));
    auto check_type = [&](TypeId t) {
      const TypeInfo& ti = table.type(t);
      if (ti.kind == TypeKind::kCustom && !s.has_extension(t)) {
        throw Error(ErrorKind::kMissingExtension,
                    "type '" + ti.name + "' used by '" + info.name + "' has no extension");
      }
      if (ti.kind == TypeKind::kConcept && !ti.parameterized) {
        throw Error(ErrorKind::kMissingExtension,
                    "unparameterized Concept used by '" + info.name + "' has no finite extension");
      }
    };
    for (TypeId a : info.args) check_type(a);
    check_type(info.result);
  }

  // Symbol enumerations, completed under CA.
  std::set<int> seen;
  for (const StructureBlock* b : blocks) {
    for (const Enumeration& e : b->enumerations) {
      auto sym = table.find_symbol(e.target);
      if (!sym) continue;  // a type extension
      if (!seen.insert(*sym).second) {
        throw Error(ErrorKind::kInvalidArgument, "symbol '" + e.target + "' is enumerated twice");
      }
      const SymbolInfo& info = table.symbol(*sym);
      const bool predicate = info.result == kBoolType && e.kind == Enumeration::Kind::kTuples;
      for (const EnumEntry& entry : e.entries) {
        GroundTerm term{*sym, {}};
        for (size_t i = 0; i < entry.args.size(); ++i) {
          Value v = constant_value(s, entry.args[i], info.args[i]);
          require_in_type(s, v, info.args[i], ErrorKind::kValueOutsideType);
          term.args.push_back(v);
        }
        Value value = predicate ? Value::of_bool(true) : constant_value(s, *entry.result, info.result);
        require_in_type(s, value, info.result, ErrorKind::kValueOutsideType);
        s.set_enumerated(term, value);
      }
      if (predicate) {
        s.mark_enumerated(*sym, Value::of_bool(false));
        continue;
      }
      s.mark_enumerated(*sym, std::nullopt);
      if (auto all = s.tuples(*sym)) {
        for (const auto& args : *all) {
          if (!s.lookup(GroundTerm{*sym, args})) {
            throw Error(ErrorKind::kMissingExtension,
                        "enumeration of '" + info.name + "' has no value for " +
                            s.term_to_string(GroundTerm{*sym, args}));
          }
        }
      }
    }
  }
  return s;
}

PartialStructure build_structure(std::shared_ptr<const TypedKB> tkb, const StructureBlock& block) {
  return build_structure(std::move(tkb), std::vector<const StructureBlock*>{&block});
}

PartialStructure build_structure(std::shared_ptr<const TypedKB> tkb) {
  std::vector<const StructureBlock*> blocks;
  for (const StructureBlock& b : tkb->kb.structures) {
    if (b.vocabulary == tkb->vocabulary) blocks.push_back(&b);
  }
  return build_structure(std::move(tkb), blocks);
}

PartialStructure assert_fact(const PartialStructure& s, const GroundTerm& term, const Value& value) {
  const SymbolInfo& info = s.table().symbol(term.symbol);
  if (s.is_enumerated(term.symbol)) {
    throw Error(ErrorKind::kOverwriteEnumeration,
                "'" + info.name + "' is enumerated; " + s.term_to_string(term) + " cannot be changed");
  }
  if (term.args.size() != info.args.size()) {
    throw Error(ErrorKind::kTypeMismatch, "wrong number of arguments for '" + info.name + "'");
  }
  for (size_t i = 0; i < term.args.size(); ++i) {
    require_in_type(s, term.args[i], info.args[i], ErrorKind::kTypeMismatch);
  }
  const TypeInfo& result = s.table().type(info.result);
  bool ok = s.in_type(value, info.result) ||
            (result.kind == TypeKind::kCustom && !s.has_extension(info.result));
  if (!ok) {
    throw Error(ErrorKind::kTypeMismatch, "value " + s.value_to_string(value) + " is not in type " + result.name);
  }
  return s.with_fact(term, value);
}

PartialStructure retract_fact(const PartialStructure& s, const GroundTerm& term) {
  if (!s.user_facts().count(term)) {
    throw Error(ErrorKind::kNotUserFact, s.term_to_string(term) + " is not a user fact");
  }
  return s.without_fact(term);
}

Value resolve_value(const PartialStructure& s, const ExprPtr& e, TypeId expected) {
  Value v;
  switch (e->kind) {
    case ExprKind::kBool:
      v = Value::of_bool(e->boolean);
      break;
    case ExprKind::kNumber:
      v = Value::of_number(e->number);
      break;
    case ExprKind::kNeg:
      if (e->args[0]->kind != ExprKind::kNumber) {
        throw Error(ErrorKind::kTypeMismatch, "'" + print_expr(e) + "' is not a constant");
      }
      v = Value::of_number(-e->args[0]->number);
      break;
    case ExprKind::kName:
    case ExprKind::kConceptLit: {
      auto found = s.element_named(expected, e->name);
      if (!found) {
        throw Error(ErrorKind::kTypeMismatch,
                    "'" + e->name + "' is not an element of " + s.table().type(expected).name);
      }
      v = *found;
      break;
    }
    default:
      throw Error(ErrorKind::kTypeMismatch, "'" + print_expr(e) + "' is not a constant");
  }
  require_in_type(s, v, expected, ErrorKind::kTypeMismatch);
  return v;
}

GroundTerm resolve_term(const PartialStructure& s, const ExprPtr& e) {
  if (e->kind != ExprKind::kApply) {
    throw Error(ErrorKind::kTypeMismatch, "'" + print_expr(e) + "' is not an applied symbol");
  }
  auto sym = s.table().find_symbol(e->name);
  if (!sym) throw Error(ErrorKind::kUnknownSymbol, "unknown symbol '" + e->name + "'");
  const SymbolInfo& info = s.table().symbol(*sym);
  if (info.args.size() != e->args.size()) {
    throw Error(ErrorKind::kTypeMismatch, "wrong number of arguments for '" + info.name + "'");
  }
  GroundTerm term{*sym, {}};
  for (size_t i = 0; i < e->args.size(); ++i) {
    term.args.push_back(resolve_value(s, e->args[i], info.args[i]));
  }
  return term;
}

std::pair<GroundTerm, Value> parse_fact(const PartialStructure& s, const std::string& text) {
  ExprPtr e = parse_expr(text);
  bool negated = false;
  if (e->kind == ExprKind::kNot) {
    negated = true;
    e = e->args[0];
  }
  if (e->kind == ExprKind::kCompare && e->ops.size() == 1 && e->ops[0] == CmpOp::kEq && !negated) {
    GroundTerm term = resolve_term(s, e->args[0]);
    TypeId result = s.table().symbol(term.symbol).result;
    return {term, resolve_value(s, e->args[1], result)};
  }
  GroundTerm term = resolve_term(s, e);
  if (s.table().symbol(term.symbol).result != kBoolType) {
    throw Error(ErrorKind::kTypeMismatch, "'" + text + "' needs a value: use term=value");
  }
  return {term, Value::of_bool(!negated)};
}

}  // namespace fodot
