#include "fodot/ground.h"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "fodot/error.h"
#include "fodot/parser.h"

namespace fodot {

// --- Smart constructors --------------------------------------------------------
//
// Every constructor folds constants and applies the simplification laws, so
// rebuilding a tree with them is the simplifier.

namespace {

GExpr make(GKind kind, TypeId sort, std::vector<GExpr> args) {
  auto n = std::make_shared<GNode>();
  n->kind = kind;
  n->sort = sort;
  n->args = std::move(args);
  return n;
}

bool is_const(const GExpr& e) { return e->kind == GKind::kConst; }

bool is_number(const GExpr& e, const Number& n) {
  return is_const(e) && e->value.kind == Value::Kind::kNumber && e->value.number == n;
}

bool compare_numbers(CmpOp op, const Number& a, const Number& b) {
  switch (op) {
    case CmpOp::kEq: return a == b;
    case CmpOp::kNe: return a != b;
    case CmpOp::kLt: return a < b;
    case CmpOp::kLe: return a <= b;
    case CmpOp::kGt: return a > b;
    case CmpOp::kGe: return a >= b;
  }
  return false;
}

bool same(const GExpr& a, const GExpr& b) {
  if (a == b) return true;
  if (a->kind != b->kind || a->sort != b->sort || a->args.size() != b->args.size()) return false;
  switch (a->kind) {
    case GKind::kConst:
      return a->value == b->value;
    case GKind::kTerm:
    case GKind::kAux:
      return a->index == b->index;
    case GKind::kCmp:
      if (a->op != b->op) return false;
      break;
    default:
      break;
  }
  for (size_t i = 0; i < a->args.size(); ++i) {
    if (!same(a->args[i], b->args[i])) return false;
  }
  return true;
}

Number arith(GKind kind, const Number& a, const Number& b) {
  switch (kind) {
    case GKind::kAdd: return a + b;
    case GKind::kSub: return a - b;
    case GKind::kMul: return a * b;
    case GKind::kDiv: return b == 0 ? Number(0) : Number(a / b);
    default: return 0;
  }
}

}  // namespace

GExpr g_bool(bool b) {
  static const GExpr kTrue = [] {
    auto n = std::make_shared<GNode>();
    n->value = Value::of_bool(true);
    return n;
  }();
  static const GExpr kFalse = [] {
    auto n = std::make_shared<GNode>();
    n->value = Value::of_bool(false);
    return n;
  }();
  return b ? kTrue : kFalse;
}

GExpr g_const(const Value& v, TypeId sort) {
  if (v.kind == Value::Kind::kBool) return g_bool(v.boolean);
  auto n = std::make_shared<GNode>();
  n->sort = sort;
  n->value = v;
  return n;
}

GExpr g_term(int index, TypeId sort) {
  auto n = std::make_shared<GNode>();
  n->kind = GKind::kTerm;
  n->sort = sort;
  n->index = index;
  return n;
}

GExpr g_aux(int index, TypeId sort) {
  auto n = std::make_shared<GNode>();
  n->kind = GKind::kAux;
  n->sort = sort;
  n->index = index;
  return n;
}

bool is_true(const GExpr& e) { return is_const(e) && e->value.kind == Value::Kind::kBool && e->value.boolean; }
bool is_false(const GExpr& e) { return is_const(e) && e->value.kind == Value::Kind::kBool && !e->value.boolean; }

GExpr g_not(GExpr a) {
  if (is_const(a)) return g_bool(!a->value.boolean);
  if (a->kind == GKind::kNot) return a->args[0];
  return make(GKind::kNot, kBoolType, {std::move(a)});
}

namespace {

GExpr junction(GKind kind, std::vector<GExpr> args) {
  const bool absorbing = kind == GKind::kOr;  // true absorbs an Or, false an And
  std::vector<GExpr> flat;
  for (GExpr& a : args) {
    if (is_const(a)) {
      if (a->value.boolean == absorbing) return g_bool(absorbing);
      continue;
    }
    if (a->kind == kind) {
      for (const GExpr& sub : a->args) flat.push_back(sub);
    } else {
      flat.push_back(std::move(a));
    }
  }
  if (flat.empty()) return g_bool(!absorbing);
  if (flat.size() == 1) return flat[0];
  return make(kind, kBoolType, std::move(flat));
}

}  // namespace

GExpr g_and(std::vector<GExpr> args) { return junction(GKind::kAnd, std::move(args)); }
GExpr g_or(std::vector<GExpr> args) { return junction(GKind::kOr, std::move(args)); }

GExpr g_implies(GExpr a, GExpr b) {
  if (is_true(a)) return b;
  if (is_false(a) || is_true(b)) return g_bool(true);
  if (is_false(b)) return g_not(std::move(a));
  return make(GKind::kImplies, kBoolType, {std::move(a), std::move(b)});
}

GExpr g_iff(GExpr a, GExpr b) {
  if (is_const(a) && is_const(b)) return g_bool(a->value.boolean == b->value.boolean);
  if (is_const(a)) std::swap(a, b);
  if (is_true(b)) return a;
  if (is_false(b)) return g_not(std::move(a));
  return make(GKind::kIff, kBoolType, {std::move(a), std::move(b)});
}

GExpr g_ite(GExpr c, GExpr a, GExpr b) {
  if (is_true(c)) return a;
  if (is_false(c)) return b;
  if (same(a, b)) return a;
  if (a->sort == kBoolType) {
    if (is_true(a) && is_false(b)) return c;
    if (is_false(a) && is_true(b)) return g_not(std::move(c));
    if (is_true(a)) return g_or({std::move(c), std::move(b)});
    if (is_false(a)) return g_and({g_not(std::move(c)), std::move(b)});
    if (is_true(b)) return g_implies(std::move(c), std::move(a));
    if (is_false(b)) return g_and({std::move(c), std::move(a)});
  }
  TypeId sort = a->sort;
  return make(GKind::kIte, sort, {std::move(c), std::move(a), std::move(b)});
}

GExpr g_cmp(CmpOp op, GExpr a, GExpr b) {
  if (op == CmpOp::kNe) return g_not(g_cmp(CmpOp::kEq, std::move(a), std::move(b)));
  if (a->sort == kBoolType) {
    // Only equality compares truth values.
    return g_iff(std::move(a), std::move(b));
  }
  if (is_const(a) && is_const(b)) {
    if (a->value.kind == Value::Kind::kNumber && b->value.kind == Value::Kind::kNumber) {
      return g_bool(compare_numbers(op, a->value.number, b->value.number));
    }
    return g_bool(a->value == b->value);
  }
  if (op == CmpOp::kEq) {
    if (same(a, b)) return g_bool(true);
    if (is_const(a)) std::swap(a, b);
  }
  auto n = std::make_shared<GNode>();
  n->kind = GKind::kCmp;
  n->sort = kBoolType;
  n->op = op;
  n->args = {std::move(a), std::move(b)};
  return n;
}

GExpr g_arith(GKind kind, GExpr a, GExpr b, TypeId sort) {
  if (is_const(a) && is_const(b)) {
    return g_const(Value::of_number(arith(kind, a->value.number, b->value.number)), sort);
  }
  switch (kind) {
    case GKind::kAdd:
      if (is_number(a, 0) && b->sort == sort) return b;
      if (is_number(b, 0) && a->sort == sort) return a;
      break;
    case GKind::kSub:
      if (is_number(b, 0) && a->sort == sort) return a;
      break;
    case GKind::kMul:
      if (is_number(a, 1) && b->sort == sort) return b;
      if (is_number(b, 1) && a->sort == sort) return a;
      if (is_number(a, 0) || is_number(b, 0)) return g_const(Value::of_number(0), sort);
      break;
    case GKind::kDiv:
      if (is_number(b, 0) || is_number(a, 0)) return g_const(Value::of_number(0), sort);
      break;
    default:
      break;
  }
  return make(kind, sort, {std::move(a), std::move(b)});
}

GExpr g_neg(GExpr a) {
  if (is_const(a)) return g_const(Value::of_number(-a->value.number), a->sort);
  if (a->kind == GKind::kNeg) return a->args[0];
  TypeId sort = a->sort;
  return make(GKind::kNeg, sort, {std::move(a)});
}

// --- Text ----------------------------------------------------------------------

namespace {

int g_precedence(const GExpr& e) {
  switch (e->kind) {
    case GKind::kIff: return 1;
    case GKind::kImplies: return 2;
    case GKind::kOr: return 3;
    case GKind::kAnd: return 4;
    case GKind::kCmp: return 5;
    case GKind::kAdd:
    case GKind::kSub: return 6;
    case GKind::kMul:
    case GKind::kDiv: return 7;
    case GKind::kNot:
    case GKind::kNeg: return 8;
    case GKind::kConst:
      return e->value.kind == Value::Kind::kNumber && e->value.number < 0 ? 8 : 9;
    default: return 9;
  }
}

void write(std::ostream& out, const GroundTheory& gt, const GExpr& e);

void write_child(std::ostream& out, const GroundTheory& gt, const GExpr& e, bool parens) {
  if (parens) out << "(";
  write(out, gt, e);
  if (parens) out << ")";
}

void write(std::ostream& out, const GroundTheory& gt, const GExpr& e) {
  const int prec = g_precedence(e);
  switch (e->kind) {
    case GKind::kConst:
      if (e->value.kind == Value::Kind::kBool) {
        out << (e->value.boolean ? "true" : "false");
      } else if (e->value.kind == Value::Kind::kNumber) {
        out << number_to_string(e->value.number);
      } else {
        out << gt.structure.value_to_string(e->value);
      }
      return;
    case GKind::kTerm:
      out << gt.terms[e->index].text;
      return;
    case GKind::kAux:
      out << gt.aux[e->index].name;
      return;
    case GKind::kNot:
    case GKind::kNeg:
      out << (e->kind == GKind::kNot ? "~" : "-");
      write_child(out, gt, e->args[0], g_precedence(e->args[0]) < prec || e->args[0]->kind == GKind::kNeg);
      return;
    case GKind::kAnd:
    case GKind::kOr:
      for (size_t i = 0; i < e->args.size(); ++i) {
        if (i > 0) out << (e->kind == GKind::kAnd ? " & " : " | ");
        write_child(out, gt, e->args[i], g_precedence(e->args[i]) <= prec);
      }
      return;
    case GKind::kImplies:
    case GKind::kIff:
      write_child(out, gt, e->args[0], g_precedence(e->args[0]) <= prec);
      out << (e->kind == GKind::kImplies ? " => " : " <=> ");
      write_child(out, gt, e->args[1], g_precedence(e->args[1]) <= prec);
      return;
    case GKind::kIte:
      out << "ite(";
      write(out, gt, e->args[0]);
      out << ", ";
      write(out, gt, e->args[1]);
      out << ", ";
      write(out, gt, e->args[2]);
      out << ")";
      return;
    case GKind::kCmp:
      write_child(out, gt, e->args[0], g_precedence(e->args[0]) <= prec);
      out << " " << cmp_op_text(e->op) << " ";
      write_child(out, gt, e->args[1], g_precedence(e->args[1]) <= prec);
      return;
    case GKind::kAdd:
    case GKind::kSub:
    case GKind::kMul:
    case GKind::kDiv: {
      const char* op = e->kind == GKind::kAdd   ? " + "
                       : e->kind == GKind::kSub ? " - "
                       : e->kind == GKind::kMul ? " * "
                                                : " / ";
      write_child(out, gt, e->args[0], g_precedence(e->args[0]) < prec);
      out << op;
      write_child(out, gt, e->args[1], g_precedence(e->args[1]) <= prec);
      return;
    }
  }
}

}  // namespace

std::string g_text(const GroundTheory& gt, const GExpr& e) {
  std::ostringstream out;
  write(out, gt, e);
  return out.str();
}

// --- Evaluation --------------------------------------------------------------

Value g_eval(const GExpr& e, const GModel& m) {
  auto num = [&](size_t i) { return g_eval(e->args[i], m).number; };
  auto boolean = [&](size_t i) { return g_eval(e->args[i], m).boolean; };
  switch (e->kind) {
    case GKind::kConst:
      return e->value;
    case GKind::kTerm:
      return m.terms.at(e->index);
    case GKind::kAux:
      return m.aux.at(e->index);
    case GKind::kNot:
      return Value::of_bool(!boolean(0));
    case GKind::kAnd:
      for (size_t i = 0; i < e->args.size(); ++i) {
        if (!boolean(i)) return Value::of_bool(false);
      }
      return Value::of_bool(true);
    case GKind::kOr:
      for (size_t i = 0; i < e->args.size(); ++i) {
        if (boolean(i)) return Value::of_bool(true);
      }
      return Value::of_bool(false);
    case GKind::kImplies:
      return Value::of_bool(!boolean(0) || boolean(1));
    case GKind::kIff:
      return Value::of_bool(boolean(0) == boolean(1));
    case GKind::kIte:
      return boolean(0) ? g_eval(e->args[1], m) : g_eval(e->args[2], m);
    case GKind::kCmp: {
      Value a = g_eval(e->args[0], m);
      Value b = g_eval(e->args[1], m);
      if (a.kind == Value::Kind::kNumber && b.kind == Value::Kind::kNumber) {
        return Value::of_bool(compare_numbers(e->op, a.number, b.number));
      }
      return Value::of_bool(e->op == CmpOp::kEq ? a == b : a != b);
    }
    case GKind::kAdd:
    case GKind::kSub:
    case GKind::kMul:
    case GKind::kDiv:
      return Value::of_number(arith(e->kind, num(0), num(1)));
    case GKind::kNeg:
      return Value::of_number(-num(0));
  }
  return Value{};
}

void collect_terms(const GExpr& e, std::vector<int>& out) {
  if (e->kind == GKind::kTerm) {
    out.push_back(e->index);
    return;
  }
  for (const GExpr& a : e->args) collect_terms(a, out);
}

// --- GroundTheory ----------------------------------------------------------------

std::optional<int> GroundTheory::find_term(const GroundTerm& t) const {
  auto it = term_index.find(t);
  if (it == term_index.end()) return std::nullopt;
  return it->second;
}

std::optional<int> GroundTheory::find_atom(const std::string& text) const {
  auto it = atom_index.find(text);
  if (it == atom_index.end()) return std::nullopt;
  return it->second;
}

const LabeledAssertion* GroundTheory::find_assertion(const std::string& label) const {
  for (const auto* list : {&background, &assertions}) {
    for (const LabeledAssertion& a : *list) {
      if (a.label == label) return &a;
    }
  }
  return nullptr;
}

GExpr GroundTheory::fact_formula(const GroundTerm& term, const Value& value) const {
  auto idx = find_term(term);
  if (!idx) {
    throw Error(ErrorKind::kInvalidArgument,
                "'" + structure.term_to_string(term) + "' does not occur in the knowledge base");
  }
  const TermInfo& info = terms[*idx];
  GExpr t = g_term(*idx, info.sort);
  if (info.sort == kBoolType) return value.boolean ? t : g_not(t);
  GExpr eq = g_cmp(CmpOp::kEq, t, g_const(value, info.sort));
  if (auto a = find_atom(g_text(*this, eq))) eq->atom = *a;
  return eq;
}

std::string GroundTheory::dump() const {
  std::ostringstream out;
  for (const auto* list : {&background, &assertions}) {
    for (const LabeledAssertion& a : *list) out << a.label << ": " << g_text(*this, a.formula) << "\n";
  }
  return out.str();
}

// --- Grounder ----------------------------------------------------------------------

namespace {

TypeId sort_of(const TypeTable& table, TypeId t) {
  if (t == kBoolType) return kBoolType;
  if (table.is_numeric(t)) return table.numeric_kind(t) == TypeKind::kReal ? kRealType : kIntType;
  return t;
}

TypeId resolve_binder_type(const TypeTable& table, const TypeRef& ref) {
  auto t = table.find_type(print_type(ref));
  if (!t) throw Error(ErrorKind::kUnknownSymbol, "unknown type '" + print_type(ref) + "'");
  return *t;
}

class Grounder {
 public:
  Grounder(const TypedKB& tkb, GroundTheory& gt) : gt_(gt), table_(tkb.table) {}

  const GroundTheory& theory() const { return gt_; }

  int term_id(const GroundTerm& term) {
    if (auto found = gt_.find_term(term)) return *found;
    TermInfo info;
    info.term = term;
    info.text = gt_.structure.term_to_string(term);
    info.type = table_.symbol(term.symbol).result;
    info.sort = sort_of(table_, info.type);
    int id = static_cast<int>(gt_.terms.size());
    gt_.terms.push_back(std::move(info));
    gt_.term_index[term] = id;
    return id;
  }

  int aux_var(const std::string& name, TypeId sort) {
    gt_.aux.push_back(AuxVar{name, sort});
    return static_cast<int>(gt_.aux.size()) - 1;
  }

  // Constraints on min/max variables created while grounding the current
  // assertion; the caller conjoins them.
  std::vector<GExpr> take_side() { return std::exchange(side_, {}); }

  // Finite domain of a type, or throws InfiniteQuantification.
  const TypeExtension& domain(TypeId type, const std::string& context) {
    const TypeExtension* ext = gt_.structure.extension(type);
    if (!ext) {
      throw Error(ErrorKind::kInfiniteQuantification,
                  "cannot ground over type " + table_.type(type).name + " (no finite extension) in '" + context + "'");
    }
    return *ext;
  }

  // Calls `body` once per assignment of the binders.
  void for_each_binding(const std::vector<Binder>& binders, const std::string& context,
                        const std::function<void()>& body) {
    std::vector<std::pair<std::string, TypeId>> vars;
    for (const Binder& b : binders) {
      TypeId t = resolve_binder_type(table_, b.type);
      for (const std::string& v : b.vars) vars.emplace_back(v, t);
    }
    std::vector<const TypeExtension*> domains;
    for (const auto& v : vars) domains.push_back(&domain(v.second, context));
    const size_t base = env_.size();
    std::function<void(size_t)> rec = [&](size_t i) {
      if (i == vars.size()) {
        body();
        return;
      }
      for (const Value& value : domains[i]->elements) {
        env_.push_back({vars[i].first, value, sort_of(table_, vars[i].second)});
        rec(i + 1);
        env_.pop_back();
      }
    };
    rec(0);
    env_.resize(base);
  }

  GExpr apply(int symbol, const std::vector<GExpr>& args) {
    const SymbolInfo& info = table_.symbol(symbol);
    const TypeId sort = sort_of(table_, info.result);
    for (size_t i = 0; i < args.size(); ++i) {
      if (is_const(args[i])) continue;
      // Case split on the value of a non-constant argument.
      const TypeExtension& ext = domain(info.args[i], info.name + "(...)");
      std::vector<GExpr> cases;
      std::vector<GExpr> conds;
      for (const Value& v : ext.elements) {
        std::vector<GExpr> fixed = args;
        fixed[i] = g_const(v, sort_of(table_, info.args[i]));
        conds.push_back(g_cmp(CmpOp::kEq, args[i], fixed[i]));
        cases.push_back(apply(symbol, fixed));
      }
      if (sort == kBoolType) {
        std::vector<GExpr> disjuncts;
        for (size_t k = 0; k < cases.size(); ++k) disjuncts.push_back(g_and({conds[k], cases[k]}));
        return g_or(std::move(disjuncts));
      }
      GExpr acc = cases.back();
      for (size_t k = cases.size() - 1; k-- > 0;) acc = g_ite(conds[k], cases[k], acc);
      return acc;
    }
    GroundTerm term{symbol, {}};
    for (size_t i = 0; i < args.size(); ++i) {
      const Value& v = args[i]->value;
      if (!gt_.structure.in_type(v, info.args[i])) {
        throw Error(ErrorKind::kValueOutsideType, "argument " + gt_.structure.value_to_string(v) + " of '" +
                                                      info.name + "' is outside type " +
                                                      table_.type(info.args[i]).name);
      }
      term.args.push_back(v);
    }
    if (auto a = gt_.structure.lookup(term); a && a->origin == Origin::kEnumeration) {
      return g_const(a->value, sort);
    }
    if (!allow_new_terms_ && !gt_.find_term(term)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "'" + gt_.structure.term_to_string(term) + "' does not occur in the theory");
    }
    return g_term(term_id(term), sort);
  }

  GExpr ground(const ExprPtr& e) {
    const TypeId sort = e->type == kNoType ? kBoolType : sort_of(table_, e->type);
    switch (e->kind) {
      case ExprKind::kBool:
        return g_bool(e->boolean);
      case ExprKind::kNumber:
        return g_const(Value::of_number(e->number), sort);
      case ExprKind::kName: {
        if (e->name_kind == NameKind::kVariable) {
          for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
            if (it->name == e->name) return g_const(it->value, it->sort);
          }
          throw Error(ErrorKind::kInvalidArgument, "unbound variable '" + e->name + "'");
        }
        auto v = gt_.structure.element_named(e->type, e->name);
        if (!v) throw Error(ErrorKind::kUnknownSymbol, "unknown element '" + e->name + "'");
        return g_const(*v, sort);
      }
      case ExprKind::kConceptLit: {
        auto v = gt_.structure.element_named(e->type, e->name);
        if (!v) throw Error(ErrorKind::kUnknownSymbol, "unknown concept '" + e->name + "'");
        return g_const(*v, sort);
      }
      case ExprKind::kApply: {
        std::vector<GExpr> args;
        for (const ExprPtr& a : e->args) args.push_back(ground(a));
        return apply(*table_.find_symbol(e->name), args);
      }
      case ExprKind::kNot:
        return g_not(ground(e->args[0]));
      case ExprKind::kNeg:
        return g_neg(ground(e->args[0]));
      case ExprKind::kAnd:
      case ExprKind::kOr: {
        std::vector<GExpr> args;
        for (const ExprPtr& a : e->args) {
          args.push_back(ground(a));
          // Short-circuit: later conjuncts may not even be groundable.
          if (e->kind == ExprKind::kAnd ? is_false(args.back()) : is_true(args.back())) break;
        }
        return e->kind == ExprKind::kAnd ? g_and(std::move(args)) : g_or(std::move(args));
      }
      case ExprKind::kImplies:
        return g_implies(ground(e->args[0]), ground(e->args[1]));
      case ExprKind::kIff:
        return g_iff(ground(e->args[0]), ground(e->args[1]));
      case ExprKind::kCompare: {
        std::vector<GExpr> operands;
        for (const ExprPtr& a : e->args) operands.push_back(ground(a));
        std::vector<GExpr> parts;
        for (size_t i = 0; i < e->ops.size(); ++i) {
          parts.push_back(g_cmp(e->ops[i], operands[i], operands[i + 1]));
        }
        return g_and(std::move(parts));
      }
      case ExprKind::kAdd:
      case ExprKind::kSub:
      case ExprKind::kMul:
      case ExprKind::kDiv: {
        GKind kind = e->kind == ExprKind::kAdd   ? GKind::kAdd
                     : e->kind == ExprKind::kSub ? GKind::kSub
                     : e->kind == ExprKind::kMul ? GKind::kMul
                                                 : GKind::kDiv;
        return g_arith(kind, ground(e->args[0]), ground(e->args[1]), sort);
      }
      case ExprKind::kForall:
      case ExprKind::kExists: {
        std::vector<GExpr> parts;
        for_each_binding(e->binders, print_expr(*e), [&] { parts.push_back(ground(e->args[0])); });
        return e->kind == ExprKind::kForall ? g_and(std::move(parts)) : g_or(std::move(parts));
      }
      case ExprKind::kCount:
      case ExprKind::kSum: {
        GExpr acc = g_const(Value::of_number(0), sort);
        for_each_binding(e->binders, print_expr(*e), [&] {
          GExpr v = ground(e->args[0]);
          if (e->kind == ExprKind::kCount) {
            v = g_ite(v, g_const(Value::of_number(1), kIntType), g_const(Value::of_number(0), kIntType));
          }
          acc = g_arith(GKind::kAdd, acc, v, sort);
        });
        return acc;
      }
      case ExprKind::kMin:
      case ExprKind::kMax: {
        std::vector<GExpr> values;
        for_each_binding(e->binders, print_expr(*e), [&] { values.push_back(ground(e->args[0])); });
        if (values.empty()) {
          throw Error(ErrorKind::kInvalidArgument, "aggregate over an empty set in '" + print_expr(*e) + "'");
        }
        const bool is_min = e->kind == ExprKind::kMin;
        if (std::all_of(values.begin(), values.end(), is_const)) {
          Number best = values[0]->value.number;
          for (const GExpr& v : values) best = is_min ? std::min(best, v->value.number) : std::max(best, v->value.number);
          return g_const(Value::of_number(best), sort);
        }
        GExpr m = g_aux(aux_var(std::string(is_min ? "min" : "max") + "#" + std::to_string(gt_.aux.size()), sort), sort);
        std::vector<GExpr> some;
        std::vector<GExpr> bound;
        for (const GExpr& v : values) {
          some.push_back(g_cmp(CmpOp::kEq, m, v));
          bound.push_back(g_cmp(is_min ? CmpOp::kLe : CmpOp::kGe, m, v));
        }
        side_.push_back(g_or(std::move(some)));
        side_.push_back(g_and(std::move(bound)));
        return m;
      }
      case ExprKind::kConceptApply: {
        GExpr c = ground(e->args[0]);
        std::vector<GExpr> args;
        for (size_t i = 1; i < e->args.size(); ++i) args.push_back(ground(e->args[i]));
        const TypeExtension& ext = domain(e->args[0]->type, print_expr(*e));
        auto symbol_of = [&](const Value& v) { return *table_.find_symbol(ext.names.at(v.ordinal)); };
        if (is_const(c)) return apply(symbol_of(c->value), args);
        std::vector<GExpr> conds;
        std::vector<GExpr> cases;
        for (const Value& v : ext.elements) {
          conds.push_back(g_cmp(CmpOp::kEq, c, g_const(v, c->sort)));
          cases.push_back(apply(symbol_of(v), args));
        }
        if (cases.empty()) throw Error(ErrorKind::kMissingExtension, "empty concept type in '" + print_expr(*e) + "'");
        if (sort == kBoolType) {
          std::vector<GExpr> disjuncts;
          for (size_t k = 0; k < cases.size(); ++k) disjuncts.push_back(g_and({conds[k], cases[k]}));
          return g_or(std::move(disjuncts));
        }
        GExpr acc = cases.back();
        for (size_t k = cases.size() - 1; k-- > 0;) acc = g_ite(conds[k], cases[k], acc);
        return acc;
      }
      case ExprKind::kIte: {
        GExpr c = ground(e->args[0]);
        if (is_true(c)) return ground(e->args[1]);
        if (is_false(c)) return ground(e->args[2]);
        return g_ite(c, ground(e->args[1]), ground(e->args[2]));
      }
    }
    return g_bool(true);
  }

  // Grounds with additional variable bindings in scope.
  struct Binding {
    std::string name;
    Value value;
    TypeId sort;
  };
  std::vector<Binding>& env() { return env_; }
  void set_allow_new_terms(bool allow) { allow_new_terms_ = allow; }

 private:
  GroundTheory& gt_;
  const TypeTable& table_;
  std::vector<Binding> env_;
  std::vector<GExpr> side_;
  bool allow_new_terms_ = true;
};

// Registers the terms of every symbol not fixed by the structure, in
// declaration and tuple order, so the atom pool covers the vocabulary.
void preregister_terms(const TypeTable& table, Grounder& g, const PartialStructure& s) {
  for (size_t sym = 0; sym < table.symbol_count(); ++sym) {
    if (s.is_enumerated(static_cast<int>(sym))) continue;
    auto tuples = s.tuples(static_cast<int>(sym));
    if (!tuples) continue;
    for (auto& args : *tuples) g.term_id(GroundTerm{static_cast<int>(sym), std::move(args)});
  }
}

bool contains_aux(const GExpr& e) {
  if (e->kind == GKind::kAux) return true;
  for (const GExpr& a : e->args) {
    if (contains_aux(a)) return true;
  }
  return false;
}

void intern_comparisons(GroundTheory& gt, const GExpr& e, bool add) {
  if (e->kind == GKind::kCmp && e->atom < 0 && !contains_aux(e)) {
    std::string text = g_text(gt, e);
    if (auto found = gt.find_atom(text)) {
      e->atom = *found;
    } else if (add) {
      GroundAtom atom;
      atom.text = text;
      atom.kind = AtomKind::kComparison;
      atom.expr = e;
      collect_terms(e, atom.terms);
      e->atom = static_cast<int>(gt.atoms.size());
      gt.atom_index[text] = e->atom;
      gt.atoms.push_back(std::move(atom));
    }
  }
  for (const GExpr& a : e->args) intern_comparisons(gt, a, add);
}

void add_atom(GroundTheory& gt, GroundAtom atom) {
  if (gt.atom_index.count(atom.text)) return;
  gt.atom_index[atom.text] = static_cast<int>(gt.atoms.size());
  if (atom.expr->kind == GKind::kCmp) atom.expr->atom = static_cast<int>(gt.atoms.size());
  gt.atoms.push_back(std::move(atom));
}

void build_pool(GroundTheory& gt) {
  gt.atoms.clear();
  gt.atom_index.clear();
  for (size_t i = 0; i < gt.terms.size(); ++i) {
    const TermInfo& info = gt.terms[i];
    GExpr t = g_term(static_cast<int>(i), info.sort);
    if (info.sort == kBoolType) {
      GroundAtom atom;
      atom.text = info.text;
      atom.kind = AtomKind::kPropositional;
      atom.expr = t;
      atom.term = static_cast<int>(i);
      atom.terms = {atom.term};
      add_atom(gt, std::move(atom));
      continue;
    }
    const TypeExtension* ext = gt.structure.extension(info.type);
    if (!ext) continue;
    for (const Value& v : ext->elements) {
      GroundAtom atom;
      atom.expr = g_cmp(CmpOp::kEq, t, g_const(v, info.sort));
      atom.text = g_text(gt, atom.expr);
      atom.kind = AtomKind::kEquality;
      atom.term = static_cast<int>(i);
      atom.value = v;
      atom.terms = {atom.term};
      add_atom(gt, std::move(atom));
    }
  }
  for (const LabeledAssertion& a : gt.assertions) intern_comparisons(gt, a.formula, true);
  for (const LabeledAssertion& a : gt.background) intern_comparisons(gt, a.formula, false);
}

// Domain constraint for a term whose result is a finite numeric type.
GExpr numeric_domain(const GroundTheory& gt, int term) {
  const TermInfo& info = gt.terms[term];
  const TypeExtension* ext = gt.structure.extension(info.type);
  GExpr t = g_term(term, info.sort);
  std::vector<Number> values;
  for (const Value& v : ext->elements) values.push_back(v.number);
  std::sort(values.begin(), values.end());
  bool contiguous = info.sort == kIntType && !values.empty();
  for (size_t i = 1; contiguous && i < values.size(); ++i) contiguous = values[i] == values[i - 1] + 1;
  if (contiguous) {
    return g_and({g_cmp(CmpOp::kLe, g_const(Value::of_number(values.front()), info.sort), t),
                  g_cmp(CmpOp::kLe, t, g_const(Value::of_number(values.back()), info.sort))});
  }
  std::vector<GExpr> options;
  for (const Number& n : values) options.push_back(g_cmp(CmpOp::kEq, t, g_const(Value::of_number(n), info.sort)));
  return g_or(std::move(options));
}

std::string label_prefix(const TypedKB& tkb, size_t theory) {
  size_t count = 0;
  for (const Theory& t : tkb.kb.theories) count += t.vocabulary == tkb.vocabulary;
  return count > 1 ? tkb.kb.theories[theory].name + "/" : "";
}

// --- Definitions --------------------------------------------------------------

struct RuleInstance {
  size_t rule;
  int head;
  GExpr body;
  GExpr value;  // function rules
};

enum Polarity { kPos = 1, kNeg = 2, kBoth = 3 };

void collect_dependencies(const GExpr& e, int pol, const std::set<int>& defined, std::map<int, int>& out) {
  switch (e->kind) {
    case GKind::kTerm:
      if (defined.count(e->index)) out[e->index] |= pol;
      return;
    case GKind::kNot:
      collect_dependencies(e->args[0], pol == kPos ? kNeg : pol == kNeg ? kPos : kBoth, defined, out);
      return;
    case GKind::kAnd:
    case GKind::kOr:
      for (const GExpr& a : e->args) collect_dependencies(a, pol, defined, out);
      return;
    case GKind::kImplies:
      collect_dependencies(e->args[0], pol == kPos ? kNeg : pol == kNeg ? kPos : kBoth, defined, out);
      collect_dependencies(e->args[1], pol, defined, out);
      return;
    case GKind::kIte:
      collect_dependencies(e->args[0], kBoth, defined, out);
      collect_dependencies(e->args[1], pol, defined, out);
      collect_dependencies(e->args[2], pol, defined, out);
      return;
    default:
      for (const GExpr& a : e->args) collect_dependencies(a, kBoth, defined, out);
      return;
  }
}

// Replaces positive occurrences of leveled atoms d by `d & level(d) < level(head)`.
GExpr add_levels(const GExpr& e, bool positive, const std::function<GExpr(int)>& guard) {
  switch (e->kind) {
    case GKind::kTerm:
      if (positive && e->sort == kBoolType) {
        if (GExpr g = guard(e->index)) return g_and({e, g});
      }
      return e;
    case GKind::kNot:
      return g_not(add_levels(e->args[0], false, guard));
    case GKind::kAnd:
    case GKind::kOr: {
      std::vector<GExpr> args;
      for (const GExpr& a : e->args) args.push_back(add_levels(a, positive, guard));
      return e->kind == GKind::kAnd ? g_and(std::move(args)) : g_or(std::move(args));
    }
    case GKind::kImplies:
      return g_implies(add_levels(e->args[0], false, guard), add_levels(e->args[1], positive, guard));
    case GKind::kIte:
      return g_ite(e->args[0], add_levels(e->args[1], positive, guard), add_levels(e->args[2], positive, guard));
    default:
      return e;
  }
}

struct Tarjan {
  const std::map<int, std::map<int, int>>& edges;
  std::map<int, int> index, low, component;
  std::vector<int> stack;
  std::set<int> on_stack;
  int counter = 0;
  int components = 0;

  void visit(int v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    auto it = edges.find(v);
    if (it != edges.end()) {
      for (const auto& [w, pol] : it->second) {
        if (!index.count(w)) {
          visit(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on_stack.count(w)) {
          low[v] = std::min(low[v], index[w]);
        }
      }
    }
    if (low[v] == index[v]) {
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack.erase(w);
        component[w] = components;
      } while (w != v);
      ++components;
    }
  }
};

std::vector<LabeledAssertion> reduce_definition_impl(const TypedKB& tkb, size_t theory, size_t statement,
                                                     Grounder& g, GroundTheory& gt, const GroundOptions& options) {
  const TypeTable& table = tkb.table;
  const auto& def = std::get<Definition>(tkb.kb.theories[theory].statements[statement]);
  const std::string prefix = label_prefix(tkb, theory);

  std::vector<RuleInstance> instances;
  std::vector<std::vector<GExpr>> rule_side(def.rules.size());
  std::vector<int> defined_symbols;
  for (size_t ri = 0; ri < def.rules.size(); ++ri) {
    const Rule& rule = def.rules[ri];
    std::vector<Binder> binders = rule.binders;
    for (const Binder& b : tkb.head_vars(theory, statement, ri)) binders.push_back(b);
    const int symbol = *table.find_symbol(rule.head->name);
    if (std::find(defined_symbols.begin(), defined_symbols.end(), symbol) == defined_symbols.end()) {
      if (gt.structure.is_enumerated(symbol)) {
        throw Error(ErrorKind::kInvalidArgument,
                    "defined symbol '" + rule.head->name + "' is also enumerated in the structure");
      }
      defined_symbols.push_back(symbol);
    }
    g.for_each_binding(binders, print_rule(rule), [&] {
      GroundTerm head{symbol, {}};
      for (const ExprPtr& a : rule.head->args) {
        GExpr v = g.ground(a);
        if (!is_const(v)) {
          throw Error(ErrorKind::kInvalidArgument, "rule head argument is not a constant in '" + print_rule(rule) + "'");
        }
        head.args.push_back(v->value);
      }
      RuleInstance inst{ri, g.term_id(head), rule.body ? g.ground(rule.body) : g_bool(true), nullptr};
      if (rule.value) inst.value = g.ground(rule.value);
      for (GExpr& s : g.take_side()) rule_side[ri].push_back(std::move(s));
      if (!is_false(inst.body)) instances.push_back(std::move(inst));
    });
  }

  // Defined atoms: every tuple of every defined symbol.
  std::set<int> defined;
  std::map<int, std::vector<int>> terms_of_symbol;
  for (int symbol : defined_symbols) {
    auto tuples = gt.structure.tuples(symbol);
    if (!tuples) {
      throw Error(ErrorKind::kInfiniteQuantification,
                  "defined symbol '" + table.symbol(symbol).name + "' has an argument type without finite extension");
    }
    for (auto& args : *tuples) {
      int t = g.term_id(GroundTerm{symbol, std::move(args)});
      defined.insert(t);
      terms_of_symbol[symbol].push_back(t);
    }
  }

  std::map<int, std::map<int, int>> edges;
  for (const RuleInstance& inst : instances) {
    std::map<int, int> deps;
    collect_dependencies(inst.body, kPos, defined, deps);
    if (inst.value) collect_dependencies(inst.value, kBoth, defined, deps);
    for (const auto& [d, pol] : deps) edges[inst.head][d] |= pol;
  }
  Tarjan tarjan{edges};
  for (int t : defined) {
    if (!tarjan.index.count(t)) tarjan.visit(t);
  }
  std::map<int, int> component_size;
  for (const auto& [t, c] : tarjan.component) ++component_size[c];
  std::set<int> recursive;
  for (const auto& [from, targets] : edges) {
    for (const auto& [to, pol] : targets) {
      if (tarjan.component[from] != tarjan.component[to]) continue;
      if (pol & kNeg) {
        throw Error(ErrorKind::kUnstratifiedDefinition,
                    "'" + gt.terms[from].text + "' depends negatively on itself through '" + gt.terms[to].text + "'");
      }
      if (gt.terms[from].sort != kBoolType || gt.terms[to].sort != kBoolType) {
        throw Error(ErrorKind::kUnstratifiedDefinition,
                    "recursive definition of function '" + table.symbol(gt.terms[from].term.symbol).name +
                        "' is not supported");
      }
      recursive.insert(from);
      recursive.insert(to);
    }
  }

  // Level variables, created on demand.
  const int n = static_cast<int>(defined.size());
  std::map<int, int> level;
  auto level_of = [&](int t) {
    auto it = level.find(t);
    if (it != level.end()) return g_aux(it->second, kIntType);
    int id = g.aux_var("level(" + gt.terms[t].text + ")", kIntType);
    level[t] = id;
    return g_aux(id, kIntType);
  };
  auto leveled = [&](int t) {
    return gt.terms[t].sort == kBoolType && (options.force_level_mapping || recursive.count(t));
  };

  std::vector<LabeledAssertion> out;
  const std::string stmt_id = std::to_string(statement + 1);
  for (size_t ri = 0; ri < def.rules.size(); ++ri) {
    std::vector<GExpr> parts = rule_side[ri];
    for (const RuleInstance& inst : instances) {
      if (inst.rule != ri) continue;
      const TermInfo& head = gt.terms[inst.head];
      GExpr h = g_term(inst.head, head.sort);
      parts.push_back(g_implies(inst.body, inst.value ? g_cmp(CmpOp::kEq, h, inst.value) : h));
    }
    out.push_back({prefix + "rule:" + stmt_id + "." + std::to_string(ri + 1), g_and(std::move(parts)),
                   print_rule(def.rules[ri]), AssertionKind::kRule});
  }
  for (int symbol : defined_symbols) {
    std::vector<GExpr> parts;
    for (size_t ri = 0; ri < def.rules.size(); ++ri) {
      if (*table.find_symbol(def.rules[ri].head->name) != symbol) continue;
      for (const GExpr& s : rule_side[ri]) parts.push_back(s);
    }
    for (int t : terms_of_symbol[symbol]) {
      std::vector<GExpr> bodies;
      for (const RuleInstance& inst : instances) {
        if (inst.head != t) continue;
        if (!leveled(t)) {
          bodies.push_back(inst.body);
          continue;
        }
        GExpr lt = level_of(t);
        bodies.push_back(add_levels(inst.body, true, [&](int d) -> GExpr {
          if (!defined.count(d) || !leveled(d)) return nullptr;
          if (!options.force_level_mapping && tarjan.component[d] != tarjan.component[t]) return nullptr;
          return g_cmp(CmpOp::kLt, level_of(d), lt);
        }));
      }
      const TermInfo& info = gt.terms[t];
      if (info.sort == kBoolType) {
        parts.push_back(g_implies(g_term(t, kBoolType), g_or(std::move(bodies))));
      } else {
        parts.push_back(g_or(std::move(bodies)));
      }
      if (level.count(t)) {
        GExpr l = g_aux(level[t], kIntType);
        parts.push_back(g_cmp(CmpOp::kLe, g_const(Value::of_number(0), kIntType), l));
        parts.push_back(g_cmp(CmpOp::kLe, l, g_const(Value::of_number(n), kIntType)));
      }
    }
    const std::string& name = table.symbol(symbol).name;
    out.push_back({prefix + "completion:" + stmt_id + ":" + name, g_and(std::move(parts)),
                   "completion of " + name + " (definition " + stmt_id + ")", AssertionKind::kCompletion});
  }
  return out;
}

}  // namespace

std::vector<LabeledAssertion> reduce_definition(const TypedKB& tkb, size_t theory, size_t statement,
                                                GroundTheory& gt, const GroundOptions& options) {
  Grounder g(tkb, gt);
  return reduce_definition_impl(tkb, theory, statement, g, gt, options);
}

std::vector<int> defined_symbols(const TypedKB& tkb) {
  std::set<int> out;
  for (const Theory& theory : tkb.kb.theories) {
    if (theory.vocabulary != tkb.vocabulary) continue;
    for (const Statement& st : theory.statements) {
      const auto* def = std::get_if<Definition>(&st);
      if (!def) continue;
      for (const Rule& rule : def->rules) out.insert(*tkb.table.find_symbol(rule.head->name));
    }
  }
  return {out.begin(), out.end()};
}

PartialStructure open_defined_symbols(const TypedKB& tkb, const PartialStructure& s,
                                      std::map<GroundTerm, Value>& fixed) {
  PartialStructure out = s;
  for (int symbol : defined_symbols(tkb)) {
    if (!s.is_enumerated(symbol)) continue;
    auto tuples = s.tuples(symbol);
    if (!tuples) {
      throw Error(ErrorKind::kInfiniteQuantification,
                  "enumerated defined symbol '" + tkb.table.symbol(symbol).name + "' has an infinite domain");
    }
    for (auto& args : *tuples) {
      GroundTerm term{symbol, std::move(args)};
      if (auto a = s.lookup(term)) fixed[term] = a->value;
    }
    out = out.without_enumeration(symbol);
  }
  return out;
}

GroundTheory ground_theory(const TypedKB& tkb, const PartialStructure& input, const GroundOptions& options) {
  std::map<GroundTerm, Value> fixed;
  const PartialStructure s = open_defined_symbols(tkb, input, fixed);
  GroundTheory gt{s};
  Grounder g(tkb, gt);
  preregister_terms(tkb.table, g, s);

  for (size_t ti = 0; ti < tkb.kb.theories.size(); ++ti) {
    const Theory& theory = tkb.kb.theories[ti];
    if (theory.vocabulary != tkb.vocabulary) continue;
    const std::string prefix = label_prefix(tkb, ti);
    for (size_t si = 0; si < theory.statements.size(); ++si) {
      if (const auto* axiom = std::get_if<Axiom>(&theory.statements[si])) {
        std::vector<GExpr> parts{g.ground(axiom->formula)};
        for (GExpr& side : g.take_side()) parts.push_back(std::move(side));
        gt.assertions.push_back({prefix + "axiom:" + std::to_string(si + 1), g_and(std::move(parts)),
                                 print_expr(axiom->formula), AssertionKind::kAxiom});
      } else {
        for (LabeledAssertion& a : reduce_definition_impl(tkb, ti, si, g, gt, options)) {
          gt.assertions.push_back(std::move(a));
        }
      }
    }
  }

  if (options.include_user_facts) {
    for (const auto& [term, value] : s.user_facts()) {
      g.term_id(term);
      std::string text = s.term_to_string(term) + " = " + s.value_to_string(value);
      gt.assertions.push_back({"fact:" + s.term_to_string(term), gt.fact_formula(term, value), text,
                               AssertionKind::kFact});
    }
  }

  // Enumerations of defined symbols, one constraint per symbol.
  std::map<int, std::vector<GExpr>> enumerated;
  for (const auto& [term, value] : fixed) {
    g.term_id(term);
    enumerated[term.symbol].push_back(gt.fact_formula(term, value));
  }
  for (auto& [symbol, parts] : enumerated) {
    const std::string& name = tkb.table.symbol(symbol).name;
    gt.assertions.push_back({"enumeration:" + name, g_and(std::move(parts)), name + " as enumerated in the structure",
                             AssertionKind::kFact});
  }

  for (size_t i = 0; i < gt.terms.size(); ++i) {
    const TermInfo& info = gt.terms[i];
    if (!tkb.table.is_numeric(info.type) || !s.has_extension(info.type)) continue;
    gt.background.push_back({"domain:" + info.text, numeric_domain(gt, static_cast<int>(i)),
                             info.text + " in " + tkb.table.type(info.type).name, AssertionKind::kBackground});
  }

  build_pool(gt);
  // Fact formulas were built before the pool existed.
  for (LabeledAssertion& a : gt.assertions) intern_comparisons(gt, a.formula, false);
  return gt;
}

int add_term(GroundTheory& gt, const GroundTerm& term) {
  Grounder g(gt.structure.kb(), gt);
  return g.term_id(term);
}

GroundedExpr ground_expr(GroundTheory& gt, const ExprPtr& typed, bool allow_new_terms) {
  Grounder g(gt.structure.kb(), gt);
  g.set_allow_new_terms(allow_new_terms);
  GroundedExpr out;
  out.expr = g.ground(typed);
  out.side = g.take_side();
  intern_comparisons(gt, out.expr, false);
  return out;
}

// --- Simplification ----------------------------------------------------------

GExpr simplify_expr(const GExpr& e, const FactMap& facts) {
  switch (e->kind) {
    case GKind::kConst:
    case GKind::kAux:
      return e;
    case GKind::kTerm: {
      auto it = facts.terms.find(e->index);
      return it == facts.terms.end() ? e : g_const(it->second, e->sort);
    }
    default:
      break;
  }
  if (e->kind == GKind::kCmp && e->atom >= 0) {
    auto it = facts.atoms.find(e->atom);
    if (it != facts.atoms.end()) return g_bool(it->second);
  }
  std::vector<GExpr> args;
  bool changed = false;
  for (const GExpr& a : e->args) {
    args.push_back(simplify_expr(a, facts));
    changed |= args.back() != a;
  }
  switch (e->kind) {
    case GKind::kNot: return g_not(args[0]);
    case GKind::kAnd: return g_and(std::move(args));
    case GKind::kOr: return g_or(std::move(args));
    case GKind::kImplies: return g_implies(args[0], args[1]);
    case GKind::kIff: return g_iff(args[0], args[1]);
    case GKind::kIte: return g_ite(args[0], args[1], args[2]);
    case GKind::kCmp: {
      if (!changed) return e;
      return g_cmp(e->op, args[0], args[1]);
    }
    case GKind::kAdd:
    case GKind::kSub:
    case GKind::kMul:
    case GKind::kDiv:
      return g_arith(e->kind, args[0], args[1], e->sort);
    case GKind::kNeg:
      return g_neg(args[0]);
    default:
      return e;
  }
}

GroundTheory simplify(const GroundTheory& gt, const FactMap& facts) {
  // Truth values of propositional atoms and values of equality atoms become
  // term substitutions; other atoms are substituted where they occur.
  FactMap normalized = facts;
  for (const auto& [atom, value] : facts.atoms) {
    const GroundAtom& a = gt.atoms.at(atom);
    if (a.kind == AtomKind::kPropositional) {
      normalized.terms[a.term] = Value::of_bool(value);
    } else if (a.kind == AtomKind::kEquality && value) {
      normalized.terms[a.term] = a.value;
    }
  }
  GroundTheory out = gt;
  for (auto* list : {&out.background, &out.assertions}) {
    std::vector<LabeledAssertion> kept;
    for (LabeledAssertion& a : *list) {
      a.formula = simplify_expr(a.formula, normalized);
      if (is_true(a.formula)) continue;
      intern_comparisons(out, a.formula, false);
      kept.push_back(std::move(a));
    }
    *list = std::move(kept);
  }
  return out;
}

}  // namespace fodot
