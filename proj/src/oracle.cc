// Brute-force model enumeration by native evaluation of the typed AST. It
// shares nothing with the grounder, so it can serve as a test oracle.
#include <functional>
#include <set>
#include <sstream>

#include "fodot/error.h"
#include "fodot/inference.h"
#include "fodot/parser.h"

namespace fodot {

namespace {

struct RuleRef {
  size_t theory;
  size_t statement;
  size_t rule;
  const Rule* r;
};

TypeId binder_type(const TypeTable& table, const TypeRef& ref) {
  auto t = table.find_type(print_type(ref));
  if (!t) throw Error(ErrorKind::kUnknownSymbol, "unknown type '" + print_type(ref) + "'");
  return *t;
}

// Thrown when a candidate is not a model because a defined function ends up
// without a value or with two.
struct Rejected {};

class Evaluator {
 public:
  Evaluator(const TypedKB& tkb, const PartialStructure& s, std::map<GroundTerm, Value>& interp)
      : tkb_(tkb), s_(s), table_(tkb.table), interp_(interp) {}

  const TypeExtension& domain(TypeId t) const {
    const TypeExtension* ext = s_.extension(t);
    if (!ext) {
      throw Error(ErrorKind::kInfiniteQuantification, "oracle needs a finite extension for " + table_.type(t).name);
    }
    return *ext;
  }

  void for_each_binding(const std::vector<Binder>& binders, const std::function<void()>& body) {
    std::vector<std::pair<std::string, TypeId>> vars;
    for (const Binder& b : binders) {
      TypeId t = binder_type(table_, b.type);
      for (const std::string& v : b.vars) vars.emplace_back(v, t);
    }
    std::function<void(size_t)> rec = [&](size_t i) {
      if (i == vars.size()) {
        body();
        return;
      }
      for (const Value& v : domain(vars[i].second).elements) {
        env_.emplace_back(vars[i].first, v);
        rec(i + 1);
        env_.pop_back();
      }
    };
    rec(0);
  }

  Value term_value(const GroundTerm& t) const {
    if (auto a = s_.lookup(t); a && a->origin == Origin::kEnumeration) return a->value;
    auto it = interp_.find(t);
    if (it == interp_.end()) {
      throw Error(ErrorKind::kInvalidArgument, "oracle has no value for '" + s_.term_to_string(t) + "'");
    }
    return it->second;
  }

  Value apply(int symbol, const std::vector<Value>& args) const {
    const SymbolInfo& info = table_.symbol(symbol);
    for (size_t i = 0; i < args.size(); ++i) {
      if (!s_.in_type(args[i], info.args[i])) {
        throw Error(ErrorKind::kValueOutsideType, "argument " + s_.value_to_string(args[i]) + " of '" + info.name +
                                                      "' is outside type " + table_.type(info.args[i]).name);
      }
    }
    return term_value(GroundTerm{symbol, args});
  }

  bool holds(const ExprPtr& e) { return eval(e).boolean; }

  Value eval(const ExprPtr& e) {
    switch (e->kind) {
      case ExprKind::kBool:
        return Value::of_bool(e->boolean);
      case ExprKind::kNumber:
        return Value::of_number(e->number);
      case ExprKind::kName:
        if (e->name_kind == NameKind::kVariable) {
          for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
            if (it->first == e->name) return it->second;
          }
        }
        return *s_.element_named(e->type, e->name);
      case ExprKind::kConceptLit:
        return *s_.element_named(e->type, e->name);
      case ExprKind::kApply: {
        std::vector<Value> args;
        for (const ExprPtr& a : e->args) args.push_back(eval(a));
        return apply(*table_.find_symbol(e->name), args);
      }
      case ExprKind::kNot:
        return Value::of_bool(!holds(e->args[0]));
      case ExprKind::kNeg:
        return Value::of_number(-eval(e->args[0]).number);
      case ExprKind::kAnd:
        for (const ExprPtr& a : e->args) {
          if (!holds(a)) return Value::of_bool(false);
        }
        return Value::of_bool(true);
      case ExprKind::kOr:
        for (const ExprPtr& a : e->args) {
          if (holds(a)) return Value::of_bool(true);
        }
        return Value::of_bool(false);
      case ExprKind::kImplies:
        return Value::of_bool(!holds(e->args[0]) || holds(e->args[1]));
      case ExprKind::kIff:
        return Value::of_bool(holds(e->args[0]) == holds(e->args[1]));
      case ExprKind::kCompare: {
        std::vector<Value> vals;
        for (const ExprPtr& a : e->args) vals.push_back(eval(a));
        for (size_t i = 0; i < e->ops.size(); ++i) {
          if (!compare(e->ops[i], vals[i], vals[i + 1])) return Value::of_bool(false);
        }
        return Value::of_bool(true);
      }
      case ExprKind::kAdd:
        return Value::of_number(eval(e->args[0]).number + eval(e->args[1]).number);
      case ExprKind::kSub:
        return Value::of_number(eval(e->args[0]).number - eval(e->args[1]).number);
      case ExprKind::kMul:
        return Value::of_number(eval(e->args[0]).number * eval(e->args[1]).number);
      case ExprKind::kDiv: {
        Number a = eval(e->args[0]).number;
        Number b = eval(e->args[1]).number;
        return Value::of_number(b == 0 ? Number(0) : Number(a / b));
      }
      case ExprKind::kForall:
      case ExprKind::kExists: {
        const bool forall = e->kind == ExprKind::kForall;
        bool result = forall;
        for_each_binding(e->binders, [&] {
          if (result == forall && holds(e->args[0]) != forall) result = !forall;
        });
        return Value::of_bool(result);
      }
      case ExprKind::kCount: {
        Number n = 0;
        for_each_binding(e->binders, [&] { n += holds(e->args[0]) ? 1 : 0; });
        return Value::of_number(n);
      }
      case ExprKind::kSum: {
        Number n = 0;
        for_each_binding(e->binders, [&] { n += eval(e->args[0]).number; });
        return Value::of_number(n);
      }
      case ExprKind::kMin:
      case ExprKind::kMax: {
        std::optional<Number> best;
        for_each_binding(e->binders, [&] {
          Number v = eval(e->args[0]).number;
          if (!best || (e->kind == ExprKind::kMin ? v < *best : v > *best)) best = v;
        });
        if (!best) throw Error(ErrorKind::kInvalidArgument, "aggregate over an empty set");
        return Value::of_number(*best);
      }
      case ExprKind::kConceptApply: {
        Value c = eval(e->args[0]);
        const std::string& name = domain(c.type).names.at(c.ordinal);
        std::vector<Value> args;
        for (size_t i = 1; i < e->args.size(); ++i) args.push_back(eval(e->args[i]));
        return apply(*table_.find_symbol(name), args);
      }
      case ExprKind::kIte:
        return holds(e->args[0]) ? eval(e->args[1]) : eval(e->args[2]);
    }
    return Value{};
  }

  static bool compare(CmpOp op, const Value& a, const Value& b) {
    if (a.kind == Value::Kind::kNumber && b.kind == Value::Kind::kNumber) {
      switch (op) {
        case CmpOp::kEq: return a.number == b.number;
        case CmpOp::kNe: return a.number != b.number;
        case CmpOp::kLt: return a.number < b.number;
        case CmpOp::kLe: return a.number <= b.number;
        case CmpOp::kGt: return a.number > b.number;
        case CmpOp::kGe: return a.number >= b.number;
      }
    }
    return op == CmpOp::kEq ? a == b : a != b;
  }

  std::vector<std::pair<std::string, Value>>& env() { return env_; }

 private:
  const TypedKB& tkb_;
  const PartialStructure& s_;
  const TypeTable& table_;
  std::map<GroundTerm, Value>& interp_;
  std::vector<std::pair<std::string, Value>> env_;
};

void symbols_in(const TypeTable& table, const ExprPtr& e, bool positive, std::map<int, int>& out) {
  if (!e) return;
  switch (e->kind) {
    case ExprKind::kApply:
      out[*table.find_symbol(e->name)] |= positive ? 1 : 2;
      for (const ExprPtr& a : e->args) symbols_in(table, a, false, out);
      return;
    case ExprKind::kNot:
      symbols_in(table, e->args[0], false, out);
      return;
    case ExprKind::kImplies:
      symbols_in(table, e->args[0], false, out);
      symbols_in(table, e->args[1], positive, out);
      return;
    case ExprKind::kAnd:
    case ExprKind::kOr:
    case ExprKind::kForall:
    case ExprKind::kExists:
      for (const ExprPtr& a : e->args) symbols_in(table, a, positive, out);
      return;
    case ExprKind::kConceptApply:
      // Any member of the concept may be applied.
      for (const std::string& m : table.concept_members(e->args[0]->type)) out[*table.find_symbol(m)] |= 2;
      for (const ExprPtr& a : e->args) symbols_in(table, a, false, out);
      return;
    default:
      for (const ExprPtr& a : e->args) symbols_in(table, a, false, out);
      return;
  }
}

// Definitions, evaluated stratum by stratum at the symbol level.
class DefinedSymbols {
 public:
  explicit DefinedSymbols(const TypedKB& tkb) : tkb_(tkb) {
    const TypeTable& table = tkb.table;
    for (size_t ti = 0; ti < tkb.kb.theories.size(); ++ti) {
      const Theory& th = tkb.kb.theories[ti];
      if (th.vocabulary != tkb.vocabulary) continue;
      for (size_t si = 0; si < th.statements.size(); ++si) {
        const auto* def = std::get_if<Definition>(&th.statements[si]);
        if (!def) continue;
        for (size_t ri = 0; ri < def->rules.size(); ++ri) {
          int sym = *table.find_symbol(def->rules[ri].head->name);
          rules_[sym].push_back({ti, si, ri, &def->rules[ri]});
        }
      }
    }
    // Symbol-level SCCs in dependency order (Tarjan emits sinks first).
    std::map<int, std::map<int, int>> deps;
    for (const auto& [sym, rules] : rules_) {
      for (const RuleRef& r : rules) {
        std::map<int, int> used;
        symbols_in(table, r.r->body, true, used);
        symbols_in(table, r.r->value, false, used);
        for (const auto& [d, pol] : used) {
          if (rules_.count(d)) deps[sym][d] |= (pol == 1 ? 1 : 2);
        }
      }
    }
    std::map<int, int> index, low;
    std::vector<int> stack;
    std::set<int> on_stack;
    int counter = 0;
    std::function<void(int)> visit = [&](int v) {
      index[v] = low[v] = counter++;
      stack.push_back(v);
      on_stack.insert(v);
      for (const auto& [w, pol] : deps[v]) {
        if (!index.count(w)) {
          visit(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on_stack.count(w)) {
          low[v] = std::min(low[v], index[w]);
        }
      }
      if (low[v] == index[v]) {
        std::vector<int> comp;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack.erase(w);
          comp.push_back(w);
        } while (w != v);
        strata_.push_back(comp);
      }
    };
    for (const auto& [sym, rules] : rules_) {
      if (!index.count(sym)) visit(sym);
    }
    for (const auto& comp : strata_) {
      std::set<int> members(comp.begin(), comp.end());
      for (int a : comp) {
        for (const auto& [b, pol] : deps[a]) {
          if (!members.count(b)) continue;
          if (pol & 2) {
            throw Error(ErrorKind::kUnstratifiedDefinition,
                        "oracle: '" + table.symbol(a).name + "' depends negatively on a symbol of its own stratum");
          }
          if (table.symbol(a).result != kBoolType) {
            throw Error(ErrorKind::kUnstratifiedDefinition, "oracle: recursive function definition");
          }
        }
      }
    }
  }

  bool is_defined(int sym) const { return rules_.count(sym) > 0; }

  // Computes every defined term into `interp`; throws Rejected when a defined
  // function is partial or multi-valued.
  void compute(const PartialStructure& s, std::map<GroundTerm, Value>& interp) const {
    const TypeTable& table = tkb_.table;
    Evaluator ev(tkb_, s, interp);
    for (const auto& comp : strata_) {
      for (int sym : comp) {
        const auto tuples = s.tuples(sym);
        for (const auto& args : *tuples) interp.erase(GroundTerm{sym, args});
        if (table.symbol(sym).result == kBoolType) {
          for (const auto& args : *tuples) interp[GroundTerm{sym, args}] = Value::of_bool(false);
        }
      }
      bool changed = true;
      while (changed) {
        changed = false;
        for (int sym : comp) {
          const bool predicate = table.symbol(sym).result == kBoolType;
          for (const RuleRef& r : rules_.at(sym)) {
            std::vector<Binder> binders = r.r->binders;
            for (const Binder& b : tkb_.head_vars(r.theory, r.statement, r.rule)) binders.push_back(b);
            ev.for_each_binding(binders, [&] {
              if (r.r->body && !ev.holds(r.r->body)) return;
              GroundTerm head{sym, {}};
              for (const ExprPtr& a : r.r->head->args) head.args.push_back(ev.eval(a));
              if (predicate) {
                auto& slot = interp[head];
                if (!slot.boolean) {
                  slot = Value::of_bool(true);
                  changed = true;
                }
                return;
              }
              Value v = ev.eval(r.r->value);
              auto it = interp.find(head);
              if (it == interp.end()) {
                interp[head] = v;
              } else if (it->second != v) {
                throw Rejected{};
              }
            });
          }
        }
      }
      for (int sym : comp) {
        if (table.symbol(sym).result == kBoolType) continue;
        const auto tuples = s.tuples(sym);
        for (const auto& args : *tuples) {
          if (!interp.count(GroundTerm{sym, args})) throw Rejected{};
        }
      }
    }
  }

 private:
  const TypedKB& tkb_;
  std::map<int, std::vector<RuleRef>> rules_;
  std::vector<std::vector<int>> strata_;
};

std::vector<ExprPtr> axioms_of(const TypedKB& tkb) {
  std::vector<ExprPtr> out;
  for (const Theory& th : tkb.kb.theories) {
    if (th.vocabulary != tkb.vocabulary) continue;
    for (const Statement& st : th.statements) {
      if (const auto* a = std::get_if<Axiom>(&st)) out.push_back(a->formula);
    }
  }
  return out;
}

// Checks the axioms and user facts on a complete interpretation.
bool accept(const TypedKB& tkb, const PartialStructure& s, const std::vector<ExprPtr>& axioms,
            std::map<GroundTerm, Value>& interp) {
  for (const auto& [term, value] : s.user_facts()) {
    auto it = interp.find(term);
    if (it != interp.end() && it->second != value) return false;
  }
  Evaluator ev(tkb, s, interp);
  for (const ExprPtr& a : axioms) {
    if (!ev.holds(a)) return false;
  }
  return true;
}

}  // namespace

// Whether the computed defined symbols agree with their enumerations.
bool matches(const std::map<GroundTerm, Value>& fixed, const std::map<GroundTerm, Value>& interp) {
  for (const auto& [term, value] : fixed) {
    auto it = interp.find(term);
    if (it == interp.end() || it->second != value) return false;
  }
  return true;
}

std::vector<Model> oracle_enumerate(const TypedKB& tkb, const PartialStructure& input) {
  std::map<GroundTerm, Value> fixed;
  const PartialStructure s = open_defined_symbols(tkb, input, fixed);
  const TypeTable& table = tkb.table;
  DefinedSymbols defined(tkb);
  std::vector<GroundTerm> open;
  std::vector<std::vector<Value>> ranges;
  double candidates = 1;
  for (size_t sym = 0; sym < table.symbol_count(); ++sym) {
    const int id = static_cast<int>(sym);
    if (s.is_enumerated(id)) continue;
    auto tuples = s.tuples(id);
    if (!tuples) throw Error(ErrorKind::kTooLarge, "oracle: '" + table.symbol(id).name + "' has an infinite domain");
    if (defined.is_defined(id)) continue;
    const TypeExtension* ext = s.extension(table.symbol(id).result);
    if (!ext) throw Error(ErrorKind::kTooLarge, "oracle: '" + table.symbol(id).name + "' has an infinite range");
    for (auto& args : *tuples) {
      GroundTerm t{id, std::move(args)};
      auto fact = s.user_facts().find(t);
      ranges.push_back(fact != s.user_facts().end() ? std::vector<Value>{fact->second} : ext->elements);
      candidates *= static_cast<double>(ranges.back().size());
      open.push_back(std::move(t));
    }
  }
  if (candidates > static_cast<double>(kOracleLimit)) {
    throw Error(ErrorKind::kTooLarge, "oracle: " + std::to_string(static_cast<long double>(candidates)) +
                                          " candidate structures exceed the limit");
  }
  const std::vector<ExprPtr> axioms = axioms_of(tkb);
  std::vector<Model> models;
  std::vector<size_t> pick(open.size(), 0);
  for (const auto& r : ranges) {
    if (r.empty()) return models;
  }
  while (true) {
    std::map<GroundTerm, Value> interp;
    for (size_t i = 0; i < open.size(); ++i) interp[open[i]] = ranges[i][pick[i]];
    try {
      defined.compute(s, interp);
      if (matches(fixed, interp) && accept(tkb, s, axioms, interp)) models.push_back(Model{std::move(interp)});
    } catch (const Rejected&) {
    }
    size_t i = 0;
    while (i < pick.size() && ++pick[i] == ranges[i].size()) pick[i++] = 0;
    if (i == pick.size()) break;
  }
  return models;
}

bool oracle_satisfies(const TypedKB& tkb, const PartialStructure& input, const Model& m) {
  std::map<GroundTerm, Value> fixed;
  const PartialStructure s = open_defined_symbols(tkb, input, fixed);
  DefinedSymbols defined(tkb);
  std::map<GroundTerm, Value> interp = m.values;
  try {
    defined.compute(s, interp);
  } catch (const Rejected&) {
    return false;
  }
  for (const auto& [term, value] : interp) {
    auto it = m.values.find(term);
    if (it != m.values.end() && it->second != value) return false;
  }
  if (!matches(fixed, interp)) return false;
  return accept(tkb, s, axioms_of(tkb), interp);
}

Value oracle_evaluate(const TypedKB& tkb, const PartialStructure& input, const Model& m, const ExprPtr& term) {
  std::map<GroundTerm, Value> fixed;
  const PartialStructure s = open_defined_symbols(tkb, input, fixed);
  std::map<GroundTerm, Value> interp = m.values;
  Evaluator ev(tkb, s, interp);
  return ev.eval(term);
}

std::string model_to_string(const PartialStructure& s, const Model& m) {
  const TypeTable& table = s.table();
  std::map<int, std::vector<std::pair<const GroundTerm*, const Value*>>> by_symbol;
  for (const auto& [term, value] : m.values) by_symbol[term.symbol].push_back({&term, &value});
  std::ostringstream out;
  for (const auto& [sym, entries] : by_symbol) {
    const SymbolInfo& info = table.symbol(sym);
    out << info.name << " := ";
    auto tuple = [&](const GroundTerm& t) {
      std::string text;
      if (t.args.size() != 1) text += "(";
      for (size_t i = 0; i < t.args.size(); ++i) {
        if (i > 0) text += ", ";
        text += s.value_to_string(t.args[i]);
      }
      if (t.args.size() != 1) text += ")";
      return text;
    };
    if (info.args.empty()) {
      out << s.value_to_string(*entries[0].second) << ".\n";
      continue;
    }
    out << "{";
    bool first = true;
    for (const auto& [term, value] : entries) {
      if (info.result == kBoolType) {
        if (!value->boolean) continue;
        out << (first ? "" : ", ") << tuple(*term);
      } else {
        out << (first ? "" : ", ") << tuple(*term) << " -> " << s.value_to_string(*value);
      }
      first = false;
    }
    out << "}.\n";
  }
  return out.str();
}

}  // namespace fodot
