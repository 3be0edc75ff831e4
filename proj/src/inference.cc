#include "fodot/inference.h"

#include <set>

#include "fodot/error.h"

namespace fodot {

namespace {

ReasonerOptions without_user_facts(ReasonerOptions options) {
  options.ground.include_user_facts = false;
  return options;
}

[[noreturn]] void solver_gave_up() {
  throw Error(ErrorKind::kSolverUnknown, "the solver answered 'unknown' (timeout or incompleteness)");
}

// Pushes a scope on construction and pops it on destruction.
class Scope {
 public:
  explicit Scope(SolverSession& s) : s_(s) { s_.push(); }
  ~Scope() {
    try {
      s_.pop();
    } catch (...) {
    }
  }
  Scope(const Scope&) = delete;
  Scope& operator=(const Scope&) = delete;

 private:
  SolverSession& s_;
};

std::string fact_source(const PartialStructure& s, const GroundTerm& term, const Value& value) {
  return s.term_to_string(term) + " = " + s.value_to_string(value);
}

// Model-independent value of a pool atom.
bool atom_holds(const GroundAtom& a, const GModel& m) { return g_eval(a.expr, m).boolean; }

}  // namespace

Reasoner::Reasoner(std::shared_ptr<const TypedKB> tkb, const PartialStructure& s, ReasonerOptions options)
    : tkb_(std::move(tkb)), options_(without_user_facts(std::move(options))) {
  gt_ = ground_theory(*tkb_, s, options_.ground);
  session_ = std::make_unique<SolverSession>(options_.solver);
  session_->load(gt_);
}

std::vector<Assumption> Reasoner::fact_assumptions(const PartialStructure& s) {
  std::vector<Assumption> out;
  bool added = false;
  for (const auto& [term, value] : s.user_facts()) {
    if (!gt_.find_term(term)) {
      add_term(gt_, term);
      added = true;
    }
  }
  if (added) session_->sync();
  for (const auto& [term, value] : s.user_facts()) {
    out.push_back({"fact:" + s.term_to_string(term), gt_.fact_formula(term, value)});
  }
  return out;
}

GExpr Reasoner::literal(int atom, bool value) const {
  const GExpr& e = gt_.atoms.at(atom).expr;
  return value ? e : g_not(e);
}

Model Reasoner::to_model(const GModel& m) const {
  Model out;
  for (size_t i = 0; i < gt_.terms.size(); ++i) out.values[gt_.terms[i].term] = m.terms[i];
  return out;
}

std::optional<GModel> Reasoner::solve(const std::vector<Assumption>& assumptions) {
  SolverAnswer a = session_->check_under(assumptions, true, false);
  if (a.status == SatStatus::kUnknown) solver_gave_up();
  if (a.status == SatStatus::kUnsat) return std::nullopt;
  return a.model;
}

// --- Model checking and expansion --------------------------------------------

bool model_check(Reasoner& r, const PartialStructure& s) { return r.solve(r.fact_assumptions(s)).has_value(); }

std::vector<Model> model_expand(Reasoner& r, const PartialStructure& s, size_t max_models) {
  std::vector<Assumption> facts = r.fact_assumptions(s);
  SolverSession& session = r.session();
  const GroundTheory& gt = r.theory();
  std::vector<Model> models;
  Scope scope(session);
  for (const Assumption& a : facts) session.assert_named(a.label, a.formula);
  while (models.size() < max_models) {
    SatStatus status = session.check_sat();
    if (status == SatStatus::kUnknown) solver_gave_up();
    if (status == SatStatus::kUnsat) break;
    GModel m = session.get_model();
    models.push_back(r.to_model(m));
    // Block this assignment of the vocabulary's terms (levels and other
    // auxiliary variables are not part of a structure).
    std::vector<GExpr> differ;
    for (size_t i = 0; i < gt.terms.size(); ++i) {
      const TermInfo& info = gt.terms[i];
      GExpr t = g_term(static_cast<int>(i), info.sort);
      differ.push_back(info.sort == kBoolType ? (m.terms[i].boolean ? g_not(t) : t)
                                              : g_not(g_cmp(CmpOp::kEq, t, g_const(m.terms[i], info.sort))));
    }
    if (differ.empty()) break;
    session.assert_formula(g_or(std::move(differ)));
  }
  return models;
}

// --- Propagation -----------------------------------------------------------------

namespace {

// Marks the atoms decided by the user facts of s.
void apply_user_facts(const GroundTheory& gt, const PartialStructure& s, Consequences& c) {
  for (const auto& [term, value] : s.user_facts()) {
    auto idx = gt.find_term(term);
    if (!idx) continue;
    for (size_t a = 0; a < gt.atoms.size(); ++a) {
      const GroundAtom& atom = gt.atoms[a];
      if (atom.term != *idx || atom.kind == AtomKind::kComparison) continue;
      bool holds = atom.kind == AtomKind::kPropositional ? value.boolean : atom.value == value;
      c.status[a] = holds ? AtomStatus::kTrue : AtomStatus::kFalse;
      c.user[a] = true;
    }
  }
}

void fill_values(const GroundTheory& gt, Consequences& c) {
  c.values.clear();
  for (size_t a = 0; a < gt.atoms.size(); ++a) {
    const GroundAtom& atom = gt.atoms[a];
    if (c.status[a] != AtomStatus::kTrue && !(atom.kind == AtomKind::kPropositional && c.decided(a))) continue;
    if (atom.kind == AtomKind::kPropositional) {
      c.values[atom.term] = Value::of_bool(c.status[a] == AtomStatus::kTrue);
    } else if (atom.kind == AtomKind::kEquality) {
      c.values[atom.term] = atom.value;
    }
  }
}

}  // namespace

Consequences propagate_from(Reasoner& r, const PartialStructure& s, const Consequences& known,
                            const std::vector<bool>& candidates) {
  std::vector<Assumption> facts = r.fact_assumptions(s);
  const GroundTheory& gt = r.theory();
  SolverSession& session = r.session();
  const size_t n = gt.atoms.size();
  Consequences c;
  c.status.assign(n, AtomStatus::kUnknown);
  c.user.assign(n, false);
  std::vector<bool> open(n, false);
  for (size_t a = 0; a < n; ++a) {
    if (a < candidates.size() && candidates[a]) {
      open[a] = true;
    } else if (a < known.status.size() && !known.user[a]) {
      c.status[a] = known.status[a];
    }
  }
  apply_user_facts(gt, s, c);
  for (size_t a = 0; a < n; ++a) {
    if (c.user[a]) open[a] = false;
  }

  Scope scope(session);
  for (const Assumption& a : facts) session.assert_named(a.label, a.formula);
  SatStatus status = session.check_sat();
  if (status == SatStatus::kUnknown) solver_gave_up();
  if (status == SatStatus::kUnsat) throw Error(ErrorKind::kInconsistent, "the theory and the facts have no model");

  // Model-guided backbone search: an atom seen with both values in some model
  // is not a consequence. The remaining atoms are re-tested together: a model
  // of the disjunction of their unseen literals witnesses at least one more
  // non-consequence; unsatisfiability makes all of them consequences.
  std::vector<bool> seen_true(n, false), seen_false(n, false);
  auto observe = [&](const GModel& m) {
    for (size_t a = 0; a < n; ++a) {
      if (!open[a]) continue;
      (atom_holds(gt.atoms[a], m) ? seen_true : seen_false)[a] = true;
    }
  };
  observe(session.get_model());
  while (true) {
    std::vector<GExpr> unseen;
    for (size_t a = 0; a < n; ++a) {
      if (!open[a] || (seen_true[a] && seen_false[a])) continue;
      unseen.push_back(r.literal(static_cast<int>(a), !seen_true[a]));
    }
    if (unseen.empty()) break;
    SolverAnswer answer = session.check_under({{"probe", g_or(std::move(unseen))}}, true, false);
    if (answer.status == SatStatus::kUnknown) solver_gave_up();
    if (answer.status == SatStatus::kUnsat) {
      for (size_t a = 0; a < n; ++a) {
        if (!open[a] || (seen_true[a] && seen_false[a])) continue;
        c.status[a] = seen_true[a] ? AtomStatus::kTrue : AtomStatus::kFalse;
      }
      break;
    }
    observe(*answer.model);
  }
  fill_values(gt, c);
  return c;
}

Consequences propagate(Reasoner& r, const PartialStructure& s) {
  return propagate_from(r, s, Consequences{}, std::vector<bool>(r.theory().atoms.size(), true));
}

// --- Explanation ------------------------------------------------------------------

Explanation explain_inconsistency(Reasoner& r, const std::vector<Assumption>& assumptions,
                                  const std::vector<ExplanationItem>& descriptions) {
  const GroundTheory& gt = r.theory();
  SolverAnswer answer = r.session().check_under(assumptions, false, true);
  if (answer.status == SatStatus::kUnknown) solver_gave_up();
  if (answer.status == SatStatus::kSat) {
    throw Error(ErrorKind::kNotAConsequence, "the facts and the theory are consistent: nothing to explain");
  }

  std::map<std::string, GExpr> formula;
  std::map<std::string, ExplanationItem> item;
  for (const LabeledAssertion& a : gt.assertions) {
    formula[a.label] = a.formula;
    item[a.label] = {a.label, a.source, a.kind};
  }
  for (const Assumption& a : assumptions) formula[a.label] = a.formula;
  for (const ExplanationItem& d : descriptions) item[d.label] = d;

  std::vector<std::string> current;
  for (const std::string& label : answer.core) {
    if (formula.count(label)) current.push_back(label);
  }

  // Deletion-based minimisation on a session holding only the background.
  SolverSession bare(r.options().solver);
  bare.load(gt, /*bare=*/true);
  auto unsat = [&](const std::vector<std::string>& labels) {
    std::vector<Assumption> subset;
    for (const std::string& l : labels) subset.push_back({l, formula.at(l)});
    SolverAnswer a = bare.check_under(subset, false, false);
    if (a.status == SatStatus::kUnknown) solver_gave_up();
    return a.status == SatStatus::kUnsat;
  };
  if (!unsat(current)) {
    throw Error(ErrorKind::kSolverProtocol, "the solver's unsat core is satisfiable on its own");
  }
  for (size_t i = 0; i < current.size();) {
    std::vector<std::string> trial = current;
    trial.erase(trial.begin() + static_cast<long>(i));
    if (unsat(trial)) {
      current = std::move(trial);
    } else {
      ++i;
    }
  }

  Explanation out;
  for (const std::string& label : current) {
    auto it = item.find(label);
    out.items.push_back(it != item.end() ? it->second : ExplanationItem{label, label, AssertionKind::kAssumption});
  }
  return out;
}

Explanation explain_formula(Reasoner& r, const PartialStructure& s, const GExpr& formula, const std::string& text) {
  std::vector<Assumption> assumptions = r.fact_assumptions(s);
  std::vector<ExplanationItem> descriptions;
  for (const auto& [term, v] : s.user_facts()) {
    descriptions.push_back({"fact:" + s.term_to_string(term), fact_source(s, term, v), AssertionKind::kFact});
  }
  const std::string label = "negated:" + text;
  GExpr negated = g_not(formula);
  assumptions.push_back({label, negated});
  descriptions.push_back({label, g_text(r.theory(), negated), AssertionKind::kAssumption});
  return explain_inconsistency(r, assumptions, descriptions);
}

Explanation explain(Reasoner& r, const PartialStructure& s, int atom, bool value) {
  return explain_formula(r, s, r.literal(atom, value), r.theory().atoms.at(atom).text);
}

// --- Optimisation -------------------------------------------------------------------

Optimum optimize(Reasoner& r, const PartialStructure& s, const ExprPtr& objective, Direction direction) {
  std::vector<Assumption> facts = r.fact_assumptions(s);
  GroundedExpr g = ground_expr(r.mutable_theory(), objective);
  SolverSession& session = r.session();
  session.sync();
  if (g.expr->sort != kIntType && g.expr->sort != kRealType) {
    throw Error(ErrorKind::kInvalidArgument, "only numeric terms can be optimised");
  }
  const bool is_int = g.expr->sort == kIntType;
  const GExpr obj = direction == Direction::kMinimize ? g.expr : g_neg(g.expr);

  Scope scope(session);
  for (const Assumption& a : facts) session.assert_named(a.label, a.formula);
  for (const GExpr& side : g.side) session.assert_formula(side);
  SatStatus status = session.check_sat();
  if (status == SatStatus::kUnknown) solver_gave_up();
  if (status == SatStatus::kUnsat) throw Error(ErrorKind::kInconsistent, "the theory and the facts have no model");
  GModel witness = session.get_model();
  Number best = g_eval(obj, witness).number;

  // Is there a model with objective <= bound? Updates best and witness if so.
  auto improve = [&](const Number& bound) {
    GExpr cmp = g_cmp(CmpOp::kLe, obj, g_const(Value::of_number(bound), is_int ? kIntType : kRealType));
    SolverAnswer a = session.check_under({{"bound", cmp}}, true, false);
    if (a.status == SatStatus::kUnknown) solver_gave_up();
    if (a.status == SatStatus::kUnsat) return false;
    witness = *a.model;
    best = g_eval(obj, witness).number;
    return true;
  };

  // Tighten with growing steps until a bound is infeasible, then bisect.
  const Number tolerance = is_int ? Number(1) : Number(1) / 1000000;
  Number step = is_int ? Number(1) : tolerance;
  const Number limit = Number(BigInt(1) << 62);
  Number infeasible;
  while (true) {
    Number bound = best - step;
    if (!improve(bound)) {
      infeasible = bound;
      break;
    }
    step *= 2;
    if (step > limit) throw Error(ErrorKind::kUnbounded, "the objective has no finite optimum");
  }
  // Reals stop at half the tolerance so the value is strictly within it.
  const Number width = is_int ? tolerance : tolerance / 2;
  while (best - infeasible > width) {
    Number mid = (best + infeasible) / 2;
    if (is_int) mid = floor_number(mid);
    if (!improve(mid)) infeasible = mid;
  }
  Optimum out;
  out.value = Value::of_number(direction == Direction::kMinimize ? best : Number(-best));
  out.witness = r.to_model(witness);
  return out;
}

// --- Relevance ----------------------------------------------------------------------

Relevance relevance_from(const Reasoner& r, const PartialStructure& s, Consequences consequences) {
  (void)s;
  const GroundTheory& gt = r.theory();
  FactMap facts;
  for (size_t a = 0; a < gt.atoms.size(); ++a) {
    if (consequences.decided(static_cast<int>(a))) {
      facts.atoms[static_cast<int>(a)] = consequences.status[a] == AtomStatus::kTrue;
    }
  }
  GroundTheory residual = simplify(gt, facts);
  Relevance out;
  out.relevant_terms.assign(gt.terms.size(), false);
  std::vector<int> terms;
  for (const LabeledAssertion& a : residual.assertions) collect_terms(a.formula, terms);
  // A term mentioned by a decided atom is constrained even when the atom no
  // longer occurs in the residual theory.
  for (size_t a = 0; a < gt.atoms.size(); ++a) {
    if (consequences.decided(static_cast<int>(a))) terms.insert(terms.end(), gt.atoms[a].terms.begin(), gt.atoms[a].terms.end());
  }
  for (int t : terms) out.relevant_terms[t] = true;
  out.relevant.assign(gt.atoms.size(), false);
  for (size_t a = 0; a < gt.atoms.size(); ++a) {
    bool rel = consequences.decided(static_cast<int>(a)) || consequences.user[a];
    for (int t : gt.atoms[a].terms) rel = rel || out.relevant_terms[t];
    out.relevant[a] = rel;
  }
  out.consequences = std::move(consequences);
  return out;
}

Relevance relevance(Reasoner& r, const PartialStructure& s) { return relevance_from(r, s, propagate(r, s)); }

bool model_check(std::shared_ptr<const TypedKB> tkb, const PartialStructure& s) {
  Reasoner r(std::move(tkb), s);
  return model_check(r, s);
}

Consequences propagate(std::shared_ptr<const TypedKB> tkb, const PartialStructure& s) {
  Reasoner r(std::move(tkb), s);
  return propagate(r, s);
}

}  // namespace fodot
