#include "fodot/consult.h"

#include "fodot/parser.h"

namespace fodot {

const char* display_status_name(DisplayStatus s) {
  switch (s) {
    case DisplayStatus::kUser: return "user";
    case DisplayStatus::kPropagatedTrue: return "propagated_true";
    case DisplayStatus::kPropagatedFalse: return "propagated_false";
    case DisplayStatus::kUnknown: return "unknown";
    case DisplayStatus::kIrrelevant: return "irrelevant";
  }
  return "unknown";
}

ConsultSession::ConsultSession(std::shared_ptr<const TypedKB> tkb, const PartialStructure& s, ConsultOptions options)
    : tkb_(tkb), options_(std::move(options)), reasoner_(tkb, s, options_.reasoner), s_(s) {
  try {
    consequences_ = propagate(reasoner_, s_);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kInconsistent) throw;
    throw Error(ErrorKind::kInconsistentKB, "the knowledge base has no model");
  }
  refresh_display();
}

const Relevance& ConsultSession::relevance() {
  if (!relevance_) relevance_ = relevance_from(reasoner_, s_, consequences_);
  return *relevance_;
}

void ConsultSession::refresh_display() {
  relevance_.reset();
  if (options_.eager_relevance) relevance_ = relevance_from(reasoner_, s_, consequences_);
  const size_t n = consequences_.status.size();
  display_.assign(n, DisplayStatus::kUnknown);
  for (size_t a = 0; a < n; ++a) {
    if (consequences_.user[a]) {
      display_[a] = DisplayStatus::kUser;
    } else if (consequences_.status[a] == AtomStatus::kTrue) {
      display_[a] = DisplayStatus::kPropagatedTrue;
    } else if (consequences_.status[a] == AtomStatus::kFalse) {
      display_[a] = DisplayStatus::kPropagatedFalse;
    } else if (relevance_ && !relevance_->relevant[a]) {
      display_[a] = DisplayStatus::kIrrelevant;
    }
  }
}

std::vector<int> ConsultSession::update(Consequences next, const PartialStructure& s) {
  std::vector<DisplayStatus> before = display_;
  s_ = s;
  consequences_ = std::move(next);
  refresh_display();
  std::vector<int> changed;
  for (size_t a = 0; a < display_.size(); ++a) {
    if (display_[a] != before[a]) changed.push_back(static_cast<int>(a));
  }
  return changed;
}

std::vector<int> ConsultSession::assert_fact(const GroundTerm& term, const Value& value) {
  auto old = s_.user_facts().find(term);
  if (old != s_.user_facts().end() && old->second == value) return {};
  // Replacing a user fact first withdraws the old value.
  const PartialStructure base = old != s_.user_facts().end() ? fodot::retract_fact(s_, term) : s_;
  const PartialStructure next = fodot::assert_fact(base, term, value);

  const Consequences* known = &consequences_;
  Consequences rebased;
  if (old != s_.user_facts().end()) {
    rebased = propagate_from(reasoner_, base, consequences_, std::vector<bool>(consequences_.status.size(), true));
    known = &rebased;
  }
  // Consequences survive the assert by monotonicity: only unknown atoms need
  // to be re-tested.
  std::vector<bool> candidates(known->status.size());
  for (size_t a = 0; a < candidates.size(); ++a) candidates[a] = !known->decided(static_cast<int>(a));
  try {
    return update(propagate_from(reasoner_, next, *known, candidates), next);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kInconsistent) throw;
  }
  std::vector<ExplanationItem> descriptions;
  for (const auto& [t, v] : next.user_facts()) {
    descriptions.push_back(
        {"fact:" + next.term_to_string(t), next.term_to_string(t) + " = " + next.value_to_string(v), AssertionKind::kFact});
  }
  Explanation why = explain_inconsistency(reasoner_, reasoner_.fact_assumptions(next), descriptions);
  throw ConflictError(next.term_to_string(term) + " = " + next.value_to_string(value) +
                          " contradicts the current state",
                      std::move(why));
}

std::vector<int> ConsultSession::retract_fact(const GroundTerm& term) {
  const PartialStructure next = fodot::retract_fact(s_, term);
  // Atoms that were not consequences stay non-consequences with fewer facts:
  // only decided atoms (propagated or asserted) are re-tested.
  std::vector<bool> candidates(consequences_.status.size());
  for (size_t a = 0; a < candidates.size(); ++a) candidates[a] = consequences_.decided(static_cast<int>(a));
  return update(propagate_from(reasoner_, next, consequences_, candidates), next);
}

std::vector<int> ConsultSession::assert_text(const std::string& fact) {
  auto [term, value] = parse_fact(s_, fact);
  return assert_fact(term, value);
}

std::vector<int> ConsultSession::retract_text(const std::string& text) {
  ExprPtr e = parse_expr(text);
  if (e->kind == ExprKind::kCompare || e->kind == ExprKind::kNot) return retract_fact(parse_fact(s_, text).first);
  return retract_fact(resolve_term(s_, e));
}

Explanation ConsultSession::explain(const std::string& literal) {
  ExprPtr typed = check_expr(*tkb_, parse_expr(literal));
  if (typed->type != kBoolType) throw Error(ErrorKind::kTypeMismatch, "'" + literal + "' is not a formula");
  GroundedExpr g = ground_expr(reasoner_.mutable_theory(), typed);
  reasoner_.session().sync();
  // Negating `side => expr` keeps the side constraints of min/max variables.
  GExpr formula = g.side.empty() ? g.expr : g_implies(g_and(std::move(g.side)), g.expr);
  return explain_formula(reasoner_, s_, formula, g_text(theory(), g.expr));
}

Optimum ConsultSession::optimize(const std::string& term, Direction direction) {
  return fodot::optimize(reasoner_, s_, check_expr(*tkb_, parse_expr(term)), direction);
}

std::vector<Model> ConsultSession::models(size_t max_models) { return model_expand(reasoner_, s_, max_models); }

}  // namespace fodot
