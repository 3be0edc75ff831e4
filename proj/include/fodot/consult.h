// Interactive consultation: a session of user edits over one knowledge base,
// with incremental propagation and relevance after every edit.
#ifndef FODOT_CONSULT_H_
#define FODOT_CONSULT_H_

#include <memory>
#include <string>
#include <vector>

#include "fodot/error.h"
#include "fodot/inference.h"

namespace fodot {

enum class DisplayStatus { kUser, kPropagatedTrue, kPropagatedFalse, kUnknown, kIrrelevant };
const char* display_status_name(DisplayStatus s);

// Raised when an assert contradicts the current state; carries a minimal
// inconsistent set of assertions and facts.
class ConflictError : public Error {
 public:
  ConflictError(const std::string& message, Explanation explanation)
      : Error(ErrorKind::kConflictingAssert, message), explanation_(std::move(explanation)) {}
  const Explanation& explanation() const { return explanation_; }

 private:
  Explanation explanation_;
};

struct ConsultOptions {
  ReasonerOptions reasoner;
  // Recompute relevance after every edit; when off, relevance() computes it
  // on demand and unknown atoms are never shown as irrelevant.
  bool eager_relevance = true;
};

class ConsultSession {
 public:
  // Propagates the consequences of T (and of S's user facts). Throws
  // InconsistentKB when T and S have no model.
  ConsultSession(std::shared_ptr<const TypedKB> tkb, const PartialStructure& s, ConsultOptions options = {});

  const PartialStructure& structure() const { return s_; }
  const GroundTheory& theory() const { return reasoner_.theory(); }
  Reasoner& reasoner() { return reasoner_; }
  const Consequences& consequences() const { return consequences_; }
  const Relevance& relevance();

  DisplayStatus status(int atom) const { return display_[atom]; }
  const std::vector<DisplayStatus>& status_table() const { return display_; }

  // Both return the atoms whose display status changed. assert_fact throws
  // ConflictError when the fact contradicts the current state (which is then
  // unchanged); retract_fact throws NotUserFact.
  std::vector<int> assert_fact(const GroundTerm& term, const Value& value);
  std::vector<int> retract_fact(const GroundTerm& term);
  // "term = value", "term", "~term", as accepted by parse_fact.
  std::vector<int> assert_text(const std::string& fact);
  std::vector<int> retract_text(const std::string& term);

  // `literal` is a closed Bool formula that holds in every model, e.g.
  // "18 =< age()" or "vote() = false". Throws NotAConsequence.
  Explanation explain(const std::string& literal);
  Optimum optimize(const std::string& term, Direction direction);
  std::vector<Model> models(size_t max_models);

 private:
  std::vector<int> update(Consequences next, const PartialStructure& s);
  void refresh_display();

  std::shared_ptr<const TypedKB> tkb_;
  ConsultOptions options_;
  Reasoner reasoner_;
  PartialStructure s_;
  Consequences consequences_;
  std::optional<Relevance> relevance_;
  std::vector<DisplayStatus> display_;
};

}  // namespace fodot

#endif  // FODOT_CONSULT_H_
