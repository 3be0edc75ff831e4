// The reasoning tasks over a theory T and a partial structure S, plus a
// brute-force oracle used by the test suites.
#ifndef FODOT_INFERENCE_H_
#define FODOT_INFERENCE_H_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fodot/ground.h"
#include "fodot/smt.h"
#include "fodot/structure.h"

namespace fodot {

// A total structure: the value of every non-enumerated ground term.
struct Model {
  std::map<GroundTerm, Value> values;

  friend bool operator==(const Model& a, const Model& b) { return a.values == b.values; }
  friend bool operator<(const Model& a, const Model& b) { return a.values < b.values; }
};

// Structure-block syntax, one symbol per line (`p := {Bob}.`, `age := 20.`).
std::string model_to_string(const PartialStructure& s, const Model& m);

enum class AtomStatus { kUnknown, kTrue, kFalse };

struct Consequences {
  std::vector<AtomStatus> status;  // indexed like the atom pool
  std::vector<bool> user;          // decided by a user fact rather than propagated
  std::map<int, Value> values;     // term index -> determined value

  bool decided(int atom) const { return status[atom] != AtomStatus::kUnknown; }
  friend bool operator==(const Consequences& a, const Consequences& b) {
    return a.status == b.status && a.user == b.user && a.values == b.values;
  }
};

struct ExplanationItem {
  std::string label;
  std::string source;
  AssertionKind kind = AssertionKind::kAxiom;
};

struct Explanation {
  std::vector<ExplanationItem> items;
};

enum class Direction { kMinimize, kMaximize };

struct Optimum {
  Value value;
  Model witness;
};

struct Relevance {
  Consequences consequences;
  std::vector<bool> relevant;        // indexed like the atom pool
  std::vector<bool> relevant_terms;  // indexed like the theory's terms
};

struct ReasonerOptions {
  SolverConfig solver = SolverConfig::from_environment();
  GroundOptions ground;
};

// A ground theory for (T, enumerations of S) with a loaded solver session.
// User facts are never part of the ground theory: every task takes them as
// named assumptions, so one Reasoner serves any set of user facts.
class Reasoner {
 public:
  Reasoner(std::shared_ptr<const TypedKB> tkb, const PartialStructure& s, ReasonerOptions options = {});
  Reasoner(const Reasoner&) = delete;
  Reasoner& operator=(const Reasoner&) = delete;

  const TypedKB& kb() const { return *tkb_; }
  const GroundTheory& theory() const { return gt_; }
  GroundTheory& mutable_theory() { return gt_; }
  SolverSession& session() { return *session_; }
  const ReasonerOptions& options() const { return options_; }

  // Named unit assumptions ("fact:<term>") for the user facts of s; terms new
  // to the theory are declared on the fly.
  std::vector<Assumption> fact_assumptions(const PartialStructure& s);
  // Formula of a pool atom taking the given truth value.
  GExpr literal(int atom, bool value) const;
  Model to_model(const GModel& m) const;
  // Solver model of T and the assumptions, or nullopt when unsat. Throws
  // SolverUnknown when the solver gives up.
  std::optional<GModel> solve(const std::vector<Assumption>& assumptions);

 private:
  std::shared_ptr<const TypedKB> tkb_;
  ReasonerOptions options_;
  GroundTheory gt_;
  std::unique_ptr<SolverSession> session_;
};

bool model_check(Reasoner& r, const PartialStructure& s);
std::vector<Model> model_expand(Reasoner& r, const PartialStructure& s, size_t max_models);
// Throws Inconsistent when T and S have no model.
Consequences propagate(Reasoner& r, const PartialStructure& s);
// Re-tests only the atoms in `candidates`; the statuses of the others are
// taken from `known` (used by incremental consultation).
Consequences propagate_from(Reasoner& r, const PartialStructure& s, const Consequences& known,
                            const std::vector<bool>& candidates);
// `atom` must be decided; `value` is the truth value it was decided to have.
// Throws NotAConsequence.
Explanation explain(Reasoner& r, const PartialStructure& s, int atom, bool value);
// Explains a ground formula that holds in every model of T and S; `text` names
// its negation ("negated:<text>").
Explanation explain_formula(Reasoner& r, const PartialStructure& s, const GExpr& formula, const std::string& text);
// Explains why the assumptions together with T and S are inconsistent.
Explanation explain_inconsistency(Reasoner& r, const std::vector<Assumption>& assumptions,
                                  const std::vector<ExplanationItem>& descriptions);
// `objective` is a typed closed numeric term. Throws Inconsistent, Unbounded.
Optimum optimize(Reasoner& r, const PartialStructure& s, const ExprPtr& objective, Direction direction);
Relevance relevance(Reasoner& r, const PartialStructure& s);
Relevance relevance_from(const Reasoner& r, const PartialStructure& s, Consequences consequences);

// Convenience wrappers grounding a fresh Reasoner from S.
bool model_check(std::shared_ptr<const TypedKB> tkb, const PartialStructure& s);
Consequences propagate(std::shared_ptr<const TypedKB> tkb, const PartialStructure& s);

inline constexpr double kRealTolerance = 1e-6;

// --- Oracle ------------------------------------------------------------------------

inline constexpr size_t kOracleLimit = 1000000;

// Every total structure expanding S that satisfies T, by exhaustive
// enumeration and native evaluation; defined symbols are computed by
// least-fixpoint iteration. Throws TooLarge beyond kOracleLimit candidates.
std::vector<Model> oracle_enumerate(const TypedKB& tkb, const PartialStructure& s);

// Native check of a total structure (defined symbols must hold their least
// fixpoint values).
bool oracle_satisfies(const TypedKB& tkb, const PartialStructure& s, const Model& m);

// Native value of a closed typed term in a total structure.
Value oracle_evaluate(const TypedKB& tkb, const PartialStructure& s, const Model& m, const ExprPtr& term);

}  // namespace fodot

#endif  // FODOT_INFERENCE_H_
