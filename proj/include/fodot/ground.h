// Grounding: typed knowledge base + partial structure -> quantifier-free
// ground theory over a finite pool of atoms.
#ifndef FODOT_GROUND_H_
#define FODOT_GROUND_H_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fodot/structure.h"
#include "fodot/typecheck.h"

namespace fodot {

enum class GKind {
  kConst,  // truth value, number or element
  kTerm,   // ground applied symbol (a solver constant)
  kAux,    // auxiliary solver variable (levels, min/max)
  kNot,
  kAnd,
  kOr,
  kImplies,
  kIff,
  kIte,
  kCmp,  // binary; only =, <, =<, >, >= (~= becomes ~(=))
  kAdd,
  kSub,
  kMul,
  kDiv,
  kNeg,
};

struct GNode;
using GExpr = std::shared_ptr<const GNode>;

// Sorts are TypeIds: kBoolType, kIntType, kRealType, or a custom/concept type
// (encoded as an uninterpreted sort). Numeric custom types use Int/Real.
struct GNode {
  GKind kind = GKind::kConst;
  TypeId sort = kBoolType;
  Value value;     // kConst
  int index = -1;  // kTerm: term index; kAux: aux index
  CmpOp op = CmpOp::kEq;
  std::vector<GExpr> args;
  mutable int atom = -1;  // kCmp: position in the atom pool, once interned
};

struct TermInfo {
  GroundTerm term;
  std::string text;      // canonical, e.g. "weight(Bob)"
  TypeId type = kNoType;  // declared result type
  TypeId sort = kNoType;  // solver sort
};

struct AuxVar {
  std::string name;
  TypeId sort = kIntType;
};

enum class AtomKind { kPropositional, kEquality, kComparison };

struct GroundAtom {
  std::string text;
  AtomKind kind = AtomKind::kPropositional;
  GExpr expr;
  int term = -1;  // propositional / equality: the underlying term
  Value value;    // equality: the compared element/number
  std::vector<int> terms;  // every term mentioned
};

enum class AssertionKind { kBackground, kAxiom, kRule, kCompletion, kFact, kAssumption };

struct LabeledAssertion {
  std::string label;
  GExpr formula;
  std::string source;  // human-readable origin
  AssertionKind kind = AssertionKind::kAxiom;
};

struct GroundTheory {
  PartialStructure structure;
  std::vector<TermInfo> terms;
  std::map<GroundTerm, int> term_index;
  std::vector<AuxVar> aux;
  std::vector<GroundAtom> atoms;
  std::map<std::string, int> atom_index;
  std::vector<LabeledAssertion> background;  // domain axioms, always asserted
  std::vector<LabeledAssertion> assertions;

  std::optional<int> find_term(const GroundTerm& t) const;
  std::optional<int> find_atom(const std::string& text) const;
  const LabeledAssertion* find_assertion(const std::string& label) const;

  // Unit formula stating term = value (a literal for Bool terms).
  GExpr fact_formula(const GroundTerm& term, const Value& value) const;
  // Readable dump, one labeled assertion per line.
  std::string dump() const;
};

struct GroundOptions {
  // Use level mapping for every definition, recursive or not.
  bool force_level_mapping = false;
  // Emit the user facts of the structure as labeled unit assertions.
  bool include_user_facts = true;
};

// Symbols with rules in some definition of the checked vocabulary.
std::vector<int> defined_symbols(const TypedKB& tkb);

// Leaves every enumerated defined symbol of S open and collects the
// enumerated values into `fixed`: the definition then computes the symbol
// and the enumeration becomes a constraint on it.
PartialStructure open_defined_symbols(const TypedKB& tkb, const PartialStructure& s,
                                      std::map<GroundTerm, Value>& fixed);

// Throws InfiniteQuantification, UnstratifiedDefinition, ValueOutsideType.
GroundTheory ground_theory(const TypedKB& tkb, const PartialStructure& s, const GroundOptions& options = {});

// Reduces one definition (statement `statement` of theory `theory`) to
// labeled ground formulas; registers the terms it mentions in `gt`.
std::vector<LabeledAssertion> reduce_definition(const TypedKB& tkb, size_t theory, size_t statement,
                                                GroundTheory& gt, const GroundOptions& options = {});

// Grounds a closed typed expression (e.g. an optimisation objective) against
// the theory's structure. `side` holds constraints on min/max variables the
// expression introduced. Unless allowed, terms not already in the theory are
// rejected with InvalidArgument.
struct GroundedExpr {
  GExpr expr;
  std::vector<GExpr> side;
};
GroundedExpr ground_expr(GroundTheory& gt, const ExprPtr& typed, bool allow_new_terms = false);

// Index of a term in the theory, registering it when new.
int add_term(GroundTheory& gt, const GroundTerm& term);

// Consequences used for simplification: atom truth values and term values.
struct FactMap {
  std::map<int, bool> atoms;
  std::map<int, Value> terms;
};

// Substitutes the facts and applies the simplification laws exhaustively;
// assertions reduced to true are dropped.
GroundTheory simplify(const GroundTheory& gt, const FactMap& facts);
GExpr simplify_expr(const GExpr& e, const FactMap& facts);

// --- Ground expression utilities ---------------------------------------------

GExpr g_bool(bool b);
GExpr g_const(const Value& v, TypeId sort);
GExpr g_term(int index, TypeId sort);
GExpr g_aux(int index, TypeId sort);
GExpr g_not(GExpr a);
GExpr g_and(std::vector<GExpr> args);
GExpr g_or(std::vector<GExpr> args);
GExpr g_implies(GExpr a, GExpr b);
GExpr g_iff(GExpr a, GExpr b);
GExpr g_ite(GExpr c, GExpr a, GExpr b);
GExpr g_cmp(CmpOp op, GExpr a, GExpr b);  // ~= is rewritten to ~(=)
GExpr g_arith(GKind kind, GExpr a, GExpr b, TypeId sort);
GExpr g_neg(GExpr a);

bool is_true(const GExpr& e);
bool is_false(const GExpr& e);

std::string g_text(const GroundTheory& gt, const GExpr& e);

// Native evaluation under a total assignment of terms and aux variables.
struct GModel {
  std::vector<Value> terms;
  std::vector<Value> aux;
};
Value g_eval(const GExpr& e, const GModel& m);

// Indices of the terms occurring in e.
void collect_terms(const GExpr& e, std::vector<int>& out);

}  // namespace fodot

#endif  // FODOT_GROUND_H_
