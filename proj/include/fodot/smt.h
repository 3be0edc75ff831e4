// SMT-LIB 2 bridge: emits ground theories and drives an external solver
// process over its standard streams.
#ifndef FODOT_SMT_H_
#define FODOT_SMT_H_

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fodot/ground.h"

namespace fodot {

struct SExpr {
  bool is_list = false;
  std::string atom;  // symbols lose their |quotes|, strings their "quotes"
  std::vector<SExpr> list;

  std::string to_string() const;
};

// Parses one s-expression starting at `pos`; returns nullopt when the input
// ends before it is complete. `pos` is advanced past it on success.
std::optional<SExpr> read_sexpr(std::string_view text, size_t& pos);

// Parses an SMT-LIB numeral, decimal, (- x) or (/ x y) into an exact rational.
std::optional<Number> parse_smt_number(const SExpr& e);

struct SolverConfig {
  std::vector<std::string> command{"z3", "-in"};
  int timeout_ms = 0;  // 0: no limit

  // FODOT_SOLVER (a command line) overrides the "solver" entry of the JSON
  // file named by FODOT_CONFIG; both fall back to `z3 -in`.
  static SolverConfig from_environment();
  static std::vector<std::string> split_command(const std::string& line);
};

enum class SatStatus { kSat, kUnsat, kUnknown };
const char* sat_status_name(SatStatus s);

struct SolverAnswer {
  SatStatus status = SatStatus::kUnknown;
  std::optional<GModel> model;    // when sat and requested
  std::vector<std::string> core;  // when unsat and requested
};

struct Assumption {
  std::string label;
  GExpr formula;
};

class SolverProcess;

class SolverSession {
 public:
  // Throws SolverSpawnError when the solver cannot be started.
  explicit SolverSession(const SolverConfig& config);
  ~SolverSession();
  SolverSession(const SolverSession&) = delete;
  SolverSession& operator=(const SolverSession&) = delete;

  // Declares sorts, elements and terms of `gt` and, unless `bare`, asserts
  // every labeled assertion named. Background assertions are always sent.
  // The theory must outlive the session (or the next load).
  void load(const GroundTheory& gt, bool bare = false);
  // Declares terms and auxiliary variables added to the theory since load.
  void sync();
  void reset();

  void push();
  void pop();
  int depth() const { return depth_; }

  void assert_named(const std::string& label, const GExpr& formula);
  void assert_formula(const GExpr& formula);
  SatStatus check_sat();
  GModel get_model();
  std::vector<std::string> get_unsat_core();

  // Pushes, asserts the assumptions named, checks, collects model or core and
  // pops again; the asserted base theory is unchanged afterwards.
  SolverAnswer check_under(const std::vector<Assumption>& assumptions, bool want_model = true,
                           bool want_core = false);

  // SMT-LIB text of a ground expression.
  std::string encode(const GExpr& e) const;
  const GroundTheory& theory() const { return *gt_; }
  // Commands sent so far (for debugging).
  const std::string& transcript() const { return transcript_; }

 private:
  void start();
  void command(const std::string& cmd);
  void commands(const std::vector<std::string>& cmds);
  SExpr query(const std::string& cmd);
  void declare_from(size_t term_start, size_t aux_start);
  std::string sort_name(TypeId sort) const;
  std::string element_name(const Value& v) const;

  SolverConfig config_;
  std::unique_ptr<SolverProcess> process_;
  const GroundTheory* gt_ = nullptr;
  std::vector<TypeId> declared_sorts_;
  size_t declared_terms_ = 0;
  size_t declared_aux_ = 0;
  int depth_ = 0;
  std::string transcript_;
};

// Whole-theory SMT-LIB script (declarations, named assertions, check-sat),
// for debugging and for feeding other solvers offline.
std::string to_smtlib_script(const GroundTheory& gt);

}  // namespace fodot

#endif  // FODOT_SMT_H_
