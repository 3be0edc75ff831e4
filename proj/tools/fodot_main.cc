// fodot: batch reasoning over FO(.) knowledge bases and the HTTP service.
//
// Exit status: 0 on success, 1 when the task answers negatively (no model,
// not a consequence, incomplete table), 2 on usage, input or solver errors.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "fodot/consult.h"
#include "fodot/dmn.h"
#include "fodot/inference.h"
#include "fodot/parser.h"
#include "fodot/service.h"

namespace {

using nlohmann::json;
using namespace fodot;

// Task-level negative answer: printed normally, exit status 1.
struct Negative {};

struct Options {
  std::vector<std::string> files;
  std::vector<std::string> asserts;
  bool json_output = false;
  std::string solver;
  int timeout_ms = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kInvalidArgument, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Loaded {
  std::shared_ptr<const TypedKB> tkb;
  PartialStructure structure;
};

Loaded load(const Options& o) {
  std::string source;
  for (const std::string& f : o.files) source += read_file(f) + "\n";
  auto tkb = std::make_shared<const TypedKB>(check(parse_kb(source)));
  PartialStructure s = build_structure(tkb);
  for (const std::string& a : o.asserts) {
    auto [term, value] = parse_fact(s, a);
    s = assert_fact(s, term, value);
  }
  return {tkb, s};
}

ReasonerOptions reasoner_options(const Options& o) {
  ReasonerOptions r;
  if (!o.solver.empty()) r.solver.command = SolverConfig::split_command(o.solver);
  if (o.timeout_ms > 0) r.solver.timeout_ms = o.timeout_ms;
  return r;
}

json value_json(const PartialStructure& s, const Value& v) {
  if (v.kind == Value::Kind::kBool) return v.boolean;
  if (v.kind == Value::Kind::kNumber) {
    if (is_integer(v.number) && abs(v.number) < Number(BigInt(1) << 53)) return v.number.convert_to<long long>();
    return to_double(v.number);
  }
  return s.value_to_string(v);
}

json model_json(const PartialStructure& s, const Model& m) {
  json out = json::object();
  for (const auto& [term, value] : m.values) out[s.term_to_string(term)] = value_json(s, value);
  return out;
}

void print(const Options& o, const json& j, const std::string& text) {
  if (o.json_output) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << text;
  }
}

const char* status_text(AtomStatus s) {
  return s == AtomStatus::kTrue ? "true" : s == AtomStatus::kFalse ? "false" : "unknown";
}

void run_check(const Options& o) {
  Loaded kb = load(o);
  Reasoner r(kb.tkb, kb.structure, reasoner_options(o));
  const bool sat = model_check(r, kb.structure);
  print(o, {{"command", "check"}, {"satisfiable", sat}}, sat ? "satisfiable\n" : "unsatisfiable\n");
  if (!sat) throw Negative{};
}

void run_expand(const Options& o, size_t max_models) {
  Loaded kb = load(o);
  Reasoner r(kb.tkb, kb.structure, reasoner_options(o));
  std::vector<Model> models = model_expand(r, kb.structure, max_models);
  json list = json::array();
  std::ostringstream text;
  for (size_t i = 0; i < models.size(); ++i) {
    list.push_back(model_json(kb.structure, models[i]));
    text << "Model " << i + 1 << ":\n" << model_to_string(kb.structure, models[i]) << "\n";
  }
  if (models.empty()) text << "no models\n";
  print(o, {{"command", "expand"}, {"models", list}}, text.str());
  if (models.empty()) throw Negative{};
}

// Decided atoms, leaving out false equality atoms (the true one gives the value).
void run_propagate(const Options& o) {
  Loaded kb = load(o);
  Reasoner r(kb.tkb, kb.structure, reasoner_options(o));
  Consequences c;
  try {
    c = propagate(r, kb.structure);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kInconsistent) throw;
    print(o, {{"command", "propagate"}, {"consistent", false}}, "inconsistent\n");
    throw Negative{};
  }
  const GroundTheory& gt = r.theory();
  json atoms = json::array();
  std::ostringstream text;
  for (size_t a = 0; a < gt.atoms.size(); ++a) {
    if (!c.decided(static_cast<int>(a))) continue;
    const bool value = c.status[a] == AtomStatus::kTrue;
    if (gt.atoms[a].kind == AtomKind::kEquality && !value) continue;
    atoms.push_back({{"atom", gt.atoms[a].text}, {"value", value}, {"user", static_cast<bool>(c.user[a])}});
    text << gt.atoms[a].text << ": " << status_text(c.status[a]) << (c.user[a] ? " (user)" : "") << "\n";
  }
  print(o, {{"command", "propagate"}, {"consistent", true}, {"atoms", atoms}}, text.str());
}

void run_relevance(const Options& o) {
  Loaded kb = load(o);
  Reasoner r(kb.tkb, kb.structure, reasoner_options(o));
  Relevance rel;
  try {
    rel = relevance(r, kb.structure);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kInconsistent) throw;
    print(o, {{"command", "relevance"}, {"consistent", false}}, "inconsistent\n");
    throw Negative{};
  }
  const GroundTheory& gt = r.theory();
  json relevant = json::array(), irrelevant = json::array();
  std::ostringstream text;
  for (size_t a = 0; a < gt.atoms.size(); ++a) {
    (rel.relevant[a] ? relevant : irrelevant).push_back(gt.atoms[a].text);
    if (!rel.relevant[a]) text << "irrelevant: " << gt.atoms[a].text << "\n";
  }
  if (irrelevant.empty()) text << "every atom is relevant\n";
  print(o, {{"command", "relevance"}, {"consistent", true}, {"relevant", relevant}, {"irrelevant", irrelevant}},
        text.str());
}

void run_explain(const Options& o, const std::string& literal) {
  Loaded kb = load(o);
  ConsultOptions options;
  options.reasoner = reasoner_options(o);
  options.eager_relevance = false;
  Explanation e;
  bool conflict = false;
  try {
    // Build the session without the asserted facts, then add them so that
    // inconsistent inputs are reported as conflicts.
    ConsultSession session(kb.tkb, build_structure(kb.tkb), options);
    for (const auto& [term, value] : kb.structure.user_facts()) session.assert_fact(term, value);
    e = session.explain(literal);
  } catch (const ConflictError& c) {
    e = c.explanation();
    conflict = true;
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::kNotAConsequence) throw;
    print(o, {{"command", "explain"}, {"literal", literal}, {"consistent", true}, {"consequence", false}},
          literal + " is not a consequence\n");
    throw Negative{};
  }
  json items = json::array();
  std::ostringstream text;
  for (const ExplanationItem& item : e.items) {
    items.push_back({{"label", item.label}, {"source", item.source}});
    text << item.label << ": " << item.source << "\n";
  }
  if (conflict) {
    print(o, {{"command", "explain"}, {"literal", literal}, {"consistent", false}, {"explanation", items}},
              "the asserted facts are inconsistent:\n" + text.str());
    throw Negative{};
  }
  print(o, {{"command", "explain"}, {"literal", literal}, {"consistent", true}, {"consequence", true},
            {"explanation", items}},
        text.str());
}

void run_optimize(const Options& o, const std::string& term, bool maximize) {
  Loaded kb = load(o);
  Reasoner r(kb.tkb, kb.structure, reasoner_options(o));
  const std::string direction = maximize ? "maximize" : "minimize";
  try {
    Optimum opt = optimize(r, kb.structure, check_expr(*kb.tkb, parse_expr(term)),
                           maximize ? Direction::kMaximize : Direction::kMinimize);
    print(o,
          {{"command", "optimize"}, {"term", term}, {"direction", direction},
           {"value", value_json(kb.structure, opt.value)}, {"model", model_json(kb.structure, opt.witness)}},
          term + " = " + kb.structure.value_to_string(opt.value) + "\n" + model_to_string(kb.structure, opt.witness));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kInconsistent && e.kind() != ErrorKind::kUnbounded) throw;
    const std::string outcome = e.kind() == ErrorKind::kInconsistent ? "inconsistent" : "unbounded";
    print(o, {{"command", "optimize"}, {"term", term}, {"direction", direction}, {"outcome", outcome}},
          outcome + "\n");
    throw Negative{};
  }
}

std::vector<InputBound> parse_bounds(const std::vector<std::string>& specs) {
  std::vector<InputBound> out;
  for (const std::string& spec : specs) {
    const size_t eq = spec.rfind('='), dots = spec.find("..", eq == std::string::npos ? 0 : eq);
    std::optional<Number> lo, hi;
    if (eq != std::string::npos && dots != std::string::npos) {
      lo = parse_number(spec.substr(eq + 1, dots - eq - 1));
      hi = parse_number(spec.substr(dots + 2));
    }
    if (!lo || !hi) throw Error(ErrorKind::kInvalidArgument, "bounds must look like 'BMI=0..100', got '" + spec + "'");
    out.push_back({spec.substr(0, eq), *lo, *hi});
  }
  return out;
}

void run_dmn(const Options& o, const std::string& action, const std::string& table_file,
             const std::vector<std::string>& bounds) {
  Loaded kb = load(o);
  DecisionTable table = parse_table(read_file(table_file));
  if (action == "translate") {
    const std::string text = to_definition_text(table, *kb.tkb);
    print(o, {{"command", "dmn translate"}, {"table", table.name}, {"definition", text}}, text);
    return;
  }
  TableCheck c = check_table(table, kb.tkb, kb.structure, parse_bounds(bounds));
  auto witness_json = [](const TableWitness& w) { return json{{"inputs", w.inputs}, {"rows", w.rows}}; };
  auto witness_text = [](const TableWitness& w) {
    std::string out;
    for (const auto& [input, value] : w.inputs) out += (out.empty() ? "" : ", ") + input + " = " + value;
    return out;
  };
  json j = {{"command", "dmn check"}, {"table", table.name}, {"complete", c.complete}, {"unique", c.unique}};
  std::ostringstream text;
  if (c.complete) {
    text << "complete\n";
  } else {
    j["gap"] = witness_json(*c.gap);
    text << "incomplete: no row matches " << witness_text(*c.gap) << "\n";
  }
  if (c.unique) {
    text << "unique\n";
  } else {
    j["overlap"] = witness_json(*c.overlap);
    text << "overlap: rows " << c.overlap->rows[0] << " and " << c.overlap->rows[1] << " both match "
         << witness_text(*c.overlap) << "\n";
  }
  print(o, j, text.str());
  if (!c.complete || !c.unique) throw Negative{};
}

int run_serve(const Options& o, const std::string& host, int port, int idle_minutes) {
  ServiceConfig config;
  config.reasoner = reasoner_options(o);
  config.idle_timeout = std::chrono::minutes(idle_minutes);
  Service service(config);
  std::cerr << "fodot: serving on http://" << host << ":" << port << "\n";
  if (serve(service, host, port) != 0) {
    std::cerr << "fodot: cannot listen on " << host << ":" << port << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reasoning over FO(.) knowledge bases"};
  app.require_subcommand(1, 1);
  Options o;
  app.add_flag("--json", o.json_output, "Print machine-readable JSON");
  app.add_option("--solver", o.solver, "SMT solver command line (default: z3 -in)");
  app.add_option("--timeout", o.timeout_ms, "Solver timeout per query in milliseconds")->check(CLI::NonNegativeNumber);

  std::string single_kb;
  auto add_kb = [&](CLI::App* sub, bool many) {
    if (many) {
      sub->add_option("kb", o.files, "Knowledge base files")->required()->check(CLI::ExistingFile);
    } else {
      sub->add_option("kb", single_kb, "Knowledge base file")->required()->check(CLI::ExistingFile);
    }
    sub->add_option("--assert", o.asserts, "Fact 'term=value' (or 'term' / '~term' for Booleans)");
  };
  CLI::App* check = app.add_subcommand("check", "Is there a model?");
  add_kb(check, true);
  CLI::App* expand = app.add_subcommand("expand", "Enumerate models");
  add_kb(expand, true);
  size_t max_models = 10;
  expand->add_option("--max-models", max_models, "Maximum number of models")->check(CLI::PositiveNumber);
  CLI::App* prop = app.add_subcommand("propagate", "Literals true in every model");
  add_kb(prop, true);
  CLI::App* rel = app.add_subcommand("relevance", "Atoms that cannot affect satisfaction");
  add_kb(rel, true);
  CLI::App* explain = app.add_subcommand("explain", "Minimal reason for a consequence");
  add_kb(explain, false);
  std::string literal;
  explain->add_option("literal", literal, "Consequence to explain, e.g. '18 =< age()'")->required();
  CLI::App* optimize = app.add_subcommand("optimize", "Minimise or maximise a numeric term");
  add_kb(optimize, false);
  std::string term;
  bool maximize = false;
  optimize->add_option("term", term, "Numeric term, e.g. 'age()'")->required();
  optimize->add_flag("--maximize", maximize, "Maximise instead of minimise");

  CLI::App* dmn = app.add_subcommand("dmn", "Decision tables");
  dmn->require_subcommand(1, 1);
  std::string table_file;
  std::vector<std::string> bounds;
  for (const char* name : {"translate", "check"}) {
    CLI::App* sub = dmn->add_subcommand(name, std::string(name) == "translate" ? "Print the FO(.) definition"
                                                                               : "Check completeness and overlap");
    sub->add_option("table", table_file, "Table file")->required()->check(CLI::ExistingFile);
    sub->add_option("--vocab", o.files, "Knowledge base declaring the vocabulary")->required()->check(CLI::ExistingFile);
    if (std::string(name) == "check") {
      sub->add_option("--bound", bounds, "Range of a numeric input, e.g. 'BMI=0..100'");
    }
  }

  CLI::App* serve_cmd = app.add_subcommand("serve", "Run the HTTP/JSON service");
  int port = 8080;
  std::string host = "127.0.0.1";
  int idle_minutes = 30;
  serve_cmd->add_option("--port", port, "Port")->check(CLI::Range(1, 65535));
  serve_cmd->add_option("--host", host, "Address to bind");
  serve_cmd->add_option("--idle-minutes", idle_minutes, "Session idle timeout")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (!single_kb.empty()) o.files.push_back(single_kb);
  try {
    if (*check) run_check(o);
    if (*expand) run_expand(o, max_models);
    if (*prop) run_propagate(o);
    if (*rel) run_relevance(o);
    if (*explain) run_explain(o, literal);
    if (*optimize) run_optimize(o, term, maximize);
    if (*dmn) run_dmn(o, dmn->get_subcommands().front()->get_name(), table_file, bounds);
    if (*serve_cmd) return run_serve(o, host, port, idle_minutes);
  } catch (const Negative&) {
    return 1;
  } catch (const Error& e) {
    std::cerr << "fodot: " << error_kind_name(e.kind()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "fodot: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
