#include "fodot/dmn.h"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "fodot/error.h"
#include "fodot/ground.h"
#include "fodot/parser.h"
#include "fodot/smt.h"

namespace fodot {

namespace {

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

[[noreturn]] void malformed(size_t line, const std::string& message) {
  throw Error(ErrorKind::kMalformedTable, "line " + std::to_string(line) + ": " + message);
}

bool starts_with(const std::string& s, std::string_view prefix) { return s.compare(0, prefix.size(), prefix) == 0; }

Condition parse_condition(const std::string& cell, size_t line) {
  Condition c;
  c.text = cell;
  if (cell.empty() || cell == "-") return c;
  const char first = cell.front(), last = cell.back();
  const size_t dots = cell.find("..");
  if ((first == '[' || first == '(') && (last == ']' || last == ')') && dots != std::string::npos) {
    c.kind = Condition::Kind::kInterval;
    c.lo_closed = first == '[';
    c.hi_closed = last == ']';
    c.lo = trim(std::string_view(cell).substr(1, dots - 1));
    c.hi = trim(std::string_view(cell).substr(dots + 2, cell.size() - dots - 3));
    if (c.lo.empty() || c.hi.empty()) malformed(line, "interval '" + cell + "' needs two endpoints");
    return c;
  }
  static const std::vector<std::pair<std::string_view, CmpOp>> kOps = {
      {"<=", CmpOp::kLe}, {"=<", CmpOp::kLe}, {">=", CmpOp::kGe}, {"!=", CmpOp::kNe},
      {"~=", CmpOp::kNe}, {"\xE2\x89\xA4", CmpOp::kLe}, {"\xE2\x89\xA5", CmpOp::kGe},
      {"\xE2\x89\xA0", CmpOp::kNe}, {"<", CmpOp::kLt}, {">", CmpOp::kGt}, {"=", CmpOp::kEq},
  };
  for (const auto& [text, op] : kOps) {
    if (!starts_with(cell, text)) continue;
    c.kind = Condition::Kind::kCompare;
    c.op = op;
    c.value = trim(std::string_view(cell).substr(text.size()));
    if (c.value.empty()) malformed(line, "comparison '" + cell + "' has no value");
    return c;
  }
  c.kind = Condition::Kind::kValues;
  c.values = split(cell, ',');
  for (const std::string& v : c.values) {
    if (v.empty()) malformed(line, "empty value in '" + cell + "'");
  }
  return c;
}

// `BMI` names the nullary symbol BMI(); anything else is taken as written.
std::string normalize_term(const std::string& expr, const TypedKB& tkb) {
  ExprPtr e = parse_expr(expr);
  if (e->kind == ExprKind::kName) {
    auto sym = tkb.table.find_symbol(e->name);
    if (sym && tkb.table.symbol(*sym).args.empty()) return e->name + "()";
  }
  return expr;
}

void require_symbols(const ExprPtr& e, const TypedKB& tkb, const std::string& where) {
  if (e->kind == ExprKind::kApply && !tkb.table.find_symbol(e->name)) {
    throw Error(ErrorKind::kUnknownSymbol, "unknown symbol '" + e->name + "' in " + where);
  }
  if (e->kind == ExprKind::kName && !tkb.table.find_symbol(e->name) && !tkb.table.element_type(e->name)) {
    throw Error(ErrorKind::kUnknownSymbol, "unknown symbol '" + e->name + "' in " + where);
  }
  for (const ExprPtr& a : e->args) require_symbols(a, tkb, where);
}

std::string row_body(const DecisionTable& t, size_t row, const std::vector<std::string>& inputs) {
  std::vector<std::string> parts;
  for (size_t i = 0; i < t.inputs.size(); ++i) {
    const Condition& c = t.inputs[i].conditions[row];
    if (c.kind == Condition::Kind::kAny) continue;
    std::string text = condition_text(c, inputs[i]);
    if (c.kind == Condition::Kind::kValues && c.values.size() > 1) text = "(" + text + ")";
    parts.push_back(text);
  }
  if (parts.empty()) return "true";
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) out += (i ? " & " : "") + parts[i];
  return out;
}

std::vector<std::string> normalized_inputs(const DecisionTable& t, const TypedKB& tkb) {
  std::vector<std::string> out;
  for (const TableInput& in : t.inputs) {
    require_symbols(parse_expr(in.expr), tkb, "input '" + in.expr + "'");
    out.push_back(normalize_term(in.expr, tkb));
  }
  return out;
}

}  // namespace

DecisionTable parse_table(std::string_view text) {
  DecisionTable t;
  std::istringstream in{std::string(text)};
  std::string raw;
  size_t line = 0;
  int stage = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string l = trim(raw);
    if (l.empty() || starts_with(l, "//") || starts_with(l, "#")) continue;
    if (stage == 0) {
      std::istringstream words(l);
      std::string keyword, policy, extra;
      words >> keyword >> t.name >> policy >> extra;
      if (keyword != "table" || t.name.empty() || policy.empty() || !extra.empty()) {
        malformed(line, "expected 'table <Name> <HitPolicy>'");
      }
      if (policy != "U") {
        throw Error(ErrorKind::kUnknownHitPolicy, "hit policy '" + policy + "' is not supported (only U)");
      }
      stage = 1;
    } else if (stage == 1) {
      const size_t semi = l.find(';');
      if (!starts_with(l, "in:") || semi == std::string::npos) malformed(line, "expected 'in: ... ; out: ...'");
      std::string outs = trim(std::string_view(l).substr(semi + 1));
      if (!starts_with(outs, "out:")) malformed(line, "expected 'out:' after ';'");
      std::string ins = trim(std::string_view(l).substr(3, semi - 3));
      if (!ins.empty() && ins != "-") {
        for (std::string& e : split(ins, '|')) {
          if (e.empty()) malformed(line, "empty input expression");
          t.inputs.push_back({std::move(e), {}});
        }
      }
      for (std::string& e : split(std::string_view(outs).substr(4), '|')) {
        if (e.empty()) malformed(line, "empty output symbol");
        t.outputs.push_back({std::move(e), {}});
      }
      stage = 2;
    } else {
      std::vector<std::string> cells = split(l, '|');
      if (cells.size() != t.inputs.size() + t.outputs.size()) {
        malformed(line, "row has " + std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(t.inputs.size() + t.outputs.size()));
      }
      for (size_t i = 0; i < t.inputs.size(); ++i) t.inputs[i].conditions.push_back(parse_condition(cells[i], line));
      for (size_t o = 0; o < t.outputs.size(); ++o) {
        const std::string& v = cells[t.inputs.size() + o];
        if (v.empty() || v == "-") malformed(line, "output cells need a value");
        t.outputs[o].values.push_back(v);
      }
      ++t.rows;
    }
  }
  if (stage < 2) malformed(line, "missing table header");
  if (t.rows == 0) malformed(line, "the table has no rows");
  return t;
}

std::string condition_text(const Condition& c, const std::string& input) {
  switch (c.kind) {
    case Condition::Kind::kAny:
      return "true";
    case Condition::Kind::kCompare:
      return input + " " + cmp_op_text(c.op) + " " + c.value;
    case Condition::Kind::kInterval:
      return c.lo + (c.lo_closed ? " =< " : " < ") + input + (c.hi_closed ? " =< " : " < ") + c.hi;
    case Condition::Kind::kValues: {
      std::string out;
      for (size_t i = 0; i < c.values.size(); ++i) out += (i ? " | " : "") + input + " = " + c.values[i];
      return out;
    }
  }
  return "true";
}

std::string to_definition_text(const DecisionTable& t, const TypedKB& tkb) {
  const std::vector<std::string> inputs = normalized_inputs(t, tkb);
  std::ostringstream out;
  out << "{\n";
  for (const TableOutput& o : t.outputs) {
    ExprPtr head = parse_expr(normalize_term(o.symbol, tkb));
    require_symbols(head, tkb, "output '" + o.symbol + "'");
    if (head->kind != ExprKind::kApply) {
      throw Error(ErrorKind::kUnknownSymbol, "output '" + o.symbol + "' is not a symbol");
    }
    const bool predicate = tkb.table.symbol(*tkb.table.find_symbol(head->name)).result == kBoolType;
    const std::string head_text = print_expr(head);
    for (size_t r = 0; r < t.rows; ++r) {
      const std::string body = row_body(t, r, inputs);
      if (predicate) {
        if (o.values[r] == "false") continue;
        if (o.values[r] != "true") {
          throw Error(ErrorKind::kMalformedTable, "output '" + o.symbol + "' is Boolean: use true or false");
        }
        out << "  " << head_text << " <- " << body << ".\n";
      } else {
        out << "  " << head_text << " = " << o.values[r] << " <- " << body << ".\n";
      }
    }
  }
  out << "}\n";
  return out.str();
}

Definition to_definition(const DecisionTable& t, const TypedKB& tkb) {
  KnowledgeBase kb = parse_kb("theory " + t.name + ":" + tkb.vocabulary + " {\n" + to_definition_text(t, tkb) + "}\n");
  return std::get<Definition>(kb.theories.at(0).statements.at(0));
}

TableCheck check_table(const DecisionTable& t, std::shared_ptr<const TypedKB> tkb, const PartialStructure& s,
                       const std::vector<InputBound>& bounds) {
  const std::vector<std::string> inputs = normalized_inputs(t, *tkb);
  GroundTheory gt = ground_theory(*tkb, s);
  auto ground = [&](const std::string& text) {
    GroundedExpr g = ground_expr(gt, check_expr(*tkb, parse_expr(text)), /*allow_new_terms=*/true);
    g.side.insert(g.side.begin(), g.expr);
    return g_and(std::move(g.side));
  };

  std::vector<GExpr> input_terms, space;
  for (size_t i = 0; i < inputs.size(); ++i) {
    ExprPtr typed = check_expr(*tkb, parse_expr(inputs[i]));
    GroundedExpr g = ground_expr(gt, typed, true);
    input_terms.push_back(g.expr);
    for (const GExpr& side : g.side) space.push_back(side);
    if (!tkb->table.is_numeric(typed->type) || s.has_extension(typed->type)) continue;
    auto b = std::find_if(bounds.begin(), bounds.end(), [&](const InputBound& ib) {
      return ib.input == t.inputs[i].expr || ib.input == inputs[i];
    });
    if (b == bounds.end()) {
      throw Error(ErrorKind::kUnboundedInput, "input '" + t.inputs[i].expr + "' needs bounds");
    }
    const TypeId sort = g.expr->sort;
    space.push_back(g_cmp(CmpOp::kLe, g_const(Value::of_number(b->lo), sort), g.expr));
    space.push_back(g_cmp(CmpOp::kLe, g.expr, g_const(Value::of_number(b->hi), sort)));
  }
  std::vector<GExpr> bodies;
  for (size_t r = 0; r < t.rows; ++r) {
    bodies.push_back(ground(row_body(t, r, inputs)));
  }

  SolverSession session(SolverConfig::from_environment());
  session.load(gt, /*bare=*/true);
  session.assert_formula(g_and(space));
  auto witness = [&](const GModel& m, std::vector<size_t> rows) {
    TableWitness w;
    for (size_t i = 0; i < inputs.size(); ++i) {
      w.inputs[t.inputs[i].expr] = s.value_to_string(g_eval(input_terms[i], m));
    }
    w.rows = std::move(rows);
    return w;
  };
  auto check = [&](const GExpr& f) {
    SolverAnswer a = session.check_under({{"query", f}}, true, false);
    if (a.status == SatStatus::kUnknown) throw Error(ErrorKind::kSolverUnknown, "the solver gave up on the table");
    return a;
  };

  TableCheck out;
  std::vector<GExpr> none;
  for (const GExpr& b : bodies) none.push_back(g_not(b));
  SolverAnswer gap = check(g_and(none));
  if (gap.status == SatStatus::kSat) {
    out.complete = false;
    out.gap = witness(*gap.model, {});
  }
  for (size_t i = 0; i < bodies.size() && out.unique; ++i) {
    for (size_t j = i + 1; j < bodies.size(); ++j) {
      SolverAnswer both = check(g_and({bodies[i], bodies[j]}));
      if (both.status != SatStatus::kSat) continue;
      out.unique = false;
      out.overlap = witness(*both.model, {i + 1, j + 1});
      break;
    }
  }
  return out;
}

}  // namespace fodot
