#include <sstream>

#include "fodot/parser.h"

namespace fodot {

namespace {

// Binding strength; higher binds tighter.
int precedence(const Expr& e) {
  switch (e.kind) {
    case ExprKind::kForall:
    case ExprKind::kExists:
    case ExprKind::kIte:
      return 0;
    case ExprKind::kIff: return 1;
    case ExprKind::kImplies: return 2;
    case ExprKind::kOr: return 3;
    case ExprKind::kAnd: return 4;
    case ExprKind::kCompare: return 5;
    case ExprKind::kAdd:
    case ExprKind::kSub:
      return 6;
    case ExprKind::kMul:
    case ExprKind::kDiv:
      return 7;
    case ExprKind::kNot:
    case ExprKind::kNeg:
      return 8;
    case ExprKind::kNumber:
      // A negative literal prints with a leading '-'.
      return e.number < 0 ? 8 : 9;
    default:
      return 9;
  }
}

void print(std::ostream& out, const Expr& e);

void print_child(std::ostream& out, const Expr& child, bool parens) {
  if (parens) out << "(";
  print(out, child);
  if (parens) out << ")";
}

void print_binders(std::ostream& out, const std::vector<Binder>& binders) {
  for (size_t i = 0; i < binders.size(); ++i) {
    if (i > 0) out << ", ";
    for (size_t j = 0; j < binders[i].vars.size(); ++j) {
      if (j > 0) out << ", ";
      out << binders[i].vars[j];
    }
    out << " in " << print_type(binders[i].type);
  }
}

void print_args(std::ostream& out, const std::vector<ExprPtr>& args, size_t from) {
  out << "(";
  for (size_t i = from; i < args.size(); ++i) {
    if (i > from) out << ", ";
    print(out, *args[i]);
  }
  out << ")";
}

void print(std::ostream& out, const Expr& e) {
  const int prec = precedence(e);
  switch (e.kind) {
    case ExprKind::kBool:
      out << (e.boolean ? "true" : "false");
      return;
    case ExprKind::kNumber:
      out << number_to_string(e.number, e.is_real);
      return;
    case ExprKind::kName:
      out << e.name;
      return;
    case ExprKind::kConceptLit:
      out << "`" << e.name;
      return;
    case ExprKind::kApply:
      out << e.name;
      print_args(out, e.args, 0);
      return;
    case ExprKind::kNot:
    case ExprKind::kNeg: {
      out << (e.kind == ExprKind::kNot ? "~" : "-");
      const Expr& arg = *e.args[0];
      // `-5` would re-parse as a literal, and `--x` is not a token pair we want.
      bool parens = precedence(arg) < prec ||
                    (e.kind == ExprKind::kNeg && (arg.kind == ExprKind::kNumber || arg.kind == ExprKind::kNeg));
      print_child(out, arg, parens);
      return;
    }
    case ExprKind::kAnd:
    case ExprKind::kOr: {
      const char* op = e.kind == ExprKind::kAnd ? " & " : " | ";
      for (size_t i = 0; i < e.args.size(); ++i) {
        if (i > 0) out << op;
        print_child(out, *e.args[i], precedence(*e.args[i]) <= prec);
      }
      return;
    }
    case ExprKind::kImplies:
      print_child(out, *e.args[0], precedence(*e.args[0]) <= prec);
      out << " => ";
      print_child(out, *e.args[1], precedence(*e.args[1]) < prec || precedence(*e.args[1]) == 0);
      return;
    case ExprKind::kIff:
      print_child(out, *e.args[0], precedence(*e.args[0]) < prec || precedence(*e.args[0]) == 0);
      out << " <=> ";
      print_child(out, *e.args[1], precedence(*e.args[1]) <= prec);
      return;
    case ExprKind::kCompare:
      for (size_t i = 0; i < e.args.size(); ++i) {
        if (i > 0) out << " " << cmp_op_text(e.ops[i - 1]) << " ";
        print_child(out, *e.args[i], precedence(*e.args[i]) <= prec);
      }
      return;
    case ExprKind::kAdd:
    case ExprKind::kSub:
    case ExprKind::kMul:
    case ExprKind::kDiv: {
      const char* op = e.kind == ExprKind::kAdd   ? " + "
                       : e.kind == ExprKind::kSub ? " - "
                       : e.kind == ExprKind::kMul ? " * "
                                                  : " / ";
      print_child(out, *e.args[0], precedence(*e.args[0]) < prec);
      out << op;
      print_child(out, *e.args[1], precedence(*e.args[1]) <= prec);
      return;
    }
    case ExprKind::kForall:
    case ExprKind::kExists:
      out << (e.kind == ExprKind::kForall ? "!" : "?");
      print_binders(out, e.binders);
      out << ": ";
      print(out, *e.args[0]);
      return;
    case ExprKind::kCount:
      out << "#{";
      print_binders(out, e.binders);
      out << ": ";
      print(out, *e.args[0]);
      out << "}";
      return;
    case ExprKind::kSum:
    case ExprKind::kMin:
    case ExprKind::kMax:
      out << (e.kind == ExprKind::kSum ? "sum" : e.kind == ExprKind::kMin ? "min" : "max");
      out << "(lambda ";
      print_binders(out, e.binders);
      out << ": ";
      print(out, *e.args[0]);
      out << ")";
      return;
    case ExprKind::kConceptApply:
      out << "$(";
      print(out, *e.args[0]);
      out << ")";
      print_args(out, e.args, 1);
      return;
    case ExprKind::kIte:
      out << "if ";
      print(out, *e.args[0]);
      out << " then ";
      print(out, *e.args[1]);
      out << " else ";
      print(out, *e.args[2]);
      return;
  }
}

void print_enumeration_body(std::ostream& out, const Enumeration& e) {
  if (e.kind == Enumeration::Kind::kFunctionMap && e.entries.size() == 1 && e.entries[0].args.empty()) {
    out << e.entries[0].result->to_string();
    return;
  }
  out << "{";
  if (e.range) {
    out << e.range->first.str() << ".." << e.range->second.str();
  }
  for (size_t i = 0; i < e.entries.size(); ++i) {
    if (i > 0) out << ", ";
    const EnumEntry& entry = e.entries[i];
    if (entry.args.size() == 1) {
      out << entry.args[0].to_string();
    } else {
      out << "(";
      for (size_t j = 0; j < entry.args.size(); ++j) {
        if (j > 0) out << ", ";
        out << entry.args[j].to_string();
      }
      out << ")";
    }
    if (entry.result) out << " -> " << entry.result->to_string();
  }
  out << "}";
}

void print_rule(std::ostream& out, const Rule& r) {
  if (!r.binders.empty()) {
    out << "!";
    print_binders(out, r.binders);
    out << ": ";
  }
  print(out, *r.head);
  if (r.value) {
    out << " = ";
    print_child(out, *r.value, precedence(*r.value) <= 5);
  }
  if (r.body) {
    out << " <- ";
    print(out, *r.body);
  }
  out << ".";
}

}  // namespace

std::string print_type(const TypeRef& t) {
  if (!t.concept_signature) return t.name;
  return t.name + "[" + print_signature(*t.concept_signature) + "]";
}

std::string print_signature(const Signature& s) {
  std::string out;
  if (s.args.empty()) {
    out = "()";
  } else {
    for (size_t i = 0; i < s.args.size(); ++i) {
      if (i > 0) out += " * ";
      out += print_type(s.args[i]);
    }
  }
  return out + " -> " + print_type(s.result);
}

std::string print_expr(const Expr& e) {
  std::ostringstream out;
  print(out, e);
  return out.str();
}

std::string print_expr(const ExprPtr& e) { return e ? print_expr(*e) : std::string(); }

std::string print_rule(const Rule& r) {
  std::ostringstream out;
  print_rule(out, r);
  return out.str();
}

std::string print_kb(const KnowledgeBase& kb) {
  std::ostringstream out;
  bool first_block = true;
  auto separate = [&] {
    if (!first_block) out << "\n";
    first_block = false;
  };
  for (const Vocabulary& v : kb.vocabularies) {
    separate();
    out << "vocabulary " << v.name << " {\n";
    for (const TypeDecl& t : v.types) {
      out << "  type " << t.name;
      if (t.constructors) {
        out << " := ";
        print_enumeration_body(out, *t.constructors);
      }
      out << "\n";
    }
    for (const SymbolDecl& s : v.symbols) {
      out << "  " << s.name << ": " << print_signature(s.signature) << "\n";
    }
    out << "}\n";
  }
  for (const Theory& t : kb.theories) {
    separate();
    out << "theory " << t.name << ":" << t.vocabulary << " {\n";
    for (const Statement& st : t.statements) {
      if (const auto* axiom = std::get_if<Axiom>(&st)) {
        out << "  " << print_expr(*axiom->formula) << ".\n";
      } else {
        const auto& def = std::get<Definition>(st);
        out << "  {\n";
        for (const Rule& r : def.rules) {
          out << "    ";
          print_rule(out, r);
          out << "\n";
        }
        out << "  }\n";
      }
    }
    out << "}\n";
  }
  for (const StructureBlock& s : kb.structures) {
    separate();
    out << "structure " << s.name << ":" << s.vocabulary << " {\n";
    for (const Enumeration& e : s.enumerations) {
      out << "  " << e.target << " := ";
      print_enumeration_body(out, e);
      out << ".\n";
    }
    out << "}\n";
  }
  return out.str();
}

}  // namespace fodot
