// Python bindings: knowledge bases, the reasoning tasks, consultation
// sessions and decision tables.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fodot/consult.h"
#include "fodot/dmn.h"
#include "fodot/inference.h"
#include "fodot/parser.h"

namespace py = pybind11;
using namespace fodot;

namespace {

// Exact numbers become int or fractions.Fraction; elements become str.
py::object to_python(const PartialStructure& s, const Value& v) {
  switch (v.kind) {
    case Value::Kind::kBool: return py::bool_(v.boolean);
    case Value::Kind::kNumber: {
      py::int_ num(py::str(boost::multiprecision::numerator(v.number).str()));
      if (is_integer(v.number)) return std::move(num);
      py::int_ den(py::str(boost::multiprecision::denominator(v.number).str()));
      return py::module_::import("fractions").attr("Fraction")(num, den);
    }
    case Value::Kind::kElement: return py::str(s.value_to_string(v));
  }
  return py::none();
}

py::dict model_dict(const PartialStructure& s, const Model& m) {
  py::dict out;
  for (const auto& [term, value] : m.values) out[py::str(s.term_to_string(term))] = to_python(s, value);
  return out;
}

py::list explanation_list(const Explanation& e) {
  py::list out;
  for (const ExplanationItem& item : e.items) out.append(py::make_tuple(item.label, item.source));
  return out;
}

class KB {
 public:
  explicit KB(const std::string& source)
      : tkb_(std::make_shared<const TypedKB>(check(parse_kb(source)))), base_(build_structure(tkb_)) {}

  PartialStructure with_facts(const std::vector<std::string>& facts) const {
    PartialStructure s = base_;
    for (const std::string& f : facts) {
      auto [term, value] = parse_fact(s, f);
      s = assert_fact(s, term, value);
    }
    return s;
  }

  std::shared_ptr<const TypedKB> tkb() const { return tkb_; }
  const PartialStructure& base() const { return base_; }

  std::vector<std::string> symbols() const {
    std::vector<std::string> out;
    for (size_t i = 0; i < tkb_->table.symbol_count(); ++i) out.push_back(tkb_->table.symbol(static_cast<int>(i)).name);
    return out;
  }

  bool model_check(const std::vector<std::string>& facts) const {
    PartialStructure s = with_facts(facts);
    Reasoner r(tkb_, s);
    return fodot::model_check(r, s);
  }

  py::list expand(const std::vector<std::string>& facts, size_t max_models) const {
    PartialStructure s = with_facts(facts);
    Reasoner r(tkb_, s);
    py::list out;
    for (const Model& m : model_expand(r, s, max_models)) out.append(model_dict(s, m));
    return out;
  }

  // Decided atoms: text -> truth value.
  py::dict propagate(const std::vector<std::string>& facts) const {
    PartialStructure s = with_facts(facts);
    Reasoner r(tkb_, s);
    Consequences c = fodot::propagate(r, s);
    py::dict out;
    for (size_t a = 0; a < c.status.size(); ++a) {
      if (c.decided(static_cast<int>(a))) out[py::str(r.theory().atoms[a].text)] = c.status[a] == AtomStatus::kTrue;
    }
    return out;
  }

  std::vector<std::string> irrelevant(const std::vector<std::string>& facts) const {
    PartialStructure s = with_facts(facts);
    Reasoner r(tkb_, s);
    Relevance rel = relevance(r, s);
    std::vector<std::string> out;
    for (size_t a = 0; a < rel.relevant.size(); ++a) {
      if (!rel.relevant[a]) out.push_back(r.theory().atoms[a].text);
    }
    return out;
  }

  py::tuple optimize(const std::string& term, const std::vector<std::string>& facts, bool maximize) const {
    PartialStructure s = with_facts(facts);
    Reasoner r(tkb_, s);
    Optimum o = fodot::optimize(r, s, check_expr(*tkb_, parse_expr(term)),
                                maximize ? Direction::kMaximize : Direction::kMinimize);
    return py::make_tuple(to_python(s, o.value), model_dict(s, o.witness));
  }

  py::list explain(const std::string& literal, const std::vector<std::string>& facts) const {
    ConsultOptions options;
    options.eager_relevance = false;
    ConsultSession session(tkb_, with_facts(facts), options);
    return explanation_list(session.explain(literal));
  }

 private:
  std::shared_ptr<const TypedKB> tkb_;
  PartialStructure base_;
};

class Session {
 public:
  explicit Session(const KB& kb) : session_(kb.tkb(), kb.base()) {}

  py::dict state() const {
    py::dict out;
    const GroundTheory& gt = session_.theory();
    for (size_t a = 0; a < gt.atoms.size(); ++a) {
      out[py::str(gt.atoms[a].text)] = display_status_name(session_.status(static_cast<int>(a)));
    }
    return out;
  }

  std::vector<std::string> changed(const std::vector<int>& atoms) const {
    std::vector<std::string> out;
    for (int a : atoms) out.push_back(session_.theory().atoms[a].text);
    return out;
  }

  std::vector<std::string> assert_fact(const std::string& fact) { return changed(session_.assert_text(fact)); }
  std::vector<std::string> retract(const std::string& term) { return changed(session_.retract_text(term)); }
  py::list explain(const std::string& literal) { return explanation_list(session_.explain(literal)); }
  py::tuple optimize(const std::string& term, bool maximize) {
    Optimum o = session_.optimize(term, maximize ? Direction::kMaximize : Direction::kMinimize);
    return py::make_tuple(to_python(session_.structure(), o.value), model_dict(session_.structure(), o.witness));
  }
  py::dict facts() const {
    py::dict out;
    const PartialStructure& s = session_.structure();
    for (const auto& [term, value] : s.user_facts()) out[py::str(s.term_to_string(term))] = to_python(s, value);
    return out;
  }

 private:
  ConsultSession session_;
};

std::string translate_table(const std::string& table, const KB& kb) {
  return to_definition_text(parse_table(table), *kb.tkb());
}

py::dict check_decision_table(const std::string& table, const KB& kb,
                              const std::map<std::string, std::pair<std::string, std::string>>& bounds) {
  std::vector<InputBound> parsed;
  for (const auto& [input, range] : bounds) {
    auto lo = parse_number(range.first), hi = parse_number(range.second);
    if (!lo || !hi) throw Error(ErrorKind::kInvalidArgument, "bad bounds for '" + input + "'");
    parsed.push_back({input, *lo, *hi});
  }
  TableCheck c = check_table(parse_table(table), kb.tkb(), kb.base(), parsed);
  auto witness = [](const std::optional<TableWitness>& w) -> py::object {
    if (!w) return py::none();
    py::dict d;
    d["inputs"] = w->inputs;
    d["rows"] = w->rows;
    return std::move(d);
  };
  py::dict out;
  out["complete"] = c.complete;
  out["unique"] = c.unique;
  out["gap"] = witness(c.gap);
  out["overlap"] = witness(c.overlap);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "FO(.) reasoning engine";

  static py::exception<Error> error(m, "FodotError");
  static py::exception<ConflictError> conflict(m, "ConflictError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConflictError& e) {
      PyObject* type = conflict.ptr();
      py::object value = py::reinterpret_steal<py::object>(PyObject_CallFunction(type, "s", e.what()));
      value.attr("kind") = error_kind_name(e.kind());
      value.attr("explanation") = explanation_list(e.explanation());
      PyErr_SetObject(type, value.ptr());
    } catch (const Error& e) {
      PyObject* type = error.ptr();
      py::object value = py::reinterpret_steal<py::object>(PyObject_CallFunction(type, "s", e.what()));
      value.attr("kind") = error_kind_name(e.kind());
      PyErr_SetObject(type, value.ptr());
    }
  });

  py::class_<KB>(m, "KnowledgeBase")
      .def(py::init<const std::string&>(), py::arg("source"))
      .def_property_readonly("symbols", &KB::symbols)
      .def("model_check", &KB::model_check, py::arg("facts") = std::vector<std::string>{})
      .def("expand", &KB::expand, py::arg("facts") = std::vector<std::string>{}, py::arg("max_models") = 10)
      .def("propagate", &KB::propagate, py::arg("facts") = std::vector<std::string>{})
      .def("irrelevant", &KB::irrelevant, py::arg("facts") = std::vector<std::string>{})
      .def("optimize", &KB::optimize, py::arg("term"), py::arg("facts") = std::vector<std::string>{},
           py::arg("maximize") = false)
      .def("explain", &KB::explain, py::arg("literal"), py::arg("facts") = std::vector<std::string>{});

  py::class_<Session>(m, "Session")
      .def(py::init<const KB&>(), py::arg("kb"))
      .def("state", &Session::state)
      .def("facts", &Session::facts)
      .def("assert_fact", &Session::assert_fact, py::arg("fact"))
      .def("retract", &Session::retract, py::arg("term"))
      .def("explain", &Session::explain, py::arg("literal"))
      .def("optimize", &Session::optimize, py::arg("term"), py::arg("maximize") = false);

  m.def("translate_table", &translate_table, py::arg("table"), py::arg("kb"));
  m.def("check_table", &check_decision_table, py::arg("table"), py::arg("kb"),
        py::arg("bounds") = std::map<std::string, std::pair<std::string, std::string>>{});
}
