#include "fodot/service.h"

#include <httplib.h>

#include <iomanip>
#include <nlohmann/json.hpp>
#include <random>
#include <regex>
#include <sstream>

#include "fodot/parser.h"

namespace fodot {

using nlohmann::json;

struct Service::KbEntry {
  std::string id;
  std::shared_ptr<const TypedKB> tkb;
  PartialStructure structure;
  json meta;
};

struct Service::SessionEntry {
  std::string id;
  std::shared_ptr<KbEntry> kb;
  std::unique_ptr<ConsultSession> session;
  std::mutex mutex;
  std::chrono::steady_clock::time_point last_used;
};

namespace {

// 128 random bits from the operating system, in hex.
std::string new_token() {
  static std::mutex mutex;
  static std::random_device device;
  std::lock_guard<std::mutex> lock(mutex);
  std::ostringstream out;
  for (int i = 0; i < 4; ++i) out << std::hex << std::setw(8) << std::setfill('0') << device();
  return out.str();
}

HttpResponse reply(int status, const json& body) { return {status, body.dump()}; }

HttpResponse error_reply(int status, const std::string& error, const std::string& message) {
  return reply(status, {{"error", error}, {"message", message}});
}

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConflictingAssert: return 409;
    case ErrorKind::kSolverSpawn:
    case ErrorKind::kSolverProtocol:
    case ErrorKind::kSolverUnknown: return 500;
    default: return 422;
  }
}

json value_json(const PartialStructure& s, const Value& v) {
  switch (v.kind) {
    case Value::Kind::kBool: return v.boolean;
    case Value::Kind::kNumber:
      if (is_integer(v.number) && abs(v.number) < Number(BigInt(1) << 53)) {
        return v.number.convert_to<long long>();
      }
      return to_double(v.number);
    case Value::Kind::kElement: return s.value_to_string(v);
  }
  return nullptr;
}

std::string value_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

json explanation_json(const Explanation& e) {
  json items = json::array();
  for (const ExplanationItem& item : e.items) items.push_back({{"label", item.label}, {"source", item.source}});
  return items;
}

json model_json(const PartialStructure& s, const Model& m) {
  json out = json::object();
  for (const auto& [term, value] : m.values) out[s.term_to_string(term)] = value_json(s, value);
  return out;
}

json build_meta(const std::string& id, const TypedKB& tkb, const PartialStructure& s) {
  const TypeTable& table = tkb.table;
  const std::vector<int> defined = defined_symbols(tkb);
  json symbols = json::array();
  for (size_t i = 0; i < table.symbol_count(); ++i) {
    const int sym = static_cast<int>(i);
    const SymbolInfo& info = table.symbol(sym);
    json args = json::array();
    std::string signature = info.args.empty() ? "()" : "";
    for (size_t a = 0; a < info.args.size(); ++a) {
      args.push_back(table.type(info.args[a]).name);
      signature += (a ? " * " : "") + table.type(info.args[a]).name;
    }
    signature += " -> " + table.type(info.result).name;
    json entry = {{"name", info.name},
                  {"signature", signature},
                  {"args", args},
                  {"result", table.type(info.result).name}};
    if (const TypeExtension* ext = s.extension(info.result)) {
      json values = json::array();
      for (const Value& v : ext->elements) values.push_back(value_json(s, v));
      entry["extension"] = values;
    }
    const bool is_defined = std::find(defined.begin(), defined.end(), sym) != defined.end();
    entry["status"] = s.is_enumerated(sym) ? "enumerated" : is_defined ? "defined" : "open";
    if (auto tuples = s.tuples(sym)) {
      json terms = json::array();
      for (auto& t : *tuples) terms.push_back(s.term_to_string(GroundTerm{sym, std::move(t)}));
      entry["terms"] = terms;
    }
    symbols.push_back(std::move(entry));
  }
  return {{"kb_id", id}, {"vocabulary", tkb.vocabulary}, {"symbols", symbols}};
}

json state_json(const std::string& id, const std::string& kb_id, ConsultSession& c) {
  const GroundTheory& gt = c.theory();
  const PartialStructure& s = c.structure();
  const Consequences& cons = c.consequences();
  json facts = json::object();
  for (const auto& [term, value] : s.user_facts()) facts[s.term_to_string(term)] = value_json(s, value);
  json atoms = json::array();
  for (size_t a = 0; a < gt.atoms.size(); ++a) {
    atoms.push_back({{"atom", gt.atoms[a].text}, {"status", display_status_name(c.status(static_cast<int>(a)))}});
  }
  json terms = json::array();
  const Relevance& rel = c.relevance();
  for (size_t t = 0; t < gt.terms.size(); ++t) {
    const TermInfo& info = gt.terms[t];
    json entry = {{"term", info.text}};
    auto fact = s.user_facts().find(info.term);
    auto value = cons.values.find(static_cast<int>(t));
    if (fact != s.user_facts().end()) {
      entry["status"] = "user";
      entry["value"] = value_json(s, fact->second);
    } else if (value != cons.values.end()) {
      entry["status"] = "propagated";
      entry["value"] = value_json(s, value->second);
    } else {
      entry["status"] = rel.relevant_terms[t] ? "unknown" : "irrelevant";
    }
    terms.push_back(std::move(entry));
  }
  return {{"session_id", id}, {"kb_id", kb_id}, {"facts", facts}, {"atoms", atoms}, {"terms", terms}};
}

const json& require(const json& body, const char* field) {
  if (!body.contains(field)) throw Error(ErrorKind::kInvalidArgument, std::string("missing field '") + field + "'");
  return body.at(field);
}

std::string require_string(const json& body, const char* field) {
  const json& v = require(body, field);
  if (!v.is_string()) throw Error(ErrorKind::kInvalidArgument, std::string("field '") + field + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

Service::Service(ServiceConfig config) : config_(std::move(config)) {}
Service::~Service() = default;

size_t Service::expire_idle() {
  const auto now = config_.clock();
  std::lock_guard<std::mutex> lock(mutex_);
  size_t dropped = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    std::unique_lock<std::mutex> busy(it->second->mutex, std::try_to_lock);
    if (busy.owns_lock() && now - it->second->last_used > config_.idle_timeout) {
      busy.unlock();
      it = sessions_.erase(it);
      ++dropped;
    } else {
      ++it;
    }
  }
  return dropped;
}

size_t Service::session_count() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return sessions_.size();
}

HttpResponse Service::handle(const std::string& method, const std::string& path, const std::string& body) {
  expire_idle();
  try {
    return route(method, path, body);
  } catch (const ConflictError& e) {
    return reply(409, {{"error", error_kind_name(e.kind())},
                       {"message", e.what()},
                       {"explanation", explanation_json(e.explanation())}});
  } catch (const Error& e) {
    json out = {{"error", error_kind_name(e.kind())}, {"message", e.what()}};
    if (!e.diagnostics().empty()) {
      json diags = json::array();
      for (const Diagnostic& d : e.diagnostics()) diags.push_back(d.to_string());
      out["diagnostics"] = diags;
    }
    return reply(status_for(e.kind()), out);
  } catch (const json::exception& e) {
    return error_reply(422, "InvalidArgument", std::string("malformed JSON: ") + e.what());
  }
}

HttpResponse Service::route(const std::string& method, const std::string& path, const std::string& body) {
  static const std::regex kKbMeta(R"(^/kb/([0-9a-f]+)/meta$)");
  static const std::regex kSession(R"(^/session/([0-9a-f]+)$)");
  static const std::regex kSessionOp(R"(^/session/([0-9a-f]+)/(state|edit|explain|optimize|models)$)");
  auto parse_body = [&] { return body.empty() ? json::object() : json::parse(body); };
  std::smatch m;

  if (method == "POST" && path == "/kb") {
    const std::string source = require_string(parse_body(), "source");
    auto entry = std::make_shared<KbEntry>();
    entry->id = new_token();
    entry->tkb = std::make_shared<const TypedKB>(check(parse_kb(source)));
    entry->structure = build_structure(entry->tkb);
    entry->meta = build_meta(entry->id, *entry->tkb, entry->structure);
    json out = {{"kb_id", entry->id}, {"meta", entry->meta}};
    std::lock_guard<std::mutex> lock(mutex_);
    kbs_[entry->id] = entry;
    return reply(201, out);
  }
  if (method == "GET" && std::regex_match(path, m, kKbMeta)) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = kbs_.find(m[1]);
    if (it == kbs_.end()) return error_reply(404, "NotFound", "unknown knowledge base");
    return reply(200, it->second->meta);
  }
  if (method == "POST" && path == "/session") {
    const std::string kb_id = require_string(parse_body(), "kb_id");
    std::shared_ptr<KbEntry> kb;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = kbs_.find(kb_id);
      if (it == kbs_.end()) return error_reply(404, "NotFound", "unknown knowledge base");
      kb = it->second;
    }
    auto entry = std::make_shared<SessionEntry>();
    entry->id = new_token();
    entry->kb = kb;
    ConsultOptions options;
    options.reasoner = config_.reasoner;
    entry->session = std::make_unique<ConsultSession>(kb->tkb, kb->structure, options);
    entry->last_used = config_.clock();
    json out = {{"session_id", entry->id}, {"state", state_json(entry->id, kb->id, *entry->session)}};
    std::lock_guard<std::mutex> lock(mutex_);
    sessions_[entry->id] = entry;
    return reply(201, out);
  }

  std::string session_id, op;
  if (std::regex_match(path, m, kSessionOp)) {
    session_id = m[1];
    op = m[2];
  } else if (std::regex_match(path, m, kSession)) {
    session_id = m[1];
  } else {
    return error_reply(404, "NotFound", "no route for " + method + " " + path);
  }
  std::shared_ptr<SessionEntry> entry;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) return error_reply(404, "NotFound", "unknown session");
    entry = it->second;
    if (op.empty() && method == "DELETE") {
      sessions_.erase(it);
      return reply(200, {{"deleted", session_id}});
    }
  }
  std::lock_guard<std::mutex> busy(entry->mutex);
  entry->last_used = config_.clock();
  ConsultSession& c = *entry->session;
  const std::string& kb_id = entry->kb->id;

  if (method == "GET" && op == "state") return reply(200, state_json(session_id, kb_id, c));
  if (method != "POST" || op.empty() || op == "state") {
    return error_reply(404, "NotFound", "no route for " + method + " " + path);
  }
  const json request = parse_body();
  if (op == "edit") {
    const std::string action = require_string(request, "action");
    const std::string term = require_string(request, "term");
    std::vector<int> changed;
    if (action == "assert") {
      changed = request.contains("value") ? c.assert_text(term + " = " + value_text(request.at("value")))
                                          : c.assert_text(term);
    } else if (action == "retract") {
      changed = c.retract_text(term);
    } else {
      throw Error(ErrorKind::kInvalidArgument, "action must be 'assert' or 'retract'");
    }
    json changes = json::array();
    for (int a : changed) {
      changes.push_back({{"atom", c.theory().atoms[a].text}, {"status", display_status_name(c.status(a))}});
    }
    return reply(200, {{"state", state_json(session_id, kb_id, c)}, {"changed", changes}});
  }
  if (op == "explain") {
    const std::string literal = require_string(request, "literal");
    return reply(200, {{"literal", literal}, {"explanation", explanation_json(c.explain(literal))}});
  }
  if (op == "optimize") {
    const std::string term = require_string(request, "term");
    const std::string direction = request.value("direction", std::string("minimize"));
    if (direction != "minimize" && direction != "maximize") {
      throw Error(ErrorKind::kInvalidArgument, "direction must be 'minimize' or 'maximize'");
    }
    Optimum o = c.optimize(term, direction == "minimize" ? Direction::kMinimize : Direction::kMaximize);
    return reply(200, {{"term", term},
                       {"direction", direction},
                       {"value", value_json(c.structure(), o.value)},
                       {"model", model_json(c.structure(), o.witness)}});
  }
  // models
  const json& max = require(request, "max");
  if (!max.is_number_integer() || max.get<long long>() < 1) {
    throw Error(ErrorKind::kInvalidArgument, "max must be a positive integer");
  }
  const size_t limit = std::min<size_t>(max.get<size_t>(), config_.max_models);
  json models = json::array();
  for (const Model& model : c.models(limit)) models.push_back(model_json(c.structure(), model));
  return reply(200, {{"models", models}});
}

int serve(Service& service, const std::string& host, int port) {
  httplib::Server server;
  auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
    HttpResponse r = service.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(r.body, "application/json");
  };
  server.Get(R"(/.*)", forward);
  server.Post(R"(/.*)", forward);
  server.Delete(R"(/.*)", forward);
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  if (!server.bind_to_port(host, port)) return 1;
  return server.listen_after_bind() ? 0 : 1;
}

}  // namespace fodot
