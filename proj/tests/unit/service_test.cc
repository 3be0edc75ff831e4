#include "fodot/service.h"

#include <gtest/gtest.h>
#include <httplib.h>

#include <nlohmann/json.hpp>
#include <thread>

namespace fodot {
namespace {

using nlohmann::json;

const char* kVoting = R"(
vocabulary V {
  type Age := {0..120}
  age: () -> Age
  vote: () -> Bool
}
theory T:V { vote() <=> 18 =< age(). }
)";

struct Client {
  Service& service;
  int status = 0;

  json call(const std::string& method, const std::string& path, const json& body = nullptr) {
    HttpResponse r = service.handle(method, path, body.is_null() ? "" : body.dump());
    status = r.status;
    return json::parse(r.body);
  }
};

std::string atom_status(const json& state, const std::string& atom) {
  for (const json& a : state.at("atoms")) {
    if (a.at("atom") == atom) return a.at("status");
  }
  return "missing";
}

std::string open_session(Client& c) {
  json kb = c.call("POST", "/kb", {{"source", kVoting}});
  EXPECT_EQ(c.status, 201);
  json s = c.call("POST", "/session", {{"kb_id", kb.at("kb_id")}});
  EXPECT_EQ(c.status, 201);
  return s.at("session_id");
}

TEST(Service, MetaListsTheVocabulary) {
  Service service;
  Client c{service};
  json kb = c.call("POST", "/kb", {{"source", kVoting}});
  ASSERT_EQ(c.status, 201);
  json meta = c.call("GET", "/kb/" + kb.at("kb_id").get<std::string>() + "/meta");
  ASSERT_EQ(c.status, 200);
  std::vector<std::string> names;
  for (const json& s : meta.at("symbols")) names.push_back(s.at("name"));
  EXPECT_EQ(names, (std::vector<std::string>{"age", "vote"}));
  EXPECT_EQ(meta.at("symbols")[0].at("signature"), "() -> Age");
  EXPECT_EQ(meta.at("symbols")[0].at("extension").size(), 121u);
  EXPECT_EQ(meta.at("symbols")[1].at("extension"), json::parse("[false, true]"));
}

TEST(Service, EditPropagatesAndReportsChanges) {
  Service service;
  Client c{service};
  const std::string id = open_session(c);
  json r = c.call("POST", "/session/" + id + "/edit", {{"action", "assert"}, {"term", "age()"}, {"value", 17}});
  ASSERT_EQ(c.status, 200) << r.dump();
  EXPECT_EQ(atom_status(r.at("state"), "vote()"), "propagated_false");
  bool vote_changed = false;
  for (const json& ch : r.at("changed")) vote_changed = vote_changed || ch.at("atom") == "vote()";
  EXPECT_TRUE(vote_changed);
  json state = c.call("GET", "/session/" + id + "/state");
  EXPECT_EQ(state.at("facts").at("age()"), 17);

  json e = c.call("POST", "/session/" + id + "/explain", {{"literal", "vote() = false"}});
  ASSERT_EQ(c.status, 200) << e.dump();
  EXPECT_EQ(e.at("explanation").size(), 3u);
}

TEST(Service, ConflictReturns409WithExplanation) {
  Service service;
  Client c{service};
  const std::string id = open_session(c);
  c.call("POST", "/session/" + id + "/edit", {{"action", "assert"}, {"term", "vote()"}, {"value", true}});
  ASSERT_EQ(c.status, 200);
  json r = c.call("POST", "/session/" + id + "/edit", {{"action", "assert"}, {"term", "age()"}, {"value", 17}});
  EXPECT_EQ(c.status, 409);
  EXPECT_EQ(r.at("error"), "ConflictingAssert");
  EXPECT_EQ(r.at("explanation").size(), 3u);
}

TEST(Service, OptimizeAndModels) {
  Service service;
  Client c{service};
  const std::string id = open_session(c);
  c.call("POST", "/session/" + id + "/edit", {{"action", "assert"}, {"term", "vote()"}});
  json o = c.call("POST", "/session/" + id + "/optimize", {{"term", "age()"}, {"direction", "minimize"}});
  ASSERT_EQ(c.status, 200) << o.dump();
  EXPECT_EQ(o.at("value"), 18);
  EXPECT_EQ(o.at("model").at("age()"), 18);
  json m = c.call("POST", "/session/" + id + "/models", {{"max", 3}});
  ASSERT_EQ(c.status, 200);
  EXPECT_EQ(m.at("models").size(), 3u);
}

TEST(Service, ErrorStatuses) {
  Service service;
  Client c{service};
  c.call("GET", "/kb/00ff/meta");
  EXPECT_EQ(c.status, 404);
  c.call("POST", "/session", {{"kb_id", "abc"}});
  EXPECT_EQ(c.status, 404);
  json bad = c.call("POST", "/kb", {{"source", "vocabulary V { p: () -> }"}});
  EXPECT_EQ(c.status, 422);
  EXPECT_EQ(bad.at("error"), "ParseErrors");
  const std::string id = open_session(c);
  c.call("POST", "/session/" + id + "/edit", {{"action", "assert"}, {"term", "age()"}, {"value", 500}});
  EXPECT_EQ(c.status, 422);
  c.call("POST", "/session/" + id + "/explain", {{"literal", "vote()"}});
  EXPECT_EQ(c.status, 422);
  HttpResponse r = service.handle("POST", "/session/" + id + "/edit", "{not json");
  EXPECT_EQ(r.status, 422);
  c.call("DELETE", "/session/" + id);
  EXPECT_EQ(c.status, 200);
  c.call("GET", "/session/" + id + "/state");
  EXPECT_EQ(c.status, 404);
}

TEST(Service, SolverFailureIs500) {
  ServiceConfig config;
  config.reasoner.solver.command = {"/nonexistent/solver"};
  Service service(config);
  Client c{service};
  json kb = c.call("POST", "/kb", {{"source", kVoting}});
  json r = c.call("POST", "/session", {{"kb_id", kb.at("kb_id")}});
  EXPECT_EQ(c.status, 500);
  EXPECT_EQ(r.at("error"), "SolverSpawnError");
}

TEST(Service, ReplayIsByteIdentical) {
  Service service;
  Client c{service};
  auto replay = [&] {
    const std::string id = open_session(c);
    c.call("POST", "/session/" + id + "/edit", {{"action", "assert"}, {"term", "vote()"}});
    c.call("POST", "/session/" + id + "/edit", {{"action", "retract"}, {"term", "vote()"}});
    json state = c.call("POST", "/session/" + id + "/edit", {{"action", "assert"}, {"term", "age()"}, {"value", 40}});
    state["state"].erase("session_id");
    state["state"].erase("kb_id");
    return state.dump();
  };
  EXPECT_EQ(replay(), replay());
}

TEST(Service, IdleSessionsExpire) {
  auto now = std::chrono::steady_clock::now();
  ServiceConfig config;
  config.idle_timeout = std::chrono::seconds(60);
  config.clock = [&now] { return now; };
  Service service(config);
  Client c{service};
  open_session(c);
  EXPECT_EQ(service.session_count(), 1u);
  now += std::chrono::seconds(30);
  EXPECT_EQ(service.expire_idle(), 0u);
  now += std::chrono::seconds(61);
  EXPECT_EQ(service.expire_idle(), 1u);
  EXPECT_EQ(service.session_count(), 0u);
}

TEST(Service, SessionIdsAreDistinct) {
  Service service;
  Client c{service};
  json kb = c.call("POST", "/kb", {{"source", kVoting}});
  std::set<std::string> ids;
  for (int i = 0; i < 5; ++i) ids.insert(c.call("POST", "/session", {{"kb_id", kb.at("kb_id")}}).at("session_id").get<std::string>());
  EXPECT_EQ(ids.size(), 5u);
  for (const std::string& id : ids) EXPECT_EQ(id.size(), 32u);
}

TEST(Service, ServesOverHttp) {
  Service service;
  httplib::Server probe;
  const int port = probe.bind_to_any_port("127.0.0.1");
  probe.stop();
  std::thread server([&] { serve(service, "127.0.0.1", port); });
  httplib::Client client("127.0.0.1", port);
  client.set_connection_timeout(5);
  httplib::Result r;
  for (int attempt = 0; attempt < 50 && !r; ++attempt) {
    r = client.Post("/kb", json{{"source", kVoting}}.dump(), "application/json");
    if (!r) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 201);
  EXPECT_TRUE(json::parse(r->body).contains("kb_id"));
  // serve() blocks; the process exits with the test binary.
  server.detach();
}

}  // namespace
}  // namespace fodot
