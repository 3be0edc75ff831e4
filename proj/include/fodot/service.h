// HTTP/JSON API over knowledge bases and consultation sessions.
//
//   POST   /kb                    {source}                   -> 201 {kb_id, meta}
//   GET    /kb/{id}/meta                                     -> 200 meta
//   POST   /session               {kb_id}                    -> 201 {session_id, state}
//   GET    /session/{id}/state                               -> 200 state
//   POST   /session/{id}/edit     {action, term, value?}     -> 200 {state, changed}
//   POST   /session/{id}/explain  {literal}                  -> 200 {literal, explanation}
//   POST   /session/{id}/optimize {term, direction}          -> 200 {value, model}
//   POST   /session/{id}/models   {max}                      -> 200 {models}
//   DELETE /session/{id}                                     -> 200 {deleted}
//
// Errors carry {error, message, ...}: 404 for unknown ids, 409 for a
// conflicting assert (with its explanation), 422 for invalid input and
// task-level failures, 500 for solver failures.
#ifndef FODOT_SERVICE_H_
#define FODOT_SERVICE_H_

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "fodot/consult.h"

namespace fodot {

struct ServiceConfig {
  ReasonerOptions reasoner;
  std::chrono::seconds idle_timeout{30 * 60};
  size_t max_models = 1000;
  // Time source for idle expiry (replaceable in tests).
  std::function<std::chrono::steady_clock::time_point()> clock = [] { return std::chrono::steady_clock::now(); };
};

struct HttpResponse {
  int status = 200;
  std::string body;  // JSON text
};

class Service {
 public:
  explicit Service(ServiceConfig config = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Thread-safe: requests for distinct sessions run concurrently, requests
  // for one session are serialised.
  HttpResponse handle(const std::string& method, const std::string& path, const std::string& body);

  // Drops sessions idle for longer than the configured timeout; returns how
  // many were dropped. Also run at the start of every request.
  size_t expire_idle();
  size_t session_count() const;

  struct KbEntry;
  struct SessionEntry;

 private:
  HttpResponse route(const std::string& method, const std::string& path, const std::string& body);

  ServiceConfig config_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<KbEntry>> kbs_;
  std::map<std::string, std::shared_ptr<SessionEntry>> sessions_;
};

// Serves the API on host:port until the process is stopped. Returns non-zero
// when the port cannot be bound.
int serve(Service& service, const std::string& host, int port);

}  // namespace fodot

#endif  // FODOT_SERVICE_H_
