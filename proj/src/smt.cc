#include "fodot/smt.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fodot/error.h"

extern char** environ;

namespace fodot {

// --- S-expressions ------------------------------------------------------------

std::string SExpr::to_string() const {
  if (!is_list) return atom;
  std::string out = "(";
  for (size_t i = 0; i < list.size(); ++i) {
    if (i > 0) out += " ";
    out += list[i].to_string();
  }
  return out + ")";
}

std::optional<SExpr> read_sexpr(std::string_view text, size_t& pos) {
  size_t i = pos;
  auto skip_space = [&] {
    while (i < text.size()) {
      if (std::isspace(static_cast<unsigned char>(text[i]))) {
        ++i;
      } else if (text[i] == ';') {
        while (i < text.size() && text[i] != '\n') ++i;
      } else {
        break;
      }
    }
  };
  std::vector<SExpr> stack;
  while (true) {
    skip_space();
    if (i >= text.size()) return std::nullopt;
    char c = text[i];
    SExpr atom;
    if (c == '(') {
      ++i;
      stack.emplace_back();
      stack.back().is_list = true;
      continue;
    }
    if (c == ')') {
      ++i;
      if (stack.empty()) throw Error(ErrorKind::kSolverProtocol, "unbalanced ')' in solver output");
      atom = std::move(stack.back());
      stack.pop_back();
    } else if (c == '|') {
      size_t end = text.find('|', i + 1);
      if (end == std::string_view::npos) return std::nullopt;
      atom.atom = std::string(text.substr(i + 1, end - i - 1));
      i = end + 1;
    } else if (c == '"') {
      size_t j = i + 1;
      std::string s;
      while (true) {
        if (j >= text.size()) return std::nullopt;
        if (text[j] == '"') {
          if (j + 1 < text.size() && text[j + 1] == '"') {
            s += '"';
            j += 2;
            continue;
          }
          if (j + 1 >= text.size()) return std::nullopt;  // cannot tell "" from " yet
          break;
        }
        s += text[j++];
      }
      atom.atom = std::move(s);
      i = j + 1;
    } else {
      size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != '(' &&
             text[j] != ')' && text[j] != '|' && text[j] != '"') {
        ++j;
      }
      // A bare atom at the end of the buffer may still be growing.
      if (j >= text.size() && stack.empty()) return std::nullopt;
      atom.atom = std::string(text.substr(i, j - i));
      i = j;
    }
    if (stack.empty()) {
      pos = i;
      return atom;
    }
    stack.back().list.push_back(std::move(atom));
  }
}

std::optional<Number> parse_smt_number(const SExpr& e) {
  if (!e.is_list) {
    if (e.atom.empty() || !(std::isdigit(static_cast<unsigned char>(e.atom[0])))) return std::nullopt;
    try {
      return parse_number(e.atom);
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  if (e.list.size() == 2 && !e.list[0].is_list && e.list[0].atom == "-") {
    auto v = parse_smt_number(e.list[1]);
    if (!v) return std::nullopt;
    return Number(-*v);
  }
  if (e.list.size() == 3 && !e.list[0].is_list && e.list[0].atom == "/") {
    auto a = parse_smt_number(e.list[1]);
    auto b = parse_smt_number(e.list[2]);
    if (!a || !b || *b == 0) return std::nullopt;
    return Number(*a / *b);
  }
  return std::nullopt;
}

// --- Configuration --------------------------------------------------------------

std::vector<std::string> SolverConfig::split_command(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string word;
  while (in >> word) out.push_back(word);
  return out;
}

SolverConfig SolverConfig::from_environment() {
  SolverConfig config;
  if (const char* path = std::getenv("FODOT_CONFIG")) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::kInvalidArgument, std::string("cannot read config file ") + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kInvalidArgument, std::string("malformed config file ") + path + ": " + e.what());
    }
    if (j.contains("solver")) config.command = split_command(j["solver"].get<std::string>());
    if (j.contains("timeout_ms")) config.timeout_ms = j["timeout_ms"].get<int>();
  }
  if (const char* solver = std::getenv("FODOT_SOLVER")) {
    auto cmd = split_command(solver);
    if (!cmd.empty()) config.command = cmd;
  }
  return config;
}

const char* sat_status_name(SatStatus s) {
  switch (s) {
    case SatStatus::kSat: return "sat";
    case SatStatus::kUnsat: return "unsat";
    case SatStatus::kUnknown: return "unknown";
  }
  return "unknown";
}

// --- Child process --------------------------------------------------------------

class SolverProcess {
 public:
  explicit SolverProcess(const std::vector<std::string>& argv) {
    static const bool ignore_sigpipe = [] {
      signal(SIGPIPE, SIG_IGN);
      return true;
    }();
    (void)ignore_sigpipe;
    if (argv.empty()) throw Error(ErrorKind::kSolverSpawn, "empty solver command");
    int in_pipe[2];
    int out_pipe[2];
    if (pipe2(in_pipe, O_CLOEXEC) != 0 || pipe2(out_pipe, O_CLOEXEC) != 0) {
      throw Error(ErrorKind::kSolverSpawn, std::string("pipe: ") + std::strerror(errno));
    }
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
    posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, "/dev/null", O_WRONLY, 0);
    std::vector<char*> args;
    for (const std::string& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    int rc = posix_spawnp(&pid_, args[0], &actions, nullptr, args.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    close(in_pipe[0]);
    close(out_pipe[1]);
    if (rc != 0) {
      close(in_pipe[1]);
      close(out_pipe[0]);
      pid_ = -1;
      throw Error(ErrorKind::kSolverSpawn, "cannot start solver '" + argv[0] + "': " + std::strerror(rc));
    }
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
    fcntl(to_child_, F_SETFL, fcntl(to_child_, F_GETFL) | O_NONBLOCK);
  }

  ~SolverProcess() {
    if (to_child_ >= 0) {
      const char bye[] = "(exit)\n";
      [[maybe_unused]] ssize_t n = ::write(to_child_, bye, sizeof(bye) - 1);
      close(to_child_);
    }
    if (from_child_ >= 0) close(from_child_);
    if (pid_ > 0) {
      for (int i = 0; i < 50; ++i) {
        if (waitpid(pid_, nullptr, WNOHANG) == pid_) return;
        usleep(2000);
      }
      kill(pid_, SIGKILL);
      waitpid(pid_, nullptr, 0);
    }
  }

  // Writes everything, draining the child's output meanwhile so neither side
  // blocks on a full pipe.
  void write(const std::string& data) {
    size_t written = 0;
    while (written < data.size()) {
      pollfd fds[2] = {{to_child_, POLLOUT, 0}, {from_child_, POLLIN, 0}};
      if (poll(fds, 2, -1) < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorKind::kSolverProtocol, std::string("poll: ") + std::strerror(errno));
      }
      if (fds[1].revents & POLLIN) drain();
      if (fds[0].revents & (POLLERR | POLLHUP)) throw Error(ErrorKind::kSolverProtocol, "solver closed its input");
      if (fds[0].revents & POLLOUT) {
        ssize_t n = ::write(to_child_, data.data() + written, data.size() - written);
        if (n < 0) {
          if (errno == EINTR || errno == EAGAIN) continue;
          throw Error(ErrorKind::kSolverProtocol, std::string("write to solver: ") + std::strerror(errno));
        }
        written += static_cast<size_t>(n);
      }
    }
  }

  // Next complete s-expression, waiting at most `timeout_ms` (-1: forever).
  std::optional<SExpr> read(int timeout_ms) {
    auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    while (true) {
      size_t pos = 0;
      if (auto e = read_sexpr(buffer_, pos)) {
        buffer_.erase(0, pos);
        return e;
      }
      // A complete bare atom followed by a newline is final.
      size_t start = buffer_.find_first_not_of(" \t\r\n");
      if (start != std::string::npos && buffer_[start] != '(') {
        size_t nl = buffer_.find('\n', start);
        if (nl != std::string::npos) {
          SExpr atom;
          atom.atom = buffer_.substr(start, nl - start);
          while (!atom.atom.empty() && std::isspace(static_cast<unsigned char>(atom.atom.back()))) atom.atom.pop_back();
          buffer_.erase(0, nl + 1);
          return atom;
        }
      }
      int wait = -1;
      if (timeout_ms >= 0) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) return std::nullopt;
        wait = static_cast<int>(left.count());
      }
      pollfd fd{from_child_, POLLIN, 0};
      int rc = poll(&fd, 1, wait);
      if (rc < 0 && errno == EINTR) continue;
      if (rc == 0) return std::nullopt;
      if (!drain()) throw Error(ErrorKind::kSolverProtocol, "solver exited unexpectedly");
    }
  }

 private:
  bool drain() {
    char chunk[65536];
    ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
    if (n <= 0) return false;
    buffer_.append(chunk, static_cast<size_t>(n));
    return true;
  }

  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

// --- Encoding -------------------------------------------------------------------

namespace {

std::string quote(const std::string& s) { return "|" + s + "|"; }

std::string int_literal(const BigInt& v) { return v < 0 ? "(- " + BigInt(-v).str() + ")" : v.str(); }

std::string real_literal(const Number& n) {
  BigInt num = boost::multiprecision::numerator(n);
  BigInt den = boost::multiprecision::denominator(n);
  BigInt mag = num < 0 ? BigInt(-num) : num;
  std::string body = den == 1 ? mag.str() + ".0" : "(/ " + mag.str() + ".0 " + den.str() + ".0)";
  return num < 0 ? "(- " + body + ")" : body;
}

class Encoder {
 public:
  explicit Encoder(const GroundTheory& gt) : gt_(gt) {}

  static std::string sort_symbol(const GroundTheory& gt, TypeId sort) {
    if (sort == kBoolType) return "Bool";
    if (sort == kIntType) return "Int";
    if (sort == kRealType) return "Real";
    return quote(gt.structure.table().type(sort).name);
  }

  static std::string element_symbol(const GroundTheory& gt, const Value& v) {
    return quote(gt.structure.table().type(v.type).name + "!" + gt.structure.value_to_string(v));
  }

  static std::string term_symbol(const GroundTheory& gt, int term) { return quote(gt.terms[term].text); }
  static std::string aux_symbol(const GroundTheory& gt, int aux) { return quote("aux:" + gt.aux[aux].name); }

  std::string encode(const GExpr& e) const {
    switch (e->kind) {
      case GKind::kConst:
        return constant(e->value, e->sort);
      case GKind::kTerm:
        return term_symbol(gt_, e->index);
      case GKind::kAux:
        return aux_symbol(gt_, e->index);
      case GKind::kNot:
        return "(not " + encode(e->args[0]) + ")";
      case GKind::kAnd:
      case GKind::kOr: {
        std::string out = e->kind == GKind::kAnd ? "(and" : "(or";
        for (const GExpr& a : e->args) out += " " + encode(a);
        return out + ")";
      }
      case GKind::kImplies:
        return "(=> " + encode(e->args[0]) + " " + encode(e->args[1]) + ")";
      case GKind::kIff:
        return "(= " + encode(e->args[0]) + " " + encode(e->args[1]) + ")";
      case GKind::kIte:
        return "(ite " + encode(e->args[0]) + " " + coerced(e->args[1], e->sort) + " " +
               coerced(e->args[2], e->sort) + ")";
      case GKind::kCmp: {
        TypeId common = e->args[0]->sort;
        if (common == kIntType && e->args[1]->sort == kRealType) common = kRealType;
        std::string a = coerced(e->args[0], common);
        std::string b = coerced(e->args[1], common);
        switch (e->op) {
          case CmpOp::kEq: return "(= " + a + " " + b + ")";
          case CmpOp::kNe: return "(not (= " + a + " " + b + "))";
          case CmpOp::kLt: return "(< " + a + " " + b + ")";
          case CmpOp::kLe: return "(<= " + a + " " + b + ")";
          case CmpOp::kGt: return "(> " + a + " " + b + ")";
          case CmpOp::kGe: return "(>= " + a + " " + b + ")";
        }
        return "";
      }
      case GKind::kAdd:
      case GKind::kSub:
      case GKind::kMul: {
        const char* op = e->kind == GKind::kAdd ? "+" : e->kind == GKind::kSub ? "-" : "*";
        return std::string("(") + op + " " + coerced(e->args[0], e->sort) + " " + coerced(e->args[1], e->sort) + ")";
      }
      case GKind::kDiv: {
        std::string a = coerced(e->args[0], kRealType);
        std::string b = coerced(e->args[1], kRealType);
        if (e->args[1]->kind == GKind::kConst) return "(/ " + a + " " + b + ")";
        // x / 0 is 0.
        return "(ite (= " + b + " 0.0) 0.0 (/ " + a + " " + b + "))";
      }
      case GKind::kNeg:
        return "(- " + encode(e->args[0]) + ")";
    }
    return "";
  }

 private:
  std::string constant(const Value& v, TypeId sort) const {
    switch (v.kind) {
      case Value::Kind::kBool:
        return v.boolean ? "true" : "false";
      case Value::Kind::kNumber:
        if (sort == kRealType) return real_literal(v.number);
        return int_literal(boost::multiprecision::numerator(v.number));
      case Value::Kind::kElement:
        return element_symbol(gt_, v);
    }
    return "";
  }

  std::string coerced(const GExpr& e, TypeId target) const {
    if (target == kRealType && e->sort == kIntType) {
      if (e->kind == GKind::kConst) return real_literal(e->value.number);
      return "(to_real " + encode(e) + ")";
    }
    return encode(e);
  }

  const GroundTheory& gt_;
};

// Sorts needing declaration: custom and concept types that have extensions.
std::vector<TypeId> uninterpreted_sorts(const GroundTheory& gt) {
  std::vector<TypeId> out;
  const TypeTable& table = gt.structure.table();
  for (TypeId t = 0; t < static_cast<TypeId>(table.type_count()); ++t) {
    const TypeInfo& info = table.type(t);
    bool custom = (info.kind == TypeKind::kCustom && info.numeric_base == TypeKind::kCustom) ||
                  info.kind == TypeKind::kConcept;
    if (custom && gt.structure.has_extension(t)) out.push_back(t);
  }
  return out;
}

std::vector<std::string> sort_declarations(const GroundTheory& gt, TypeId t) {
  std::vector<std::string> out;
  const std::string sort = Encoder::sort_symbol(gt, t);
  out.push_back("(declare-sort " + sort + " 0)");
  const TypeExtension* ext = gt.structure.extension(t);
  std::string distinct = "(assert (distinct";
  for (const Value& v : ext->elements) {
    out.push_back("(declare-fun " + Encoder::element_symbol(gt, v) + " () " + sort + ")");
    distinct += " " + Encoder::element_symbol(gt, v);
  }
  if (ext->elements.size() > 1) out.push_back(distinct + "))");
  return out;
}

std::vector<std::string> term_declarations(const GroundTheory& gt, int term) {
  const TermInfo& info = gt.terms[term];
  std::vector<std::string> out;
  out.push_back("(declare-fun " + Encoder::term_symbol(gt, term) + " () " + Encoder::sort_symbol(gt, info.sort) + ")");
  const TypeExtension* ext = gt.structure.extension(info.sort);
  if (info.sort != kBoolType && info.sort != kIntType && info.sort != kRealType && ext) {
    // Domain closure at the solver level.
    std::string closure = "(assert (or false";
    for (const Value& v : ext->elements) {
      closure += " (= " + Encoder::term_symbol(gt, term) + " " + Encoder::element_symbol(gt, v) + ")";
    }
    out.push_back(closure + "))");
  }
  return out;
}

std::string named(const std::string& label, const std::string& body) {
  return "(assert (! " + body + " :named " + quote(label) + "))";
}

}  // namespace

std::string to_smtlib_script(const GroundTheory& gt) {
  std::ostringstream out;
  Encoder enc(gt);
  out << "(set-option :produce-unsat-cores true)\n(set-option :produce-models true)\n(set-logic ALL)\n";
  for (TypeId t : uninterpreted_sorts(gt)) {
    for (const std::string& c : sort_declarations(gt, t)) out << c << "\n";
  }
  for (size_t i = 0; i < gt.terms.size(); ++i) {
    for (const std::string& c : term_declarations(gt, static_cast<int>(i))) out << c << "\n";
  }
  for (size_t i = 0; i < gt.aux.size(); ++i) {
    out << "(declare-fun " << Encoder::aux_symbol(gt, static_cast<int>(i)) << " () "
        << Encoder::sort_symbol(gt, gt.aux[i].sort) << ")\n";
  }
  for (const auto* list : {&gt.background, &gt.assertions}) {
    for (const LabeledAssertion& a : *list) out << named(a.label, enc.encode(a.formula)) << "\n";
  }
  out << "(check-sat)\n";
  return out.str();
}

// --- Session ----------------------------------------------------------------------

SolverSession::SolverSession(const SolverConfig& config) : config_(config) { start(); }

SolverSession::~SolverSession() = default;

void SolverSession::start() {
  process_ = std::make_unique<SolverProcess>(config_.command);
  transcript_.clear();
  depth_ = 0;
  try {
    command("(set-option :print-success true)");
  } catch (const Error& e) {
    process_.reset();
    throw Error(ErrorKind::kSolverSpawn, "solver '" + config_.command[0] + "' did not start: " + e.what());
  }
  commands({"(set-option :produce-unsat-cores true)", "(set-option :produce-models true)", "(set-logic ALL)"});
  if (config_.timeout_ms > 0) {
    // Not part of the standard; solvers that reject it simply run unbounded.
    process_->write("(set-option :timeout " + std::to_string(config_.timeout_ms) + ")\n");
    process_->read(5000);
  }
}

void SolverSession::command(const std::string& cmd) { commands({cmd}); }

void SolverSession::commands(const std::vector<std::string>& cmds) {
  if (cmds.empty()) return;
  std::string text;
  for (const std::string& c : cmds) text += c + "\n";
  transcript_ += text;
  process_->write(text);
  for (const std::string& c : cmds) {
    auto reply = process_->read(30000);
    if (!reply) throw Error(ErrorKind::kSolverProtocol, "solver did not answer '" + c.substr(0, 80) + "'");
    if (reply->is_list || reply->atom != "success") {
      throw Error(ErrorKind::kSolverProtocol, "solver rejected '" + c.substr(0, 200) + "': " + reply->to_string());
    }
  }
}

SExpr SolverSession::query(const std::string& cmd) {
  transcript_ += cmd + "\n";
  process_->write(cmd + "\n");
  int wait = config_.timeout_ms > 0 ? config_.timeout_ms + 10000 : -1;
  auto reply = process_->read(wait);
  if (!reply) {
    // The solver ignored its own timeout.
    throw Error(ErrorKind::kSolverProtocol, "solver did not answer '" + cmd + "' in time");
  }
  if (reply->is_list && !reply->list.empty() && !reply->list[0].is_list && reply->list[0].atom == "error") {
    throw Error(ErrorKind::kSolverProtocol, "solver error on '" + cmd.substr(0, 200) + "': " + reply->to_string());
  }
  return *reply;
}

std::string SolverSession::sort_name(TypeId sort) const { return Encoder::sort_symbol(*gt_, sort); }
std::string SolverSession::element_name(const Value& v) const { return Encoder::element_symbol(*gt_, v); }

void SolverSession::declare_from(size_t term_start, size_t aux_start) {
  std::vector<std::string> cmds;
  for (size_t i = term_start; i < gt_->terms.size(); ++i) {
    for (std::string& c : term_declarations(*gt_, static_cast<int>(i))) cmds.push_back(std::move(c));
  }
  for (size_t i = aux_start; i < gt_->aux.size(); ++i) {
    cmds.push_back("(declare-fun " + Encoder::aux_symbol(*gt_, static_cast<int>(i)) + " () " +
                   sort_name(gt_->aux[i].sort) + ")");
  }
  commands(cmds);
  declared_terms_ = gt_->terms.size();
  declared_aux_ = gt_->aux.size();
}

void SolverSession::load(const GroundTheory& gt, bool bare) {
  if (depth_ != 0) throw Error(ErrorKind::kInvalidArgument, "load requires stack depth 0");
  gt_ = &gt;
  std::vector<std::string> cmds;
  declared_sorts_ = uninterpreted_sorts(gt);
  for (TypeId t : declared_sorts_) {
    for (std::string& c : sort_declarations(gt, t)) cmds.push_back(std::move(c));
  }
  commands(cmds);
  declare_from(0, 0);
  cmds.clear();
  Encoder enc(gt);
  for (const LabeledAssertion& a : gt.background) cmds.push_back(named(a.label, enc.encode(a.formula)));
  if (!bare) {
    for (const LabeledAssertion& a : gt.assertions) cmds.push_back(named(a.label, enc.encode(a.formula)));
  }
  commands(cmds);
}

void SolverSession::sync() {
  if (gt_) declare_from(declared_terms_, declared_aux_);
}

void SolverSession::reset() {
  process_.reset();
  declared_terms_ = declared_aux_ = 0;
  start();
  gt_ = nullptr;
}

void SolverSession::push() {
  command("(push 1)");
  ++depth_;
}

void SolverSession::pop() {
  if (depth_ == 0) throw Error(ErrorKind::kInvalidArgument, "pop on empty solver stack");
  command("(pop 1)");
  --depth_;
}

std::string SolverSession::encode(const GExpr& e) const { return Encoder(*gt_).encode(e); }

void SolverSession::assert_named(const std::string& label, const GExpr& formula) {
  command(named(label, encode(formula)));
}

void SolverSession::assert_formula(const GExpr& formula) { command("(assert " + encode(formula) + ")"); }

SatStatus SolverSession::check_sat() {
  SExpr reply = query("(check-sat)");
  if (!reply.is_list) {
    if (reply.atom == "sat") return SatStatus::kSat;
    if (reply.atom == "unsat") return SatStatus::kUnsat;
    if (reply.atom == "unknown") return SatStatus::kUnknown;
  }
  throw Error(ErrorKind::kSolverProtocol, "unexpected check-sat reply: " + reply.to_string());
}

GModel SolverSession::get_model() {
  GModel m;
  const GroundTheory& gt = *gt_;
  std::vector<std::string> names;
  for (size_t i = 0; i < gt.terms.size(); ++i) names.push_back(Encoder::term_symbol(gt, static_cast<int>(i)));
  for (size_t i = 0; i < gt.aux.size(); ++i) names.push_back(Encoder::aux_symbol(gt, static_cast<int>(i)));
  // Abstract values of uninterpreted sorts are matched through the element
  // constants.
  std::vector<Value> elements;
  for (TypeId t : declared_sorts_) {
    for (const Value& v : gt.structure.extension(t)->elements) {
      names.push_back(Encoder::element_symbol(gt, v));
      elements.push_back(v);
    }
  }
  std::vector<SExpr> values;
  const size_t batch = 2000;
  for (size_t start = 0; start < names.size(); start += batch) {
    std::string cmd = "(get-value (";
    for (size_t i = start; i < std::min(names.size(), start + batch); ++i) {
      if (i > start) cmd += " ";
      cmd += names[i];
    }
    SExpr reply = query(cmd + "))");
    if (!reply.is_list) throw Error(ErrorKind::kSolverProtocol, "unexpected get-value reply: " + reply.to_string());
    for (SExpr& pair : reply.list) {
      if (!pair.is_list || pair.list.size() != 2) {
        throw Error(ErrorKind::kSolverProtocol, "unexpected get-value entry: " + pair.to_string());
      }
      values.push_back(std::move(pair.list[1]));
    }
  }
  if (values.size() != names.size()) throw Error(ErrorKind::kSolverProtocol, "get-value returned too few values");
  const size_t n_terms = gt.terms.size();
  const size_t n_aux = gt.aux.size();
  std::map<std::string, Value> abstract;
  for (size_t k = 0; k < elements.size(); ++k) abstract[values[n_terms + n_aux + k].to_string()] = elements[k];
  auto convert = [&](const SExpr& v, TypeId sort) -> Value {
    if (sort == kBoolType) {
      if (!v.is_list && (v.atom == "true" || v.atom == "false")) return Value::of_bool(v.atom == "true");
    } else if (sort == kIntType || sort == kRealType) {
      if (auto n = parse_smt_number(v)) return Value::of_number(*n);
    } else {
      auto it = abstract.find(v.to_string());
      if (it != abstract.end()) return it->second;
    }
    throw Error(ErrorKind::kSolverProtocol, "cannot interpret solver value " + v.to_string());
  };
  for (size_t i = 0; i < n_terms; ++i) m.terms.push_back(convert(values[i], gt.terms[i].sort));
  for (size_t i = 0; i < n_aux; ++i) m.aux.push_back(convert(values[n_terms + i], gt.aux[i].sort));
  return m;
}

std::vector<std::string> SolverSession::get_unsat_core() {
  SExpr reply = query("(get-unsat-core)");
  if (!reply.is_list) throw Error(ErrorKind::kSolverProtocol, "unexpected get-unsat-core reply: " + reply.to_string());
  std::vector<std::string> core;
  for (const SExpr& e : reply.list) core.push_back(e.atom);
  return core;
}

SolverAnswer SolverSession::check_under(const std::vector<Assumption>& assumptions, bool want_model,
                                        bool want_core) {
  push();
  SolverAnswer answer;
  try {
    std::vector<std::string> cmds;
    for (const Assumption& a : assumptions) cmds.push_back(named(a.label, encode(a.formula)));
    commands(cmds);
    answer.status = check_sat();
    if (answer.status == SatStatus::kSat && want_model) answer.model = get_model();
    if (answer.status == SatStatus::kUnsat && want_core) answer.core = get_unsat_core();
  } catch (...) {
    pop();
    throw;
  }
  pop();
  return answer;
}

}  // namespace fodot
