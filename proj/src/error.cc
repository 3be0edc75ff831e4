#include "fodot/error.h"

#include <sstream>

namespace fodot {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "ParseErrors";
    case ErrorKind::kType: return "TypeErrors";
    case ErrorKind::kMissingExtension: return "MissingExtension";
    case ErrorKind::kValueOutsideType: return "ValueOutsideType";
    case ErrorKind::kTypeMismatch: return "TypeMismatch";
    case ErrorKind::kOverwriteEnumeration: return "OverwriteEnumeration";
    case ErrorKind::kNotUserFact: return "NotUserFact";
    case ErrorKind::kInfiniteQuantification: return "InfiniteQuantification";
    case ErrorKind::kUnstratifiedDefinition: return "UnstratifiedDefinition";
    case ErrorKind::kSolverSpawn: return "SolverSpawnError";
    case ErrorKind::kSolverProtocol: return "SolverProtocolError";
    case ErrorKind::kSolverUnknown: return "SolverUnknown";
    case ErrorKind::kInconsistent: return "Inconsistent";
    case ErrorKind::kInconsistentKB: return "InconsistentKB";
    case ErrorKind::kNotAConsequence: return "NotAConsequence";
    case ErrorKind::kUnbounded: return "Unbounded";
    case ErrorKind::kTooLarge: return "TooLarge";
    case ErrorKind::kMalformedTable: return "MalformedTable";
    case ErrorKind::kUnknownHitPolicy: return "UnknownHitPolicy";
    case ErrorKind::kUnknownSymbol: return "UnknownSymbol";
    case ErrorKind::kUnboundedInput: return "UnboundedInput";
    case ErrorKind::kConflictingAssert: return "ConflictingAssert";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

std::string Diagnostic::to_string() const {
  std::ostringstream out;
  if (span.line > 0) out << span.line << ":" << span.column << ": ";
  out << message;
  if (!expected.empty()) {
    out << " (expected ";
    for (size_t i = 0; i < expected.size(); ++i) {
      if (i > 0) out << (i + 1 == expected.size() ? " or " : ", ");
      out << expected[i];
    }
    out << ")";
  }
  return out.str();
}

namespace {

std::string join_diagnostics(const std::vector<Diagnostic>& diagnostics) {
  std::string out;
  for (const Diagnostic& d : diagnostics) {
    if (!out.empty()) out += "\n";
    out += d.to_string();
  }
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, std::vector<Diagnostic> diagnostics)
    : std::runtime_error(join_diagnostics(diagnostics)),
      kind_(kind),
      diagnostics_(std::move(diagnostics)) {}

}  // namespace fodot
