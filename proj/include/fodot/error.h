// Error types. Every failure raised by the engine is an fodot::Error carrying
// a machine-readable kind; parse and type errors additionally carry the full
// list of diagnostics.
#ifndef FODOT_ERROR_H_
#define FODOT_ERROR_H_

#include <stdexcept>
#include <string>
#include <vector>

namespace fodot {

enum class ErrorKind {
  kParse,
  kType,
  kMissingExtension,
  kValueOutsideType,
  kTypeMismatch,
  kOverwriteEnumeration,
  kNotUserFact,
  kInfiniteQuantification,
  kUnstratifiedDefinition,
  kSolverSpawn,
  kSolverProtocol,
  kSolverUnknown,
  kInconsistent,
  kInconsistentKB,
  kNotAConsequence,
  kUnbounded,
  kTooLarge,
  kMalformedTable,
  kUnknownHitPolicy,
  kUnknownSymbol,
  kUnboundedInput,
  kConflictingAssert,
  kInvalidArgument,
};

const char* error_kind_name(ErrorKind kind);

struct SourceSpan {
  int line = 0;    // 1-based; 0 when unknown
  int column = 0;  // 1-based
  int end_line = 0;
  int end_column = 0;
};

struct Diagnostic {
  SourceSpan span;
  std::string message;
  std::vector<std::string> expected;  // parse errors: acceptable tokens

  std::string to_string() const;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  Error(ErrorKind kind, std::vector<Diagnostic> diagnostics);

  ErrorKind kind() const { return kind_; }
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  ErrorKind kind_;
  std::vector<Diagnostic> diagnostics_;
};

}  // namespace fodot

#endif  // FODOT_ERROR_H_
