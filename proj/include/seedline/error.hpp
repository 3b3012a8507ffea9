#pragma once

#include <stdexcept>
#include <string>

namespace seedline {

enum class ErrorKind {
  UnknownLanguage,
  SameLanguage,
  EmptyInput,
  EmptyCorpus,
  UntieredDocument,
  TargetTooSmall,
  Timeout,
  BackendError,
  MalformedResponse,
  ScorerFailure,
  DirectionMismatch,
  MissingTemplate,
  UnknownPlaceholder,
  StepOutOfRange,
  MissingSource,
  ExhaustedSource,
  MissingKind,
  LengthMismatch,
  ArityMismatch,
  AllRolloutsFailed,
  BothEmpty,
  MissingColumn,
  MixedMetrics,
  MixedModes,
  SchemaViolation,
  ConfigError,
  IoError,
};

const char* to_string(ErrorKind kind);

// Single exception type for the whole library. `kind` lets callers branch
// without string matching; optional numeric payloads cover the cases where a
// count matters (retry attempts, HTTP status, line numbers).
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  int attempts = 0;     // Timeout / BackendError
  int status = 0;       // BackendError
  long line_number = 0; // SchemaViolation / IoError on line-oriented files

private:
  ErrorKind kind_;
};

inline Error make_error(ErrorKind kind, std::string message) { return Error(kind, std::move(message)); }

} // namespace seedline
