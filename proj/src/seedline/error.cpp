#include "seedline/error.hpp"

namespace seedline {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnknownLanguage: return "UnknownLanguage";
    case ErrorKind::SameLanguage: return "SameLanguage";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::UntieredDocument: return "UntieredDocument";
    case ErrorKind::TargetTooSmall: return "TargetTooSmall";
    case ErrorKind::Timeout: return "Timeout";
    case ErrorKind::BackendError: return "BackendError";
    case ErrorKind::MalformedResponse: return "MalformedResponse";
    case ErrorKind::ScorerFailure: return "ScorerFailure";
    case ErrorKind::DirectionMismatch: return "DirectionMismatch";
    case ErrorKind::MissingTemplate: return "MissingTemplate";
    case ErrorKind::UnknownPlaceholder: return "UnknownPlaceholder";
    case ErrorKind::StepOutOfRange: return "StepOutOfRange";
    case ErrorKind::MissingSource: return "MissingSource";
    case ErrorKind::ExhaustedSource: return "ExhaustedSource";
    case ErrorKind::MissingKind: return "MissingKind";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::AllRolloutsFailed: return "AllRolloutsFailed";
    case ErrorKind::BothEmpty: return "BothEmpty";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::MixedMetrics: return "MixedMetrics";
    case ErrorKind::MixedModes: return "MixedModes";
    case ErrorKind::SchemaViolation: return "SchemaViolation";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

} // namespace seedline
