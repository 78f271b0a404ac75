#include "uner/error.hpp"

namespace uner {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DuplicateSibling: return "DuplicateSibling";
    case ErrorKind::DepthExceeded: return "DepthExceeded";
    case ErrorKind::IllegalName: return "IllegalName";
    case ErrorKind::MissingRoot: return "MissingRoot";
    case ErrorKind::UnknownPath: return "UnknownPath";
    case ErrorKind::LevelOutOfRange: return "LevelOutOfRange";
    case ErrorKind::UnmappedLabel: return "UnmappedLabel";
    case ErrorKind::OverlappingSpans: return "OverlappingSpans";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::MalformedMarkup: return "MalformedMarkup";
    case ErrorKind::NestedSpans: return "NestedSpans";
    case ErrorKind::SchemaViolation: return "SchemaViolation";
    case ErrorKind::OffsetOutOfRange: return "OffsetOutOfRange";
    case ErrorKind::MissingRecall: return "MissingRecall";
    case ErrorKind::TokenizationMismatch: return "TokenizationMismatch";
    case ErrorKind::EndpointUnavailable: return "EndpointUnavailable";
    case ErrorKind::NonInjectiveMapping: return "NonInjectiveMapping";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::TargetAlreadyAnnotated: return "TargetAlreadyAnnotated";
    case ErrorKind::DuplicatePairId: return "DuplicatePairId";
    case ErrorKind::CorpusMismatch: return "CorpusMismatch";
    case ErrorKind::InvalidVerdict: return "InvalidVerdict";
    case ErrorKind::Config: return "Config";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message, std::string detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      message_(message),
      detail_(std::move(detail)) {}

Error Error::with_line(std::size_t line) const {
  Error copy(kind_, "line " + std::to_string(line) + ": " + message_, detail_);
  copy.line_ = line;
  return copy;
}

Error Error::with_prefix(std::string_view prefix) const {
  Error copy(kind_, std::string(prefix) + message_, detail_);
  copy.line_ = line_;
  return copy;
}

bool is_config_error(ErrorKind kind) {
  return kind == ErrorKind::Config || kind == ErrorKind::Io;
}

}  // namespace uner
