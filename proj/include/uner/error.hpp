#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace uner {

enum class ErrorKind {
  // taxonomy
  DuplicateSibling,
  DepthExceeded,
  IllegalName,
  MissingRoot,
  UnknownPath,
  LevelOutOfRange,
  UnmappedLabel,
  // codecs
  OverlappingSpans,
  UnknownLabel,
  MalformedMarkup,
  NestedSpans,
  SchemaViolation,
  OffsetOutOfRange,
  // ensemble
  MissingRecall,
  TokenizationMismatch,
  // kb_linker
  EndpointUnavailable,
  NonInjectiveMapping,
  // projection
  IndexOutOfRange,
  TargetAlreadyAnnotated,
  DuplicatePairId,
  // evaluation
  CorpusMismatch,
  // review
  InvalidVerdict,
  // plumbing
  Config,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. `detail` carries a machine-readable
/// payload where one exists (the deepest valid prefix for UnknownPath, the
/// offending label for UnmappedLabel); `line` is 1-based when the error comes
/// from a file reader and 0 otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string detail = {});

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& message() const noexcept { return message_; }
  const std::string& detail() const noexcept { return detail_; }
  std::size_t line() const noexcept { return line_; }

  Error with_line(std::size_t line) const;
  /// Same error with `prefix` prepended to the message; keeps the line.
  Error with_prefix(std::string_view prefix) const;

 private:
  ErrorKind kind_;
  std::string message_;
  std::string detail_;
  std::size_t line_ = 0;
};

/// True for failures caused by configuration or missing inputs rather than
/// bad data; the CLI maps these to exit code 2.
bool is_config_error(ErrorKind kind);

}  // namespace uner
