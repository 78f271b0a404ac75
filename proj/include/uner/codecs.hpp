#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uner/document.hpp"
#include "uner/taxonomy.hpp"

namespace uner {

// ---------------------------------------------------------------------------
// IOB2

inline constexpr std::string_view kOutsideTag = "O";

/// One tag per token: B-<path> at a span start, I-<path> inside, O outside.
/// Throws OverlappingSpans or OffsetOutOfRange.
std::vector<std::string> encode_iob2(const AnnotatedDocument& doc);

/// Rebuilds spans over the tokenization of `tokenized` (its own spans are
/// ignored). An I-X that does not continue a B-X/I-X is repaired to B-X and a
/// warning appended. With a taxonomy, labels that do not resolve raise
/// UnknownLabel. Decoded spans get canonical ids and an empty source.
AnnotatedDocument decode_iob2(std::span<const std::string> tags, const AnnotatedDocument& tokenized,
                              std::vector<std::string>* warnings = nullptr, const Taxonomy* taxonomy = nullptr);

// ---------------------------------------------------------------------------
// Inline XML

using Tokenizer = std::function<std::vector<Token>(std::string_view text)>;

/// Document text with each span wrapped in <path>...</path>. '&', '<', '>'
/// and line breaks in text are escaped so the result fits on one line.
std::string encode_inline_xml(const AnnotatedDocument& doc);

/// Strips the markup, tokenizes the plain text and snaps each element's
/// character range outward to token boundaries (warning when a boundary
/// moved). Throws MalformedMarkup, NestedSpans, UnknownLabel (with taxonomy)
/// or OverlappingSpans when two elements snap onto a shared token.
AnnotatedDocument decode_inline_xml(std::string_view markup, const Tokenizer& tokenizer = whitespace_tokenize,
                                    std::vector<std::string>* warnings = nullptr,
                                    const Taxonomy* taxonomy = nullptr);

// ---------------------------------------------------------------------------
// Index-based spans (interchange record, one JSON object per line)

/// Canonical field order, no trailing newline. Byte-stable.
std::string encode_spans(const AnnotatedDocument& doc);
/// Throws SchemaViolation or OffsetOutOfRange.
AnnotatedDocument decode_spans(std::string_view record);

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind {
  InvalidToken,
  TokenOrder,
  SpanRange,
  SpanOrder,
  OverlappingSpans,
  UnknownLabel,
  DuplicateSpanId,
  DuplicateDocId,
  ConfidenceRange,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string doc_id;
  std::string where;  // span id or token index
  std::string message;
};

/// Empty iff every structural invariant holds and every label resolves.
std::vector<Violation> validate(const AnnotatedDocument& doc, const Taxonomy& taxonomy);
/// Structural checks only (no label resolution).
std::vector<Violation> validate_structure(const AnnotatedDocument& doc);
std::vector<Violation> validate(const Corpus& corpus, const Taxonomy& taxonomy);

// ---------------------------------------------------------------------------
// Files

enum class Format { spans, iob2, inline_xml };

/// Accepts "spans"/"jsonl", "iob2"/"bio", "xml"/"inline-xml".
Format parse_format(std::string_view name);
std::string_view to_string(Format format);

/// Streams documents one at a time. Errors carry 1-based line numbers.
class CorpusReader {
 public:
  CorpusReader(std::istream& in, Format format, Tokenizer tokenizer = whitespace_tokenize,
               const Taxonomy* taxonomy = nullptr);

  std::optional<AnnotatedDocument> next();
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::optional<AnnotatedDocument> next_iob2();

  std::istream& in_;
  Format format_;
  Tokenizer tokenizer_;
  const Taxonomy* taxonomy_;
  std::size_t line_ = 0;
  std::size_t ordinal_ = 0;
  std::vector<std::string> warnings_;
};

struct WriterOptions {
  /// Emit "# doc_id = <id>" before each IOB2 block so ids survive conversion.
  bool iob2_doc_headers = false;
};

class CorpusWriter {
 public:
  CorpusWriter(std::ostream& out, Format format, WriterOptions options = {});
  void write(const AnnotatedDocument& doc);

 private:
  std::ostream& out_;
  Format format_;
  WriterOptions options_;
  std::size_t written_ = 0;
};

Corpus read_corpus(const std::filesystem::path& file, Format format = Format::spans);
/// Writes through a temporary sibling and renames, so a failed write never
/// leaves a truncated file in place.
void write_corpus(const std::filesystem::path& file, const Corpus& corpus, Format format = Format::spans,
                  WriterOptions options = {});
void write_text_atomic(const std::filesystem::path& file, std::string_view content);

}  // namespace uner
