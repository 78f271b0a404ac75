#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace uner {

/// Code-point offsets into the document text, end-exclusive. A token's index
/// is its position in AnnotatedDocument::tokens.
struct Token {
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

/// A labeled run of tokens [token_start, token_end). Character offsets are
/// derived from the covered tokens rather than stored. `label` is a dotted
/// TagPath for UNER-labeled corpora, or an external scheme label inside a
/// model run before mapping.
struct EntitySpan {
  std::string id;
  std::size_t token_start = 0;
  std::size_t token_end = 0;
  std::string label;
  std::string source;
  std::optional<double> confidence;

  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
};

struct AnnotatedDocument {
  std::string doc_id;
  std::string lang;
  std::string text;
  std::vector<Token> tokens;
  std::vector<EntitySpan> spans;

  std::size_t char_start(const EntitySpan& span) const { return tokens.at(span.token_start).start; }
  std::size_t char_end(const EntitySpan& span) const { return tokens.at(span.token_end - 1).end; }
  /// Surface string covered by `span` (allocates a code-point index).
  std::string surface(const EntitySpan& span) const;

  friend bool operator==(const AnnotatedDocument&, const AnnotatedDocument&) = default;
};

using Corpus = std::vector<AnnotatedDocument>;

/// Canonical span id derived from the token range, e.g. "t3-5". Unique within
/// a flat document, so tasks and traces can refer to spans stably.
std::string span_id(std::size_t token_start, std::size_t token_end);

/// Splits on Unicode whitespace.
std::vector<Token> whitespace_tokenize(std::string_view text);

/// Builds a document whose text is `words` joined by single spaces.
AnnotatedDocument make_document(std::string doc_id, std::string lang, const std::vector<std::string>& words);

bool same_tokenization(const AnnotatedDocument& a, const AnnotatedDocument& b);

/// Orders spans by (token_start, token_end).
void sort_spans(AnnotatedDocument& doc);

/// True when no two spans share a token. Spans must be sorted.
bool spans_are_flat(const std::vector<EntitySpan>& spans);

}  // namespace uner
