#include <set>

#include "uner/codecs.hpp"
#include "uner/error.hpp"
#include "uner/utf8.hpp"

namespace uner {

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::InvalidToken: return "InvalidToken";
    case ViolationKind::TokenOrder: return "TokenOrder";
    case ViolationKind::SpanRange: return "SpanRange";
    case ViolationKind::SpanOrder: return "SpanOrder";
    case ViolationKind::OverlappingSpans: return "OverlappingSpans";
    case ViolationKind::UnknownLabel: return "UnknownLabel";
    case ViolationKind::DuplicateSpanId: return "DuplicateSpanId";
    case ViolationKind::DuplicateDocId: return "DuplicateDocId";
    case ViolationKind::ConfidenceRange: return "ConfidenceRange";
  }
  return "?";
}

std::vector<Violation> validate_structure(const AnnotatedDocument& doc) {
  std::vector<Violation> out;
  const auto add = [&](ViolationKind k, std::string where, std::string msg) {
    out.push_back({k, doc.doc_id, std::move(where), std::move(msg)});
  };

  std::size_t text_len = 0;
  try {
    text_len = utf8::length(doc.text);
  } catch (const Error& e) {
    add(ViolationKind::InvalidToken, "text", e.message());
    return out;
  }
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    const auto& t = doc.tokens[i];
    if (t.start >= t.end || t.end > text_len) {
      add(ViolationKind::InvalidToken, std::to_string(i), "token offsets out of range");
    }
    if (i && t.start < doc.tokens[i - 1].end) {
      add(ViolationKind::TokenOrder, std::to_string(i), "token overlaps or precedes the previous token");
    }
  }

  std::set<std::string> ids;
  std::size_t furthest_end = 0;
  for (std::size_t k = 0; k < doc.spans.size(); ++k) {
    const auto& s = doc.spans[k];
    if (!ids.insert(s.id).second) add(ViolationKind::DuplicateSpanId, s.id, "span id used twice");
    if (s.token_start >= s.token_end || s.token_end > doc.tokens.size()) {
      add(ViolationKind::SpanRange, s.id, "token range [" + std::to_string(s.token_start) + "," +
                                              std::to_string(s.token_end) + ") invalid");
      continue;
    }
    if (s.confidence && !(*s.confidence >= 0.0 && *s.confidence <= 1.0)) {
      add(ViolationKind::ConfidenceRange, s.id, "confidence outside [0,1]");
    }
    if (k && s.token_start < doc.spans[k - 1].token_start) {
      add(ViolationKind::SpanOrder, s.id, "spans not sorted by token_start");
    }
    if (k && s.token_start < furthest_end) {
      add(ViolationKind::OverlappingSpans, s.id, "shares a token with an earlier span");
    }
    furthest_end = std::max(furthest_end, s.token_end);
  }
  return out;
}

std::vector<Violation> validate(const AnnotatedDocument& doc, const Taxonomy& taxonomy) {
  auto out = validate_structure(doc);
  for (const auto& s : doc.spans) {
    if (!taxonomy.contains(s.label)) {
      out.push_back({ViolationKind::UnknownLabel, doc.doc_id, s.id, "label \"" + s.label + "\" does not resolve"});
    }
  }
  return out;
}

std::vector<Violation> validate(const Corpus& corpus, const Taxonomy& taxonomy) {
  std::vector<Violation> out;
  std::set<std::string> doc_ids;
  for (const auto& doc : corpus) {
    if (!doc_ids.insert(doc.doc_id).second) {
      out.push_back({ViolationKind::DuplicateDocId, doc.doc_id, "doc_id", "doc_id appears twice in corpus"});
    }
    auto v = validate(doc, taxonomy);
    out.insert(out.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  }
  return out;
}

}  // namespace uner
