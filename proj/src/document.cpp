#include "uner/document.hpp"

#include <algorithm>

#include "uner/utf8.hpp"

namespace uner {

std::string AnnotatedDocument::surface(const EntitySpan& span) const {
  return std::string(utf8::TextIndex(text).slice(char_start(span), char_end(span)));
}

std::string span_id(std::size_t token_start, std::size_t token_end) {
  return "t" + std::to_string(token_start) + "-" + std::to_string(token_end);
}

std::vector<Token> whitespace_tokenize(std::string_view text) {
  std::vector<Token> tokens;
  const auto cps = utf8::decode(text);
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && utf8::is_space(cps[i])) ++i;
    if (i == cps.size()) break;
    const auto start = i;
    while (i < cps.size() && !utf8::is_space(cps[i])) ++i;
    tokens.push_back({start, i});
  }
  return tokens;
}

AnnotatedDocument make_document(std::string doc_id, std::string lang, const std::vector<std::string>& words) {
  AnnotatedDocument doc;
  doc.doc_id = std::move(doc_id);
  doc.lang = std::move(lang);
  std::size_t offset = 0;
  for (const auto& w : words) {
    if (!doc.text.empty()) {
      doc.text.push_back(' ');
      ++offset;
    }
    const auto len = utf8::length(w);
    doc.text += w;
    doc.tokens.push_back({offset, offset + len});
    offset += len;
  }
  return doc;
}

bool same_tokenization(const AnnotatedDocument& a, const AnnotatedDocument& b) {
  return a.text == b.text && a.tokens == b.tokens;
}

void sort_spans(AnnotatedDocument& doc) {
  std::stable_sort(doc.spans.begin(), doc.spans.end(), [](const EntitySpan& x, const EntitySpan& y) {
    return x.token_start != y.token_start ? x.token_start < y.token_start : x.token_end < y.token_end;
  });
}

bool spans_are_flat(const std::vector<EntitySpan>& spans) {
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].token_start < spans[i - 1].token_end) return false;
  }
  return true;
}

}  // namespace uner
