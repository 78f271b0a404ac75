#include "uner/codecs.hpp"

#include <algorithm>

#include "json.hpp"
#include "uner/error.hpp"
#include "uner/utf8.hpp"

namespace uner {
namespace {

std::vector<EntitySpan> sorted_flat_spans(const AnnotatedDocument& doc) {
  std::vector<EntitySpan> spans = doc.spans;
  std::stable_sort(spans.begin(), spans.end(), [](const EntitySpan& a, const EntitySpan& b) {
    return a.token_start != b.token_start ? a.token_start < b.token_start : a.token_end < b.token_end;
  });
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const auto& s = spans[i];
    if (s.token_start >= s.token_end || s.token_end > doc.tokens.size()) {
      throw Error(ErrorKind::OffsetOutOfRange, "span " + s.id + " [" + std::to_string(s.token_start) + "," +
                                                   std::to_string(s.token_end) + ") outside " +
                                                   std::to_string(doc.tokens.size()) + " tokens in " + doc.doc_id);
    }
    if (i && s.token_start < spans[i - 1].token_end) {
      throw Error(ErrorKind::OverlappingSpans, "spans " + spans[i - 1].id + " and " + s.id + " overlap in " + doc.doc_id);
    }
  }
  return spans;
}

void check_label(std::string_view label, const Taxonomy* taxonomy) {
  if (label.empty()) throw Error(ErrorKind::UnknownLabel, "empty label");
  if (taxonomy && !taxonomy->contains(label)) {
    throw Error(ErrorKind::UnknownLabel, "label \"" + std::string(label) + "\" is not in the taxonomy",
                std::string(label));
  }
}

EntitySpan make_span(std::size_t start, std::size_t end, std::string label) {
  return {span_id(start, end), start, end, std::move(label), {}, std::nullopt};
}

void append_escaped(std::string& out, char32_t cp) {
  switch (cp) {
    case U'&': out += "&amp;"; break;
    case U'<': out += "&lt;"; break;
    case U'>': out += "&gt;"; break;
    case U'\n': out += "&#10;"; break;
    case U'\r': out += "&#13;"; break;
    default: utf8::append(out, cp);
  }
}

// Parses the entity starting at markup[i] == '&'; returns the decoded code
// point and advances i past ';'.
char32_t parse_entity(std::string_view markup, std::size_t& i) {
  const auto semi = markup.find(';', i);
  if (semi == std::string_view::npos || semi - i > 12) {
    throw Error(ErrorKind::MalformedMarkup, "unterminated entity at byte " + std::to_string(i));
  }
  const auto name = markup.substr(i + 1, semi - i - 1);
  i = semi + 1;
  if (name == "amp") return U'&';
  if (name == "lt") return U'<';
  if (name == "gt") return U'>';
  if (name == "quot") return U'"';
  if (name == "apos") return U'\'';
  if (name.size() > 1 && name[0] == '#') {
    const bool hex = name[1] == 'x' || name[1] == 'X';
    const auto digits = name.substr(hex ? 2 : 1);
    if (digits.empty()) throw Error(ErrorKind::MalformedMarkup, "empty character reference");
    char32_t cp = 0;
    for (char c : digits) {
      int v = -1;
      if (c >= '0' && c <= '9') v = c - '0';
      else if (hex && c >= 'a' && c <= 'f') v = c - 'a' + 10;
      else if (hex && c >= 'A' && c <= 'F') v = c - 'A' + 10;
      if (v < 0) throw Error(ErrorKind::MalformedMarkup, "bad character reference &" + std::string(name) + ";");
      cp = cp * (hex ? 16 : 10) + static_cast<char32_t>(v);
      if (cp > 0x10FFFF) throw Error(ErrorKind::MalformedMarkup, "character reference out of range");
    }
    return cp;
  }
  throw Error(ErrorKind::MalformedMarkup, "unknown entity &" + std::string(name) + ";");
}

}  // namespace

// ---------------------------------------------------------------------------
// IOB2

std::vector<std::string> encode_iob2(const AnnotatedDocument& doc) {
  std::vector<std::string> tags(doc.tokens.size(), std::string(kOutsideTag));
  for (const auto& s : sorted_flat_spans(doc)) {
    tags[s.token_start] = "B-" + s.label;
    for (auto t = s.token_start + 1; t < s.token_end; ++t) tags[t] = "I-" + s.label;
  }
  return tags;
}

AnnotatedDocument decode_iob2(std::span<const std::string> tags, const AnnotatedDocument& tokenized,
                              std::vector<std::string>* warnings, const Taxonomy* taxonomy) {
  if (tags.size() != tokenized.tokens.size()) {
    throw Error(ErrorKind::SchemaViolation, std::to_string(tags.size()) + " tags for " +
                                                std::to_string(tokenized.tokens.size()) + " tokens in " +
                                                tokenized.doc_id);
  }
  AnnotatedDocument doc{tokenized.doc_id, tokenized.lang, tokenized.text, tokenized.tokens, {}};

  std::optional<std::size_t> open_start;
  std::string open_label;
  const auto close = [&](std::size_t end) {
    if (open_start) doc.spans.push_back(make_span(*open_start, end, std::move(open_label)));
    open_start.reset();
    open_label.clear();
  };

  for (std::size_t i = 0; i < tags.size(); ++i) {
    const std::string_view tag = tags[i];
    if (tag == kOutsideTag) {
      close(i);
      continue;
    }
    if (tag.size() < 2 || tag[1] != '-' || (tag[0] != 'B' && tag[0] != 'I')) {
      throw Error(ErrorKind::SchemaViolation, "tag \"" + std::string(tag) + "\" at token " + std::to_string(i) +
                                                  " is not O, B-<label> or I-<label>");
    }
    const auto label = tag.substr(2);
    check_label(label, taxonomy);
    if (tag[0] == 'I' && open_start && open_label == label) continue;
    if (tag[0] == 'I' && warnings) {
      warnings->push_back(tokenized.doc_id + ": dangling I-" + std::string(label) + " at token " + std::to_string(i) +
                          " repaired to B-");
    }
    close(i);
    open_start = i;
    open_label = std::string(label);
  }
  close(tags.size());
  return doc;
}

// ---------------------------------------------------------------------------
// Inline XML

std::string encode_inline_xml(const AnnotatedDocument& doc) {
  const auto spans = sorted_flat_spans(doc);
  const auto cps = utf8::decode(doc.text);
  std::string out;
  out.reserve(doc.text.size() + spans.size() * 32);
  std::size_t pos = 0;
  for (const auto& s : spans) {
    if (s.label.find_first_of("<>&/\n\r") != std::string::npos || s.label.empty()) {
      throw Error(ErrorKind::SchemaViolation, "label \"" + s.label + "\" cannot be used as an element name");
    }
    const auto begin = doc.char_start(s);
    const auto end = doc.char_end(s);
    if (end > cps.size()) throw Error(ErrorKind::OffsetOutOfRange, "token offsets beyond text in " + doc.doc_id);
    for (; pos < begin; ++pos) append_escaped(out, cps[pos]);
    out += "<" + s.label + ">";
    for (; pos < end; ++pos) append_escaped(out, cps[pos]);
    out += "</" + s.label + ">";
  }
  for (; pos < cps.size(); ++pos) append_escaped(out, cps[pos]);
  return out;
}

AnnotatedDocument decode_inline_xml(std::string_view markup, const Tokenizer& tokenizer,
                                    std::vector<std::string>* warnings, const Taxonomy* taxonomy) {
  struct Element {
    std::string label;
    std::size_t begin;
    std::size_t end;
  };
  std::string text;
  std::size_t text_len = 0;  // code points
  std::vector<Element> elements;
  std::optional<Element> open;

  std::size_t i = 0;
  while (i < markup.size()) {
    const char c = markup[i];
    if (c == '<') {
      const auto close_at = markup.find('>', i);
      if (close_at == std::string_view::npos) {
        throw Error(ErrorKind::MalformedMarkup, "unterminated tag at byte " + std::to_string(i));
      }
      auto name = markup.substr(i + 1, close_at - i - 1);
      i = close_at + 1;
      if (!name.empty() && name.front() == '/') {
        name.remove_prefix(1);
        if (!open) throw Error(ErrorKind::MalformedMarkup, "closing </" + std::string(name) + "> without opening tag");
        if (open->label != name) {
          throw Error(ErrorKind::MalformedMarkup,
                      "closing </" + std::string(name) + "> does not match <" + open->label + ">");
        }
        if (text_len == open->begin) throw Error(ErrorKind::MalformedMarkup, "empty element <" + open->label + ">");
        open->end = text_len;
        elements.push_back(std::move(*open));
        open.reset();
        continue;
      }
      if (name.empty() || name.find('<') != std::string_view::npos) {
        throw Error(ErrorKind::MalformedMarkup, "empty or broken tag at byte " + std::to_string(i));
      }
      if (open) {
        throw Error(ErrorKind::NestedSpans, "<" + std::string(name) + "> opened inside <" + open->label + ">");
      }
      check_label(name, taxonomy);
      open = Element{std::string(name), text_len, 0};
      continue;
    }
    if (c == '>') throw Error(ErrorKind::MalformedMarkup, "stray '>' at byte " + std::to_string(i));
    if (c == '&') {
      utf8::append(text, parse_entity(markup, i));
      ++text_len;
      continue;
    }
    // Copy one UTF-8 sequence.
    const auto b = static_cast<unsigned char>(c);
    const std::size_t len = b < 0x80 ? 1 : (b & 0xE0) == 0xC0 ? 2 : (b & 0xF0) == 0xE0 ? 3 : 4;
    text.append(markup.substr(i, len));
    i += len;
    ++text_len;
  }
  if (open) throw Error(ErrorKind::MalformedMarkup, "unclosed <" + open->label + ">");

  AnnotatedDocument doc;
  doc.text = std::move(text);
  utf8::length(doc.text);  // validates the UTF-8 we copied through
  doc.tokens = tokenizer(doc.text);

  for (auto& e : elements) {
    // First token ending after the element start, last token starting before its end.
    auto first = std::find_if(doc.tokens.begin(), doc.tokens.end(), [&](const Token& t) { return t.end > e.begin; });
    std::size_t ts = static_cast<std::size_t>(first - doc.tokens.begin());
    std::size_t te = ts;
    while (te < doc.tokens.size() && doc.tokens[te].start < e.end) ++te;
    if (te == ts) {
      throw Error(ErrorKind::MalformedMarkup, "element <" + e.label + "> covers no token");
    }
    if (warnings && (doc.tokens[ts].start != e.begin || doc.tokens[te - 1].end != e.end)) {
      warnings->push_back("element <" + e.label + "> at [" + std::to_string(e.begin) + "," + std::to_string(e.end) +
                          ") snapped to [" + std::to_string(doc.tokens[ts].start) + "," +
                          std::to_string(doc.tokens[te - 1].end) + ")");
    }
    if (!doc.spans.empty() && ts < doc.spans.back().token_end) {
      throw Error(ErrorKind::OverlappingSpans, "element <" + e.label + "> shares a token with the previous element");
    }
    doc.spans.push_back(make_span(ts, te, std::move(e.label)));
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Interchange records

std::string encode_spans(const AnnotatedDocument& doc) {
  nlohmann::ordered_json j;
  j["doc_id"] = doc.doc_id;
  j["lang"] = doc.lang;
  j["text"] = doc.text;
  auto& tokens = j["tokens"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    nlohmann::ordered_json t;
    t["i"] = i;
    t["start"] = doc.tokens[i].start;
    t["end"] = doc.tokens[i].end;
    tokens.push_back(std::move(t));
  }
  auto& spans = j["spans"] = nlohmann::ordered_json::array();
  for (const auto& s : doc.spans) {
    nlohmann::ordered_json o;
    o["id"] = s.id;
    o["token_start"] = s.token_start;
    o["token_end"] = s.token_end;
    o["label"] = s.label;
    o["source"] = s.source;
    o["confidence"] = s.confidence ? nlohmann::ordered_json(*s.confidence) : nlohmann::ordered_json(nullptr);
    spans.push_back(std::move(o));
  }
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
}

namespace {

const nlohmann::json& field(const nlohmann::json& obj, const char* name, nlohmann::json::value_t type) {
  auto it = obj.find(name);
  if (it == obj.end()) throw Error(ErrorKind::SchemaViolation, std::string("missing field \"") + name + "\"");
  const bool ok = type == nlohmann::json::value_t::number_integer
                      ? it->is_number_integer()
                      : it->type() == type;
  if (!ok) throw Error(ErrorKind::SchemaViolation, std::string("field \"") + name + "\" has the wrong type");
  return *it;
}

std::size_t index_field(const nlohmann::json& obj, const char* name) {
  const auto& v = field(obj, name, nlohmann::json::value_t::number_integer);
  const auto n = v.get<long long>();
  if (n < 0) throw Error(ErrorKind::OffsetOutOfRange, std::string("negative \"") + name + "\"");
  return static_cast<std::size_t>(n);
}

}  // namespace

AnnotatedDocument decode_spans(std::string_view record) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(record);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaViolation, std::string("not a JSON record: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::SchemaViolation, "record is not an object");
  using vt = nlohmann::json::value_t;

  AnnotatedDocument doc;
  doc.doc_id = field(j, "doc_id", vt::string).get<std::string>();
  doc.lang = field(j, "lang", vt::string).get<std::string>();
  doc.text = field(j, "text", vt::string).get<std::string>();
  const auto text_len = utf8::length(doc.text);

  const auto& tokens = field(j, "tokens", vt::array);
  doc.tokens.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!t.is_object()) throw Error(ErrorKind::SchemaViolation, "token is not an object");
    if (index_field(t, "i") != doc.tokens.size()) {
      throw Error(ErrorKind::SchemaViolation, "token index out of sequence at position " +
                                                  std::to_string(doc.tokens.size()));
    }
    Token tok{index_field(t, "start"), index_field(t, "end")};
    if (tok.end <= tok.start || tok.end > text_len) {
      throw Error(ErrorKind::OffsetOutOfRange, "token " + std::to_string(doc.tokens.size()) + " [" +
                                                   std::to_string(tok.start) + "," + std::to_string(tok.end) +
                                                   ") invalid for text of length " + std::to_string(text_len));
    }
    doc.tokens.push_back(tok);
  }

  const auto& spans = field(j, "spans", vt::array);
  doc.spans.reserve(spans.size());
  for (const auto& s : spans) {
    if (!s.is_object()) throw Error(ErrorKind::SchemaViolation, "span is not an object");
    EntitySpan span;
    span.id = field(s, "id", vt::string).get<std::string>();
    span.token_start = index_field(s, "token_start");
    span.token_end = index_field(s, "token_end");
    span.label = field(s, "label", vt::string).get<std::string>();
    if (auto it = s.find("source"); it != s.end()) {
      if (!it->is_string()) throw Error(ErrorKind::SchemaViolation, "field \"source\" has the wrong type");
      span.source = it->get<std::string>();
    }
    if (auto it = s.find("confidence"); it != s.end() && !it->is_null()) {
      if (!it->is_number()) throw Error(ErrorKind::SchemaViolation, "field \"confidence\" has the wrong type");
      span.confidence = it->get<double>();
    }
    if (span.token_end <= span.token_start || span.token_end > doc.tokens.size()) {
      throw Error(ErrorKind::OffsetOutOfRange, "span " + span.id + " [" + std::to_string(span.token_start) + "," +
                                                   std::to_string(span.token_end) + ") outside " +
                                                   std::to_string(doc.tokens.size()) + " tokens");
    }
    doc.spans.push_back(std::move(span));
  }
  return doc;
}

}  // namespace uner
