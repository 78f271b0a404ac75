#include <fstream>
#include <istream>
#include <ostream>

#include "uner/codecs.hpp"
#include "uner/error.hpp"
#include "uner/utf8.hpp"

namespace uner {

Format parse_format(std::string_view name) {
  if (name == "spans" || name == "jsonl") return Format::spans;
  if (name == "iob2" || name == "bio") return Format::iob2;
  if (name == "xml" || name == "inline-xml") return Format::inline_xml;
  throw Error(ErrorKind::Config, "unknown format \"" + std::string(name) + "\" (spans, iob2, xml)");
}

std::string_view to_string(Format format) {
  switch (format) {
    case Format::spans: return "spans";
    case Format::iob2: return "iob2";
    case Format::inline_xml: return "xml";
  }
  return "?";
}

CorpusReader::CorpusReader(std::istream& in, Format format, Tokenizer tokenizer, const Taxonomy* taxonomy)
    : in_(in), format_(format), tokenizer_(std::move(tokenizer)), taxonomy_(taxonomy) {}

std::optional<AnnotatedDocument> CorpusReader::next() {
  if (format_ == Format::iob2) return next_iob2();
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // inline XML is one document per line, so a blank line is an empty document
    if (line.empty() && format_ == Format::spans) continue;
    try {
      ++ordinal_;
      if (format_ == Format::spans) return decode_spans(line);
      std::vector<std::string> warnings;
      auto doc = decode_inline_xml(line, tokenizer_, &warnings, taxonomy_);
      doc.doc_id = "doc-" + std::to_string(ordinal_);
      for (auto& w : warnings) warnings_.push_back("line " + std::to_string(line_) + ": " + w);
      return doc;
    } catch (const Error& e) {
      throw e.with_line(line_);
    }
  }
  return std::nullopt;
}

std::optional<AnnotatedDocument> CorpusReader::next_iob2() {
  std::vector<std::string> surfaces;
  std::vector<std::string> tags;
  std::string doc_id;
  std::size_t first_line = 0;
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (!surfaces.empty() || !doc_id.empty()) break;
      continue;
    }
    if (line.front() == '#') {
      static constexpr std::string_view kHeader = "# doc_id = ";
      if (line.compare(0, kHeader.size(), kHeader) == 0) {
        if (!surfaces.empty()) {
          throw Error(ErrorKind::SchemaViolation, "doc_id header inside a document").with_line(line_);
        }
        doc_id = line.substr(kHeader.size());
      }
      continue;
    }
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos || tab == 0) {
      throw Error(ErrorKind::SchemaViolation, "expected surface<TAB>tag").with_line(line_);
    }
    if (surfaces.empty()) first_line = line_;
    surfaces.push_back(line.substr(0, tab));
    tags.push_back(line.substr(tab + 1));
  }
  if (surfaces.empty() && doc_id.empty()) return std::nullopt;

  ++ordinal_;
  if (doc_id.empty()) doc_id = "doc-" + std::to_string(ordinal_);
  try {
    auto tokenized = make_document(std::move(doc_id), "", surfaces);
    std::vector<std::string> warnings;
    auto doc = decode_iob2(tags, tokenized, &warnings, taxonomy_);
    for (auto& w : warnings) warnings_.push_back("line " + std::to_string(first_line) + ": " + w);
    return doc;
  } catch (const Error& e) {
    throw e.with_line(first_line);
  }
}

CorpusWriter::CorpusWriter(std::ostream& out, Format format, WriterOptions options)
    : out_(out), format_(format), options_(options) {}

void CorpusWriter::write(const AnnotatedDocument& doc) {
  switch (format_) {
    case Format::spans:
      out_ << encode_spans(doc) << '\n';
      break;
    case Format::inline_xml:
      out_ << encode_inline_xml(doc) << '\n';
      break;
    case Format::iob2: {
      const auto tags = encode_iob2(doc);
      if (written_) out_ << '\n';
      if (options_.iob2_doc_headers) out_ << "# doc_id = " << doc.doc_id << '\n';
      const utf8::TextIndex index(doc.text);
      for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
        out_ << index.slice(doc.tokens[i].start, doc.tokens[i].end) << '\t' << tags[i] << '\n';
      }
      break;
    }
  }
  ++written_;
}

Corpus read_corpus(const std::filesystem::path& file, Format format) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + file.string());
  CorpusReader reader(in, format);
  Corpus corpus;
  try {
    while (auto doc = reader.next()) corpus.push_back(std::move(*doc));
  } catch (const Error& e) {
    throw e.with_prefix(file.string() + ": ");
  }
  return corpus;
}

namespace {

template <typename Fn>
void write_atomic(const std::filesystem::path& file, Fn&& fill) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  auto tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    try {
      fill(out);
    } catch (...) {
      out.close();
      std::filesystem::remove(tmp);
      throw;
    }
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

}  // namespace

void write_corpus(const std::filesystem::path& file, const Corpus& corpus, Format format, WriterOptions options) {
  write_atomic(file, [&](std::ostream& out) {
    CorpusWriter writer(out, format, options);
    for (const auto& doc : corpus) writer.write(doc);
  });
}

void write_text_atomic(const std::filesystem::path& file, std::string_view content) {
  write_atomic(file, [&](std::ostream& out) { out << content; });
}

}  // namespace uner
