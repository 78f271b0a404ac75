#include "uner/kb_linker.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "uner/error.hpp"
#include "uner/utf8.hpp"
#include "parallel.hpp"

namespace uner {

bool KbRecord::empty() const {
  return std::all_of(classes.begin(), classes.end(), [](const auto& kv) { return kv.second.empty(); });
}

std::vector<std::string> KbClient::fetch(const std::string& kb_id, const std::string& surface) {
  ++calls_;
  return do_fetch(kb_id, surface);
}

FixtureKbClient FixtureKbClient::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::Io, "cannot open fixture store " + file.string());
  FixtureKbClient client;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    try {
      const auto j = nlohmann::json::parse(line);
      client.add(j.at("surface").get<std::string>(), j.at("kb_id").get<std::string>(),
                 j.at("classes").get<std::vector<std::string>>());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::SchemaViolation, file.string() + ": " + e.what()).with_line(line_no);
    }
  }
  return client;
}

void FixtureKbClient::add(const std::string& surface, const std::string& kb_id, std::vector<std::string> classes) {
  auto& slot = store_[{kb_id, surface}];
  slot.insert(slot.end(), classes.begin(), classes.end());
}

std::vector<std::string> FixtureKbClient::do_fetch(const std::string& kb_id, const std::string& surface) {
  auto it = store_.find({kb_id, surface});
  return it == store_.end() ? std::vector<std::string>{} : it->second;
}

std::optional<KbRecord> KbCache::get(const std::string& surface) const {
  std::shared_lock lock(mutex_);
  auto it = records_.find(surface);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

void KbCache::put(KbRecord record) {
  std::unique_lock lock(mutex_);
  auto key = record.surface;
  records_.insert_or_assign(std::move(key), std::move(record));
}

std::size_t KbCache::size() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

KbRecord lookup(const std::string& surface, std::span<const std::string> kb_ids, KbClient& client, KbCache& cache) {
  if (auto hit = cache.get(surface)) {
    // A record cached for fewer kbs is topped up rather than trusted.
    if (std::all_of(kb_ids.begin(), kb_ids.end(), [&](const auto& kb) { return hit->classes.count(kb) > 0; })) {
      return *hit;
    }
  }
  KbRecord record;
  record.surface = surface;
  for (const auto& kb : kb_ids) record.classes[kb] = client.fetch(kb, surface);
  record.retrieved_at = client.network_calls() ? "live" : "fixture";
  cache.put(record);
  return record;
}

KbClassMappings KbClassMappings::parse(std::string_view content, const Taxonomy& taxonomy) {
  KbClassMappings m;
  std::istringstream in{std::string(content)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
      throw Error(ErrorKind::SchemaViolation, "expected kb_id<TAB>class_iri<TAB>uner_path").with_line(line_no);
    }
    try {
      m.add(line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1), taxonomy.resolve(line.substr(t2 + 1)));
    } catch (const Error& e) {
      throw e.with_line(line_no);
    }
  }
  return m;
}

KbClassMappings KbClassMappings::load(const std::filesystem::path& file, const Taxonomy& taxonomy) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::Io, "cannot open kb mapping " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), taxonomy);
}

void KbClassMappings::add(const std::string& kb_id, const std::string& class_iri, TagPath path) {
  auto& fwd = forward_[kb_id];
  auto& inv = inverse_[kb_id];
  if (fwd.count(class_iri)) {
    throw Error(ErrorKind::NonInjectiveMapping, kb_id + " class " + class_iri + " mapped twice");
  }
  if (auto it = inv.find(path.str()); it != inv.end()) {
    throw Error(ErrorKind::NonInjectiveMapping,
                kb_id + " maps both " + it->second + " and " + class_iri + " to " + path.str());
  }
  inv.emplace(path.str(), class_iri);
  fwd.emplace(class_iri, std::move(path));
}

const TagPath* KbClassMappings::map(const std::string& kb_id, const std::string& class_iri) const {
  auto kb = forward_.find(kb_id);
  if (kb == forward_.end()) return nullptr;
  auto it = kb->second.find(class_iri);
  return it == kb->second.end() ? nullptr : &it->second;
}

std::vector<std::string> KbClassMappings::kb_ids() const {
  std::vector<std::string> out;
  for (const auto& [kb, _] : forward_) out.push_back(kb);
  return out;
}

CorrectionAction parse_correction_action(std::string_view name) {
  if (name == "replace") return CorrectionAction::replace;
  if (name == "refine-only") return CorrectionAction::refine_only;
  if (name == "annotate-only") return CorrectionAction::annotate_only;
  throw Error(ErrorKind::Config, "unknown policy \"" + std::string(name) + "\" (replace, refine-only, annotate-only)");
}

std::string_view to_string(CorrectionAction action) {
  switch (action) {
    case CorrectionAction::replace: return "replace";
    case CorrectionAction::refine_only: return "refine-only";
    case CorrectionAction::annotate_only: return "annotate-only";
  }
  return "?";
}

void CorrectionPolicy::check() const {
  std::set<std::string> seen;
  for (const auto& kb : kb_precedence) {
    if (!seen.insert(kb).second) throw Error(ErrorKind::Config, "kb \"" + kb + "\" listed twice in precedence");
  }
}

SpanCorrection correct_span(const EntitySpan& span, const KbRecord& record, const KbClassMappings& mappings,
                            const CorrectionPolicy& policy) {
  namespace reason = correction_reason;
  SpanCorrection out{span, {{}, span.id, span.label, {}, {}, std::string(reason::kNoEvidence)}};

  const TagPath* best = nullptr;
  for (const auto& kb : policy.kb_precedence) {
    auto it = record.classes.find(kb);
    if (it == record.classes.end()) continue;
    for (const auto& iri : it->second) {
      const auto* path = mappings.map(kb, iri);
      if (!path) continue;
      if (!best || path->depth() > best->depth() || (path->depth() == best->depth() && path->str() < best->str())) {
        best = path;
      }
    }
    if (best) {
      out.trace.kb_id = kb;
      break;
    }
  }
  if (!best) return out;

  auto& trace = out.trace;
  trace.new_label = best->str();
  if (best->str() == span.label) {
    trace.reason = reason::kIdentity;
    // under replace the KB is authoritative, so a confirmed label is re-sourced too
    if (policy.action == CorrectionAction::replace) out.span.source = "kb:" + trace.kb_id;
    return out;
  }
  bool apply = false;
  switch (policy.action) {
    case CorrectionAction::annotate_only:
      trace.reason = reason::kAnnotated;
      break;
    case CorrectionAction::replace:
      trace.reason = reason::kReplaced;
      apply = true;
      break;
    case CorrectionAction::refine_only: {
      const auto current = TagPath::parse(span.label);
      apply = best->is_descendant_of(current);
      trace.reason = apply ? reason::kRefined : reason::kConflictSuppressed;
      break;
    }
  }
  if (apply) {
    out.span.label = best->str();
    out.span.source = "kb:" + trace.kb_id;
  }
  return out;
}

nlohmann::ordered_json CorrectionReport::to_json() const {
  nlohmann::ordered_json j;
  j["spans"] = spans;
  j["lookups"] = lookups;
  j["by_reason"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : by_reason) j["by_reason"][k] = v;
  return j;
}

CorrectedCorpus correct_corpus(const Corpus& corpus, KbClient& client, KbCache& cache,
                               const KbClassMappings& mappings, const CorrectionPolicy& policy, Execution exec) {
  policy.check();

  std::vector<std::vector<std::string>> surfaces(corpus.size());
  std::set<std::string> distinct;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const auto& doc = corpus[d];
    if (doc.spans.empty()) continue;
    const utf8::TextIndex index(doc.text);
    for (const auto& s : doc.spans) {
      auto& surface = surfaces[d].emplace_back(index.slice(doc.char_start(s), doc.char_end(s)));
      distinct.insert(surface);
    }
  }
  std::map<std::string, KbRecord, std::less<>> records;
  for (const auto& surface : distinct) {
    records.emplace(surface, lookup(surface, policy.kb_precedence, client, cache));
  }

  CorrectedCorpus out;
  out.corpus = corpus;
  std::vector<std::vector<CorrectionTrace>> traces(corpus.size());
  const auto run = [&](std::size_t d) {
    auto& doc = out.corpus[d];
    traces[d].reserve(doc.spans.size());
    for (std::size_t k = 0; k < doc.spans.size(); ++k) {
      auto fixed = correct_span(doc.spans[k], records.find(surfaces[d][k])->second, mappings, policy);
      fixed.trace.doc_id = doc.doc_id;
      doc.spans[k] = std::move(fixed.span);
      traces[d].push_back(std::move(fixed.trace));
    }
  };
  detail::for_each_index(corpus.size(), exec, run);

  out.report.lookups = distinct.size();
  for (auto& doc_traces : traces) {
    for (auto& t : doc_traces) {
      ++out.report.by_reason[t.reason];
      ++out.report.spans;
      out.traces.push_back(std::move(t));
    }
  }
  return out;
}

}  // namespace uner
