#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "uner/document.hpp"
#include "uner/execution.hpp"
#include "uner/taxonomy.hpp"

namespace uner {

/// Class memberships of one surface string, per knowledge base.
struct KbRecord {
  std::string surface;
  std::map<std::string, std::vector<std::string>> classes;  // kb_id -> class IRIs
  std::string retrieved_at;

  bool empty() const;
};

/// Source of class memberships. Implementations count every call so tests
/// can observe cache hits and assert that offline runs never reach the
/// network.
class KbClient {
 public:
  KbClient() = default;
  KbClient(KbClient&& other) noexcept
      : calls_(other.calls_.load()), network_calls_(other.network_calls_.load()) {}
  virtual ~KbClient() = default;

  std::vector<std::string> fetch(const std::string& kb_id, const std::string& surface);

  std::size_t calls() const { return calls_.load(); }
  std::size_t network_calls() const { return network_calls_.load(); }

 protected:
  virtual std::vector<std::string> do_fetch(const std::string& kb_id, const std::string& surface) = 0;
  void count_network_call() { ++network_calls_; }

 private:
  std::atomic<std::size_t> calls_{0};
  std::atomic<std::size_t> network_calls_{0};
};

/// Offline store of `{"surface", "kb_id", "classes"}` lines. A surface that
/// is absent yields no classes rather than an error.
class FixtureKbClient final : public KbClient {
 public:
  FixtureKbClient() = default;
  static FixtureKbClient load(const std::filesystem::path& file);
  void add(const std::string& surface, const std::string& kb_id, std::vector<std::string> classes);

 protected:
  std::vector<std::string> do_fetch(const std::string& kb_id, const std::string& surface) override;

 private:
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> store_;  // (kb_id, surface)
};

/// Live SPARQL client. Each kb id maps to an endpoint URL; surfaces are
/// matched on their English rdfs:label and classes come from rdf:type
/// (wdt:P31 for Wikidata). Throws EndpointUnavailable on transport or HTTP
/// errors.
class SparqlKbClient final : public KbClient {
 public:
  explicit SparqlKbClient(std::map<std::string, std::string> endpoints, int timeout_seconds = 20);

  static std::string build_query(const std::string& kb_id, const std::string& surface);

 protected:
  std::vector<std::string> do_fetch(const std::string& kb_id, const std::string& surface) override;

 private:
  std::map<std::string, std::string> endpoints_;
  int timeout_seconds_;
};

/// Surface-keyed record cache. Concurrent readers, serialized writers.
class KbCache {
 public:
  std::optional<KbRecord> get(const std::string& surface) const;
  void put(KbRecord record);
  std::size_t size() const;

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, KbRecord> records_;
};

/// Cached lookup across `kb_ids`.
KbRecord lookup(const std::string& surface, std::span<const std::string> kb_ids, KbClient& client, KbCache& cache);

/// One-to-one class IRI <-> UNER path tables, one per kb id.
class KbClassMappings {
 public:
  /// Rows `kb_id<TAB>class_iri<TAB>uner_path`. Throws NonInjectiveMapping
  /// when an IRI or a path appears twice for the same kb.
  static KbClassMappings load(const std::filesystem::path& file, const Taxonomy& taxonomy);
  static KbClassMappings parse(std::string_view content, const Taxonomy& taxonomy);

  void add(const std::string& kb_id, const std::string& class_iri, TagPath path);
  const TagPath* map(const std::string& kb_id, const std::string& class_iri) const;
  std::vector<std::string> kb_ids() const;

 private:
  std::map<std::string, std::map<std::string, TagPath>> forward_;
  std::map<std::string, std::map<std::string, std::string>> inverse_;
};

enum class CorrectionAction { replace, refine_only, annotate_only };

CorrectionAction parse_correction_action(std::string_view name);
std::string_view to_string(CorrectionAction action);

struct CorrectionPolicy {
  std::vector<std::string> kb_precedence{"wikidata", "dbpedia", "yago"};
  CorrectionAction action = CorrectionAction::refine_only;

  /// Throws Config when a kb id repeats.
  void check() const;
};

namespace correction_reason {
inline constexpr std::string_view kRefined = "refined";
inline constexpr std::string_view kReplaced = "replaced";
inline constexpr std::string_view kAnnotated = "annotated";
inline constexpr std::string_view kIdentity = "identity";
inline constexpr std::string_view kConflictSuppressed = "conflict-suppressed";
inline constexpr std::string_view kNoEvidence = "no-evidence";
}  // namespace correction_reason

struct CorrectionTrace {
  std::string doc_id;
  std::string span_id;
  std::string old_label;
  std::string new_label;  // the KB-proposed path, even when not applied
  std::string kb_id;
  std::string reason;
};

struct SpanCorrection {
  EntitySpan span;
  CorrectionTrace trace;
};

/// The first kb in precedence that has any mapped class decides; among its
/// mapped classes the deepest path wins, ties broken lexicographically.
/// Boundaries are never touched.
SpanCorrection correct_span(const EntitySpan& span, const KbRecord& record, const KbClassMappings& mappings,
                            const CorrectionPolicy& policy);

struct CorrectionReport {
  std::map<std::string, std::size_t> by_reason;
  std::size_t spans = 0;
  std::size_t lookups = 0;

  nlohmann::ordered_json to_json() const;
};

struct CorrectedCorpus {
  Corpus corpus;
  CorrectionReport report;
  std::vector<CorrectionTrace> traces;
};

/// Looks up every distinct surface once (sorted order, so client traffic is
/// deterministic), then corrects documents in parallel against the fixed
/// record set.
CorrectedCorpus correct_corpus(const Corpus& corpus, KbClient& client, KbCache& cache,
                               const KbClassMappings& mappings, const CorrectionPolicy& policy,
                               Execution exec = Execution::parallel);

}  // namespace uner
