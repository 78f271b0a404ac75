#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "uner/document.hpp"
#include "uner/execution.hpp"
#include "uner/taxonomy.hpp"

namespace uner {

/// Scheme id whose labels are already UNER paths.
inline constexpr std::string_view kUnerScheme = "uner";

/// One tagger's output over a corpus. `reported_recall` is the priority key;
/// it is optional only so that a missing value can be reported as an error.
struct ModelRun {
  std::string model_id;
  std::optional<double> reported_recall;
  std::string scheme_id;
  Corpus documents;
};

/// Descending recall, ties by ascending model_id. Throws MissingRecall.
std::vector<const ModelRun*> rank_models(std::span<const ModelRun> runs);

/// Maps a run's native labels into canonical UNER paths.
class LabelMapper {
 public:
  LabelMapper(const Taxonomy& taxonomy, const SchemeMappings& mappings);
  /// Throws UnmappedLabel (or Config for an unknown scheme).
  const std::string& map(std::string_view scheme_id, std::string_view label) const;

 private:
  const Taxonomy& taxonomy_;
  const SchemeMappings& mappings_;
};

struct ModelTally {
  std::string model_id;
  std::size_t produced = 0;
  std::size_t admitted = 0;
  std::size_t suppressed = 0;
};

struct MergeReport {
  std::vector<ModelTally> models;  // priority order
  std::size_t documents = 0;
  std::size_t occurrences = 0;
  std::size_t distinct_surfaces = 0;

  nlohmann::ordered_json to_json() const;
};

struct RankedDocument {
  const ModelRun* run = nullptr;
  const AnnotatedDocument* doc = nullptr;  // null when the run lacks this document
};

struct MergedDocument {
  AnnotatedDocument doc;
  std::vector<ModelTally> tallies;  // parallel to the ranked input
};

/// Recall-priority fill over one document: runs are visited in the given
/// order and a span is admitted iff every token it covers is still untagged.
/// Throws TokenizationMismatch, OverlappingSpans (a run overlapping itself)
/// or UnmappedLabel.
MergedDocument merge_document(std::span<const RankedDocument> ranked, const LabelMapper& labels);

struct MergedCorpus {
  Corpus corpus;
  MergeReport report;
};

/// Ranks the runs and merges every document in the union of their doc ids.
/// Documents appear in order of first occurrence along the ranked runs.
MergedCorpus merge_corpus(std::span<const ModelRun> runs, const LabelMapper& labels,
                          Execution exec = Execution::parallel);

struct EntityInventory {
  std::size_t occurrences = 0;
  std::size_t distinct_surfaces = 0;
  std::map<std::string, std::size_t> per_surface;
};

/// Span count and number of distinct (case-sensitive) surface strings.
EntityInventory entity_inventory(const Corpus& corpus, Execution exec = Execution::parallel);

// Run manifest: model_id<TAB>reported_recall<TAB>scheme_id<TAB>corpus_path
struct ManifestRow {
  std::string model_id;
  std::optional<double> reported_recall;
  std::string scheme_id;
  std::filesystem::path corpus_path;  // resolved against the manifest directory
};

std::vector<ManifestRow> load_manifest(const std::filesystem::path& file);
/// Reads every corpus listed in the manifest. Spans are stamped with the
/// model id as their source; a doc_id repeated within one run is rejected.
std::vector<ModelRun> load_model_runs(const std::filesystem::path& manifest);

}  // namespace uner
