#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "uner/document.hpp"
#include "uner/execution.hpp"

namespace uner {

/// (source token, target token).
using AlignmentLink = std::pair<std::size_t, std::size_t>;

struct AlignedSentencePair {
  std::string pair_id;
  AnnotatedDocument source;
  AnnotatedDocument target;
  std::vector<AlignmentLink> links;
};

enum class CollisionPolicy {
  drop,        // a projection overlapping an already placed span is dropped
  keep_first,  // the earlier span stays; the later one is refit onto its still-free aligned tokens when possible
};

CollisionPolicy parse_collision_policy(std::string_view name);
std::string_view to_string(CollisionPolicy policy);

struct ProjectionConfig {
  double min_coverage = 0.5;
  CollisionPolicy on_collision = CollisionPolicy::drop;

  nlohmann::ordered_json to_json() const;
};

namespace projection_reason {
inline constexpr std::string_view kProjected = "projected";
inline constexpr std::string_view kRefit = "refit";
inline constexpr std::string_view kUnaligned = "unaligned";
inline constexpr std::string_view kLowCoverage = "low-coverage";
inline constexpr std::string_view kCollision = "collision";
}  // namespace projection_reason

struct ProjectionOutcome {
  std::string source_span_id;
  std::string label;
  std::optional<EntitySpan> span;
  std::string reason;
  double coverage = 0.0;
  /// Aligned target tokens do not fill the projected hull.
  bool hull_gapped = false;
};

/// Projects one source span onto the hull of its aligned target tokens.
/// Throws IndexOutOfRange for a span or link outside either tokenization.
ProjectionOutcome project_span(const EntitySpan& span, const AlignedSentencePair& pair,
                               const ProjectionConfig& config);

struct DocumentProjection {
  AnnotatedDocument target;
  std::vector<ProjectionOutcome> outcomes;  // one per source span, in source order
};

/// Throws TargetAlreadyAnnotated if the target carries spans.
DocumentProjection project_document(const AlignedSentencePair& pair, const ProjectionConfig& config);

struct LabelProjection {
  std::size_t source = 0;
  std::size_t projected = 0;
};

struct ProjectionReport {
  std::size_t pairs = 0;
  std::size_t source_spans = 0;
  std::size_t projected_spans = 0;
  std::size_t hull_gapped = 0;
  std::map<std::string, std::size_t> by_reason;
  std::map<std::string, LabelProjection> per_label;
  ProjectionConfig config;

  /// projected / source spans; 1.0 when there is nothing to project.
  double rate() const;
  nlohmann::ordered_json to_json() const;
};

struct ProjectedCorpus {
  Corpus targets;
  std::vector<std::vector<ProjectionOutcome>> outcomes;
  ProjectionReport report;
};

/// Throws DuplicatePairId when pair ids repeat.
ProjectedCorpus project_corpus(std::span<const AlignedSentencePair> pairs, const ProjectionConfig& config,
                               Execution exec = Execution::parallel);

// Alignment file: one line per pair, `pair_id<TAB>i-j i-j ...`, 0-based.
struct AlignmentRecord {
  std::string pair_id;
  std::vector<AlignmentLink> links;
};

std::vector<AlignmentRecord> read_alignments(std::istream& in);
std::vector<AlignmentRecord> read_alignments(const std::filesystem::path& file);
std::string format_alignment(const AlignmentRecord& record);

/// Zips source and target corpora with alignment lines by position. The
/// three must have the same length.
std::vector<AlignedSentencePair> make_pairs(Corpus sources, Corpus targets, std::vector<AlignmentRecord> alignments);

}  // namespace uner
