#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "uner/evaluation.hpp"
#include "uner/execution.hpp"
#include "uner/kb_linker.hpp"
#include "uner/projection.hpp"
#include "uner/review.hpp"

namespace uner {

/// Declarative description of a full run. Relative paths in the file are
/// resolved against the file's directory.
struct PipelineConfig {
  std::filesystem::path taxonomy;
  std::vector<std::filesystem::path> scheme_mappings;
  std::filesystem::path manifest;

  struct Kb {
    std::filesystem::path mappings;
    std::optional<std::filesystem::path> fixtures;
    std::map<std::string, std::string> endpoints;  // kb id -> SPARQL URL
    bool offline = true;
    int timeout_seconds = 20;
  } kb;

  CorrectionPolicy policy;

  struct Review {
    bool enabled = false;
    Sampling sampling;
    std::optional<std::filesystem::path> verdicts;
    std::size_t quorum = 3;
  } review;

  struct Projection {
    bool enabled = false;
    std::filesystem::path targets;
    std::filesystem::path alignments;
    ProjectionConfig config;
  } projection;

  struct Score {
    std::optional<std::filesystem::path> gold_source;
    std::optional<std::filesystem::path> gold_target;
    MatchLevel level = MatchLevel::exact();
    std::size_t head = 20;
  } score;

  std::filesystem::path output_dir;
  Execution exec = Execution::parallel;

  /// Throws Config on unknown keys or values of the wrong type.
  static PipelineConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static PipelineConfig load(const std::filesystem::path& file);

  /// Fail-fast check run before any stage: every referenced input exists
  /// and the taxonomy and mapping tables parse. Throws Config.
  void check() const;

  nlohmann::ordered_json to_json() const;
  /// SHA-256 of the canonical JSON form.
  std::string digest() const;
};

/// Writes `<output>.prov.json` next to a stage output: the stage name, every
/// input with its SHA-256, the parameters needed to re-run the stage, the
/// config digest and a UTC timestamp (the only non-deterministic field).
void write_provenance(const std::filesystem::path& output, std::string_view stage,
                      std::span<const std::filesystem::path> inputs, const nlohmann::ordered_json& parameters,
                      std::string_view config_digest);

struct StageOutput {
  std::string stage;
  std::vector<std::filesystem::path> files;
};

struct PipelineResult {
  std::vector<StageOutput> stages;
  std::optional<ScoreReport> source_score;
  std::optional<ScoreReport> target_score;
};

/// merge -> correct -> (review) -> (project) -> score -> stats. Every stage
/// reads its input from the previous stage's file. A failing stage raises an
/// Error naming the stage and the last artifact that was written; earlier
/// outputs are left intact.
PipelineResult run_pipeline(const PipelineConfig& config, std::ostream* log = nullptr);

}  // namespace uner
