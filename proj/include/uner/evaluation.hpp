#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "uner/codecs.hpp"
#include "uner/document.hpp"
#include "uner/execution.hpp"
#include "uner/taxonomy.hpp"

namespace uner {

/// Label granularity for matching: a taxonomy level 1-4, or exact paths.
class MatchLevel {
 public:
  static MatchLevel exact() { return MatchLevel(0); }
  static MatchLevel level(int k);
  /// "exact" or "1".."4"; throws Config.
  static MatchLevel parse(std::string_view text);

  bool is_exact() const { return level_ == 0; }
  int value() const { return level_; }
  std::string str() const;
  /// Label as compared at this level.
  std::string apply(std::string_view label) const;

  friend bool operator==(MatchLevel, MatchLevel) = default;

 private:
  explicit MatchLevel(int level) : level_(level) {}
  int level_;
};

struct PrfCounts {
  std::size_t true_positives = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;

  /// Zero when the denominator is zero.
  double precision() const;
  double recall() const;
  double f1() const;
};

struct ScoreReport {
  std::size_t true_positives = 0;
  std::size_t predicted_count = 0;
  std::size_t gold_count = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  MatchLevel match_level = MatchLevel::exact();
  std::map<std::string, PrfCounts> per_label;  // keyed by label at match_level

  nlohmann::ordered_json to_json() const;
  std::string table() const;
};

/// Span-level P/R/F. A prediction is a true positive iff a not-yet-matched
/// gold span has the same token range and the same label after coarsening
/// both to `level`. Throws CorpusMismatch when doc ids or tokenizations differ.
ScoreReport score(const Corpus& gold, const Corpus& pred, MatchLevel level, Execution exec = Execution::parallel);

struct DistributionReport {
  std::size_t total_spans = 0;
  std::map<std::string, std::size_t> per_path;
  /// per_level[k-1][p] = spans whose label coarsened to level k equals p.
  std::array<std::map<std::string, std::size_t>, kMaxLevel> per_level;
  /// Nodes with no span labeled at or below them, in taxonomy pre-order.
  std::vector<std::string> zero_example_nodes;
  /// Most frequent surfaces, by count then lexicographically.
  std::vector<std::pair<std::string, std::size_t>> surface_head;

  nlohmann::ordered_json to_json() const;
};

DistributionReport distribution_report(const Corpus& corpus, const Taxonomy& taxonomy, std::size_t head = 20,
                                       Execution exec = Execution::parallel);

struct ExportSummary {
  std::size_t train = 0;
  std::size_t dev = 0;
  std::size_t test = 0;
  std::vector<std::filesystem::path> files;
};

/// Deterministic 80/10/10 train/dev/test split: documents are ordered by a
/// 64-bit hash of their doc_id, the first 80% (rounded) go to train and the
/// next 10% to dev. Each split keeps the corpus order. Throws on structural
/// violations before writing anything.
ExportSummary export_training(const Corpus& corpus, Format format, const std::filesystem::path& out_dir,
                              const std::string& stem = "uner");

}  // namespace uner
