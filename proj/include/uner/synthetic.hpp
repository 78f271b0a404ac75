#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "json.hpp"
#include "uner/document.hpp"
#include "uner/ensemble.hpp"
#include "uner/projection.hpp"

namespace uner {

struct SyntheticOptions {
  std::size_t sentences = 10000;
  std::uint64_t seed = 2019;
};

/// A generated bilingual corpus with known answers: English-like source
/// sentences with UNER gold, a pseudo-translated target side with word
/// alignments and projected gold, three noisy mock tagger runs in different
/// label schemes, and a knowledge-base fixture store for the entities.
struct SyntheticCorpus {
  Corpus source_gold;
  Corpus targets;  // unannotated
  Corpus target_gold;
  std::vector<AlignmentRecord> alignments;
  std::vector<ModelRun> runs;
  std::vector<nlohmann::ordered_json> kb_records;
};

SyntheticCorpus make_synthetic(const SyntheticOptions& options);

/// Writes a self-contained workspace (copies of the taxonomy and mapping
/// tables from `data_dir`, runs, manifest, gold, alignments, fixtures) and a
/// pipeline config. Returns the config path.
std::filesystem::path write_synthetic_workspace(const SyntheticCorpus& corpus, const std::filesystem::path& dir,
                                                const std::filesystem::path& data_dir);

}  // namespace uner
