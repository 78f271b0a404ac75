#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "uner/document.hpp"
#include "uner/taxonomy.hpp"

namespace uner {

struct ReviewTask {
  std::string task_id;
  std::string doc_id;
  std::string span_id;
  std::string context;  // document text
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  std::string proposed_label;
  std::vector<std::string> candidate_labels;
  std::string status = "open";

  nlohmann::ordered_json to_json() const;
  static ReviewTask from_json(const nlohmann::json& j);
};

/// Tasks are bound to spans by id: "<doc_id>#<span_id>".
std::string make_task_id(std::string_view doc_id, std::string_view span_id);
/// Splits at the last '#'; nullopt when there is none.
std::optional<std::pair<std::string, std::string>> split_task_id(std::string_view task_id);

struct Sampling {
  enum class Kind { all, per_label_quota, random };
  Kind kind = Kind::all;
  std::size_t quota = 0;
  double fraction = 1.0;
  std::uint64_t seed = 0;

  /// "all", "quota:<n>" or "random:<fraction>:<seed>".
  static Sampling parse(std::string_view text);
  std::string str() const;
};

/// One task per sampled span, in corpus order. Random sampling draws one
/// mt19937_64 key per span and keeps the round(fraction * n) smallest, so a
/// seed always selects the same tasks.
std::vector<ReviewTask> generate_tasks(const Corpus& corpus, const Sampling& sampling,
                                       const Taxonomy* taxonomy = nullptr);

std::vector<ReviewTask> read_tasks(const std::filesystem::path& file);
void write_tasks(const std::filesystem::path& file, std::span<const ReviewTask> tasks);

enum class VerdictAction { accept, reject, relabel };

struct Verdict {
  std::string task_id;
  std::string annotator_id;
  VerdictAction action = VerdictAction::accept;
  std::optional<std::string> label;  // present iff action == relabel
  std::string ts;

  nlohmann::ordered_json to_json() const;
  /// Throws InvalidVerdict. With a taxonomy, relabel targets must resolve.
  static Verdict from_json(const nlohmann::json& j, const Taxonomy* taxonomy = nullptr);
};

std::string_view to_string(VerdictAction action);

/// Append-only verdict log on disk. Appends are serialized by a writer lock
/// and hit the file before the in-memory index is published, so readers
/// only ever wait for the index insert, never for I/O.
class VerdictLog {
 public:
  /// Opens (creating if needed) and loads existing records; later duplicates
  /// of a (task, annotator) pair in the file are ignored.
  explicit VerdictLog(std::filesystem::path file);

  enum class AppendResult { appended, duplicate };
  AppendResult append(const Verdict& verdict);

  std::vector<Verdict> snapshot() const;
  std::size_t size() const;
  bool has_judged(const std::string& task_id, const std::string& annotator_id) const;
  std::size_t count_for(const std::string& task_id) const;

  static std::vector<Verdict> read(const std::filesystem::path& file);

 private:
  std::filesystem::path file_;
  std::mutex writer_;
  mutable std::shared_mutex index_mutex_;
  std::ofstream out_;
  std::vector<Verdict> verdicts_;
  std::unordered_set<std::string> judged_;  // task_id '\x1f' annotator_id
  std::unordered_map<std::string, std::size_t> per_task_;
};

/// Outcome of adjudicating one task.
struct Decision {
  enum class Kind { keep, remove, relabel, tie, quorum_unmet };
  Kind kind = Kind::quorum_unmet;
  std::optional<std::string> label;
  bool unanimous = false;
};

/// Strict majority among the verdicts (relabels to different paths are
/// different actions). Fewer than `quorum` verdicts -> quorum_unmet; no
/// strict majority -> tie.
Decision decide(std::span<const Verdict> verdicts, std::size_t quorum);

struct AgreementReport {
  std::size_t tasks_with_verdicts = 0;
  std::size_t tasks_decided = 0;  // met quorum
  std::size_t unanimous = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t relabeled = 0;
  std::size_t stale = 0;  // task names a span no longer present
  std::vector<std::string> flagged;       // ties
  std::vector<std::string> quorum_unmet;  // left unapplied
  /// Per proposed label: fraction of decided tasks whose outcome was accept.
  std::map<std::string, std::pair<std::size_t, std::size_t>> accept_by_label;  // label -> (accepted, decided)

  double agreement() const;
  nlohmann::ordered_json to_json() const;
};

struct Adjudicated {
  Corpus corpus;
  AgreementReport report;
};

/// Applies majority verdicts: accept keeps the span, reject removes it,
/// relabel sets the label and source "human". Ties keep the original and are
/// flagged. The log is not modified; reapplying it to the output is a no-op.
Adjudicated apply_verdicts(const Corpus& corpus, std::span<const Verdict> verdicts, std::size_t quorum);

}  // namespace uner
