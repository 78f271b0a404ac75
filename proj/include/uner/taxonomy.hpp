#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace uner {

inline constexpr int kMaxLevel = 4;
inline constexpr char kPathSeparator = '.';

/// Dotted path from a level-1 node downwards, e.g. "Name.Person.Fictional".
/// A TagPath obtained from Taxonomy::resolve is guaranteed to name a node;
/// one built with parse() is only syntactically checked.
class TagPath {
 public:
  TagPath() = default;
  explicit TagPath(std::vector<std::string> segments);

  /// Splits on '.'; throws Error(UnknownPath) on empty segments.
  static TagPath parse(std::string_view dotted);

  const std::vector<std::string>& segments() const { return segments_; }
  const std::string& str() const { return dotted_; }
  std::size_t depth() const { return segments_.size(); }
  bool empty() const { return segments_.empty(); }

  /// Ancestor-or-self test.
  bool is_prefix_of(const TagPath& other) const;
  /// Strict descendant test.
  bool is_descendant_of(const TagPath& other) const;

  friend bool operator==(const TagPath& a, const TagPath& b) { return a.dotted_ == b.dotted_; }
  friend auto operator<=>(const TagPath& a, const TagPath& b) { return a.dotted_ <=> b.dotted_; }

 private:
  std::vector<std::string> segments_;
  std::string dotted_;
};

/// Truncates to min(level, depth) segments; throws LevelOutOfRange unless
/// 1 <= level <= 4.
TagPath coarsen(const TagPath& path, int level);

/// String form of coarsen() for dotted labels, without allocating segments.
std::string coarsen_label(std::string_view dotted, int level);

/// Deepest common prefix, or nullopt when the first segments differ.
std::optional<TagPath> lca(const TagPath& a, const TagPath& b);

struct TaxonomyNode {
  std::string name;
  int level = 0;
  int parent = -1;
  std::vector<int> children;
  std::string path;  // canonical dotted path; empty for the root
};

/// The UNER hierarchy (or any 4-level tree with the same schema). Immutable
/// after construction, so a single instance can be shared across threads.
class Taxonomy {
 public:
  /// Parses `{"name": "TOP", "children": [...]}`. Throws DuplicateSibling,
  /// DepthExceeded, IllegalName or MissingRoot.
  static Taxonomy from_json(std::string_view content);
  static Taxonomy load(const std::filesystem::path& file);

  std::array<std::size_t, kMaxLevel + 1> level_counts() const { return level_counts_; }

  /// Throws Error(UnknownPath) whose detail() is the deepest valid prefix.
  TagPath resolve(std::string_view path) const;
  bool contains(std::string_view path) const;
  std::optional<int> find(std::string_view path) const;

  const TaxonomyNode& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  const TaxonomyNode& root() const { return nodes_.front(); }
  std::size_t size() const { return nodes_.size(); }

  /// All non-root paths in pre-order.
  std::vector<std::string> paths() const;
  /// Siblings and ancestors of a resolved path, used as relabel suggestions.
  std::vector<std::string> neighbourhood(const TagPath& path) const;

  const std::vector<std::string>& notes() const { return notes_; }

 private:
  std::vector<TaxonomyNode> nodes_;
  std::unordered_map<std::string, int> by_path_;
  std::array<std::size_t, kMaxLevel + 1> level_counts_{};
  std::vector<std::string> notes_;
};

/// External tagset (CoNLL-4, OntoNotes-18, MUC-7, ...) projected into UNER.
class SchemeMapping {
 public:
  explicit SchemeMapping(std::string scheme_id) : scheme_id_(std::move(scheme_id)) {}

  const std::string& scheme_id() const { return scheme_id_; }
  const std::map<std::string, TagPath, std::less<>>& entries() const { return entries_; }

  void add(std::string external, TagPath path);
  /// Throws Error(UnmappedLabel).
  const TagPath& map(std::string_view external) const;

 private:
  std::string scheme_id_;
  std::map<std::string, TagPath, std::less<>> entries_;
};

using SchemeMappings = std::map<std::string, SchemeMapping, std::less<>>;

/// Reads `scheme_id<TAB>external_label<TAB>uner_path` rows ('#' comments),
/// resolving every image against `taxonomy`. Rows from several files may be
/// merged by passing the same `into` map.
void load_scheme_mappings(const std::filesystem::path& file, const Taxonomy& taxonomy, SchemeMappings& into);
void parse_scheme_mappings(std::string_view content, const Taxonomy& taxonomy, SchemeMappings& into);

}  // namespace uner
