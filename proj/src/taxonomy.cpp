#include "uner/taxonomy.hpp"

#include <fstream>
#include "json.hpp"
#include <sstream>
#include <unordered_set>

#include "uner/error.hpp"

namespace uner {
namespace {

std::string join(const std::vector<std::string>& segments, std::size_t count) {
  std::string out;
  for (std::size_t i = 0; i < count; ++i) {
    if (i) out.push_back(kPathSeparator);
    out += segments[i];
  }
  return out;
}

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TagPath::TagPath(std::vector<std::string> segments)
    : segments_(std::move(segments)), dotted_(join(segments_, segments_.size())) {}

TagPath TagPath::parse(std::string_view dotted) {
  std::vector<std::string> segments;
  std::size_t pos = 0;
  while (true) {
    const auto dot = dotted.find(kPathSeparator, pos);
    auto segment = dotted.substr(pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos);
    if (segment.empty()) {
      throw Error(ErrorKind::UnknownPath, "empty segment in \"" + std::string(dotted) + "\"");
    }
    segments.emplace_back(segment);
    if (dot == std::string_view::npos) break;
    pos = dot + 1;
  }
  return TagPath(std::move(segments));
}

bool TagPath::is_prefix_of(const TagPath& other) const {
  if (segments_.size() > other.segments_.size()) return false;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (segments_[i] != other.segments_[i]) return false;
  }
  return true;
}

bool TagPath::is_descendant_of(const TagPath& other) const {
  return other.depth() < depth() && other.is_prefix_of(*this);
}

TagPath coarsen(const TagPath& path, int level) {
  if (level < 1 || level > kMaxLevel) {
    throw Error(ErrorKind::LevelOutOfRange, "level " + std::to_string(level) + " outside 1..4");
  }
  const auto keep = std::min<std::size_t>(static_cast<std::size_t>(level), path.depth());
  if (keep == path.depth()) return path;
  return TagPath({path.segments().begin(), path.segments().begin() + static_cast<std::ptrdiff_t>(keep)});
}

std::string coarsen_label(std::string_view dotted, int level) {
  if (level < 1 || level > kMaxLevel) {
    throw Error(ErrorKind::LevelOutOfRange, "level " + std::to_string(level) + " outside 1..4");
  }
  std::size_t pos = 0;
  for (int seen = 0; seen < level; ++seen) {
    pos = dotted.find(kPathSeparator, pos);
    if (pos == std::string_view::npos) return std::string(dotted);
    if (seen + 1 < level) ++pos;
  }
  return std::string(dotted.substr(0, pos));
}

std::optional<TagPath> lca(const TagPath& a, const TagPath& b) {
  std::size_t common = 0;
  const auto n = std::min(a.depth(), b.depth());
  while (common < n && a.segments()[common] == b.segments()[common]) ++common;
  if (common == 0) return std::nullopt;
  if (common == a.depth()) return a;
  return TagPath({a.segments().begin(), a.segments().begin() + static_cast<std::ptrdiff_t>(common)});
}

Taxonomy Taxonomy::from_json(std::string_view content) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(content);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MissingRoot, std::string("taxonomy is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("name") || doc["name"] != "TOP") {
    throw Error(ErrorKind::MissingRoot, "taxonomy root must be an object named \"TOP\"");
  }

  Taxonomy t;
  if (auto it = doc.find("notes"); it != doc.end()) {
    for (const auto& note : *it) t.notes_.push_back(note.get<std::string>());
  }

  struct Pending {
    const nlohmann::json* node;
    int parent;
  };
  t.nodes_.push_back({"TOP", 0, -1, {}, ""});
  t.level_counts_[0] = 1;

  // Depth-first with an explicit stack so children keep file order.
  std::vector<Pending> stack;
  const auto push_children = [&](const nlohmann::json& node, int parent) {
    auto it = node.find("children");
    if (it == node.end()) return;
    if (!it->is_array()) throw Error(ErrorKind::SchemaViolation, "\"children\" must be an array");
    for (auto c = it->rbegin(); c != it->rend(); ++c) stack.push_back({&*c, parent});
  };
  push_children(doc, 0);

  std::vector<std::unordered_set<std::string>> sibling_names(1);
  while (!stack.empty()) {
    const auto [json_node, parent] = stack.back();
    stack.pop_back();
    if (!json_node->is_object() || !json_node->contains("name") || !(*json_node)["name"].is_string()) {
      throw Error(ErrorKind::SchemaViolation, "every node needs a string \"name\"");
    }
    auto name = (*json_node)["name"].get<std::string>();
    const auto& parent_node = t.nodes_[static_cast<std::size_t>(parent)];
    if (name.empty() || name.find(kPathSeparator) != std::string::npos) {
      throw Error(ErrorKind::IllegalName, "node name \"" + name + "\" is empty or contains '.'", name);
    }
    if (name == "TOP") throw Error(ErrorKind::IllegalName, "\"TOP\" is reserved for the root", name);
    const int level = parent_node.level + 1;
    if (level > kMaxLevel) {
      throw Error(ErrorKind::DepthExceeded, "node \"" + name + "\" under \"" + parent_node.path + "\" is deeper than level 4",
                  name);
    }
    if (!sibling_names[static_cast<std::size_t>(parent)].insert(name).second) {
      throw Error(ErrorKind::DuplicateSibling,
                  "\"" + name + "\" appears twice under \"" + (parent ? parent_node.path : std::string("TOP")) + "\"",
                  name);
    }
    std::string path = parent ? parent_node.path + kPathSeparator + name : name;
    const int id = static_cast<int>(t.nodes_.size());
    t.nodes_[static_cast<std::size_t>(parent)].children.push_back(id);
    t.nodes_.push_back({std::move(name), level, parent, {}, path});
    t.by_path_.emplace(std::move(path), id);
    sibling_names.emplace_back();
    ++t.level_counts_[static_cast<std::size_t>(level)];
    push_children(*json_node, id);
  }
  return t;
}

Taxonomy Taxonomy::load(const std::filesystem::path& file) { return from_json(read_file(file)); }

std::optional<int> Taxonomy::find(std::string_view path) const {
  auto it = by_path_.find(std::string(path));
  if (it == by_path_.end()) return std::nullopt;
  return it->second;
}

bool Taxonomy::contains(std::string_view path) const { return find(path).has_value(); }

TagPath Taxonomy::resolve(std::string_view path) const {
  if (find(path)) return TagPath::parse(path);
  // Walk down to report the deepest prefix that does resolve.
  std::string prefix;
  std::size_t pos = 0;
  while (pos <= path.size()) {
    const auto dot = path.find(kPathSeparator, pos);
    const auto end = dot == std::string_view::npos ? path.size() : dot;
    std::string candidate(path.substr(0, end));
    if (!by_path_.count(candidate)) break;
    prefix = std::move(candidate);
    if (dot == std::string_view::npos) break;
    pos = dot + 1;
  }
  throw Error(ErrorKind::UnknownPath,
              "\"" + std::string(path) + "\" is not in the taxonomy (deepest valid prefix \"" + prefix + "\")", prefix);
}

std::vector<std::string> Taxonomy::paths() const {
  std::vector<std::string> out;
  out.reserve(nodes_.size() - 1);
  for (std::size_t i = 1; i < nodes_.size(); ++i) out.push_back(nodes_[i].path);
  return out;
}

std::vector<std::string> Taxonomy::neighbourhood(const TagPath& path) const {
  std::vector<std::string> out;
  const auto id = find(path.str());
  if (!id) return out;
  const auto& self = node(*id);
  for (int sibling : node(self.parent).children) {
    if (sibling != *id) out.push_back(node(sibling).path);
  }
  for (int up = self.parent; up > 0; up = node(up).parent) out.push_back(node(up).path);
  return out;
}

void SchemeMapping::add(std::string external, TagPath path) {
  if (!entries_.emplace(external, std::move(path)).second) {
    throw Error(ErrorKind::SchemaViolation, "label \"" + external + "\" mapped twice in scheme " + scheme_id_);
  }
}

const TagPath& SchemeMapping::map(std::string_view external) const {
  auto it = entries_.find(external);
  if (it == entries_.end()) {
    throw Error(ErrorKind::UnmappedLabel, "scheme " + scheme_id_ + " has no mapping for \"" + std::string(external) + "\"",
                std::string(external));
  }
  return it->second;
}

void parse_scheme_mappings(std::string_view content, const Taxonomy& taxonomy, SchemeMappings& into) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto eol = content.find('\n', pos);
    if (eol == std::string_view::npos) eol = content.size();
    auto line = content.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos || line.find('\t', t2 + 1) != std::string_view::npos) {
      throw Error(ErrorKind::SchemaViolation, "expected 3 tab-separated columns").with_line(line_no);
    }
    std::string scheme(line.substr(0, t1));
    try {
      auto path = taxonomy.resolve(line.substr(t2 + 1));
      auto it = into.try_emplace(scheme, scheme).first;
      it->second.add(std::string(line.substr(t1 + 1, t2 - t1 - 1)), std::move(path));
    } catch (const Error& e) {
      throw e.with_line(line_no);
    }
  }
}

void load_scheme_mappings(const std::filesystem::path& file, const Taxonomy& taxonomy, SchemeMappings& into) {
  parse_scheme_mappings(read_file(file), taxonomy, into);
}

}  // namespace uner
