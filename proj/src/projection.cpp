#include "uner/projection.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <set>
#include <unordered_set>

#include "parallel.hpp"
#include "uner/error.hpp"

namespace uner {

CollisionPolicy parse_collision_policy(std::string_view name) {
  if (name == "drop") return CollisionPolicy::drop;
  if (name == "keep-first") return CollisionPolicy::keep_first;
  throw Error(ErrorKind::Config, "unknown collision policy \"" + std::string(name) + "\" (drop, keep-first)");
}

std::string_view to_string(CollisionPolicy policy) {
  return policy == CollisionPolicy::drop ? "drop" : "keep-first";
}

nlohmann::ordered_json ProjectionConfig::to_json() const {
  return {{"min_coverage", min_coverage}, {"on_collision", to_string(on_collision)}};
}

namespace {

void check_links(const AlignedSentencePair& pair) {
  const auto ns = pair.source.tokens.size();
  const auto nt = pair.target.tokens.size();
  for (const auto& [i, j] : pair.links) {
    if (i >= ns || j >= nt) {
      throw Error(ErrorKind::IndexOutOfRange, "link " + std::to_string(i) + "-" + std::to_string(j) + " in pair " +
                                                  pair.pair_id + " exceeds " + std::to_string(ns) + "x" +
                                                  std::to_string(nt) + " tokens");
    }
  }
}

EntitySpan target_span(const EntitySpan& source, std::size_t start, std::size_t end) {
  return {span_id(start, end), start, end, source.label, "proj:" + source.source, source.confidence};
}

}  // namespace

ProjectionOutcome project_span(const EntitySpan& span, const AlignedSentencePair& pair,
                               const ProjectionConfig& config) {
  if (span.token_start >= span.token_end || span.token_end > pair.source.tokens.size()) {
    throw Error(ErrorKind::IndexOutOfRange, "span " + span.id + " outside source of pair " + pair.pair_id);
  }
  check_links(pair);
  if (!(config.min_coverage >= 0.0 && config.min_coverage <= 1.0)) {
    throw Error(ErrorKind::Config, "min_coverage must lie in [0,1]");
  }

  ProjectionOutcome out{span.id, span.label, std::nullopt, {}, 0.0, false};
  const auto width = span.token_end - span.token_start;
  std::vector<bool> covered(width, false);
  std::set<std::size_t> aligned;
  for (const auto& [i, j] : pair.links) {
    if (i < span.token_start || i >= span.token_end) continue;
    covered[i - span.token_start] = true;
    aligned.insert(j);
  }
  if (aligned.empty()) {
    out.reason = projection_reason::kUnaligned;
    return out;
  }
  out.coverage = static_cast<double>(std::count(covered.begin(), covered.end(), true)) / static_cast<double>(width);
  if (out.coverage < config.min_coverage) {
    out.reason = projection_reason::kLowCoverage;
    return out;
  }
  const auto lo = *aligned.begin();
  const auto hi = *aligned.rbegin() + 1;
  out.hull_gapped = aligned.size() != hi - lo;
  out.span = target_span(span, lo, hi);
  out.reason = projection_reason::kProjected;
  return out;
}

DocumentProjection project_document(const AlignedSentencePair& pair, const ProjectionConfig& config) {
  if (!pair.target.spans.empty()) {
    throw Error(ErrorKind::TargetAlreadyAnnotated, "target of pair " + pair.pair_id + " already has spans");
  }
  check_links(pair);

  DocumentProjection out;
  out.target = pair.target;
  std::vector<bool> occupied(pair.target.tokens.size(), false);
  const auto is_free = [&](std::size_t lo, std::size_t hi) {
    return std::none_of(occupied.begin() + static_cast<std::ptrdiff_t>(lo),
                        occupied.begin() + static_cast<std::ptrdiff_t>(hi), [](bool b) { return b; });
  };

  std::vector<const EntitySpan*> ordered;
  for (const auto& s : pair.source.spans) ordered.push_back(&s);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const EntitySpan* a, const EntitySpan* b) { return a->token_start < b->token_start; });

  // Placement ignores the coverage threshold: a span below it still claims its
  // hull but is not emitted. Which spans win a collision therefore never
  // depends on min_coverage, so raising it can only remove output spans.
  auto placement = config;
  placement.min_coverage = 0.0;
  for (const auto* s : ordered) {
    auto outcome = project_span(*s, pair, placement);
    if (outcome.span && !is_free(outcome.span->token_start, outcome.span->token_end)) {
      std::optional<EntitySpan> refit;
      if (config.on_collision == CollisionPolicy::keep_first) {
        std::set<std::size_t> free_aligned;
        for (const auto& [i, j] : pair.links) {
          if (i >= s->token_start && i < s->token_end && !occupied[j]) free_aligned.insert(j);
        }
        if (!free_aligned.empty()) {
          const auto lo = *free_aligned.begin();
          const auto hi = *free_aligned.rbegin() + 1;
          if (is_free(lo, hi)) {
            refit = target_span(*s, lo, hi);
            outcome.hull_gapped = free_aligned.size() != hi - lo;
          }
        }
      }
      outcome.span = std::move(refit);
      outcome.reason = outcome.span ? projection_reason::kRefit : projection_reason::kCollision;
    }
    if (outcome.span) {
      std::fill(occupied.begin() + static_cast<std::ptrdiff_t>(outcome.span->token_start),
                occupied.begin() + static_cast<std::ptrdiff_t>(outcome.span->token_end), true);
    }
    if (outcome.reason != projection_reason::kUnaligned && outcome.coverage < config.min_coverage) {
      outcome.reason = projection_reason::kLowCoverage;
      outcome.span.reset();
      outcome.hull_gapped = false;
    }
    if (outcome.span) out.target.spans.push_back(*outcome.span);
    out.outcomes.push_back(std::move(outcome));
  }
  sort_spans(out.target);
  return out;
}

double ProjectionReport::rate() const {
  return source_spans == 0 ? 1.0 : static_cast<double>(projected_spans) / static_cast<double>(source_spans);
}

nlohmann::ordered_json ProjectionReport::to_json() const {
  nlohmann::ordered_json j;
  j["config"] = config.to_json();
  j["pairs"] = pairs;
  j["source_spans"] = source_spans;
  j["projected_spans"] = projected_spans;
  j["projection_rate"] = rate();
  j["hull_gapped"] = hull_gapped;
  j["by_reason"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : by_reason) j["by_reason"][k] = v;
  j["per_label"] = nlohmann::ordered_json::object();
  for (const auto& [label, p] : per_label) {
    j["per_label"][label] = {{"source", p.source},
                             {"projected", p.projected},
                             {"rate", p.source ? static_cast<double>(p.projected) / static_cast<double>(p.source) : 1.0}};
  }
  return j;
}

ProjectedCorpus project_corpus(std::span<const AlignedSentencePair> pairs, const ProjectionConfig& config,
                               Execution exec) {
  std::unordered_set<std::string> ids;
  for (const auto& p : pairs) {
    if (!ids.insert(p.pair_id).second) throw Error(ErrorKind::DuplicatePairId, "pair id " + p.pair_id + " repeats");
  }

  std::vector<DocumentProjection> projected(pairs.size());
  detail::for_each_index(pairs.size(), exec,
                         [&](std::size_t k) { projected[k] = project_document(pairs[k], config); });

  ProjectedCorpus out;
  out.report.config = config;
  out.report.pairs = pairs.size();
  out.targets.reserve(pairs.size());
  out.outcomes.reserve(pairs.size());
  for (auto& p : projected) {
    for (const auto& o : p.outcomes) {
      ++out.report.source_spans;
      ++out.report.by_reason[o.reason];
      auto& per_label = out.report.per_label[o.label];
      ++per_label.source;
      if (o.span) {
        ++out.report.projected_spans;
        ++per_label.projected;
        if (o.hull_gapped) ++out.report.hull_gapped;
      }
    }
    out.targets.push_back(std::move(p.target));
    out.outcomes.push_back(std::move(p.outcomes));
  }
  return out;
}

std::vector<AlignmentRecord> read_alignments(std::istream& in) {
  std::vector<AlignmentRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    AlignmentRecord rec{line.substr(0, tab), {}};
    if (rec.pair_id.empty()) throw Error(ErrorKind::SchemaViolation, "empty pair id").with_line(line_no);
    if (tab != std::string::npos) {
      std::string_view rest(line);
      rest.remove_prefix(tab + 1);
      while (!rest.empty()) {
        const auto sp = rest.find(' ');
        auto item = rest.substr(0, sp);
        rest = sp == std::string_view::npos ? std::string_view{} : rest.substr(sp + 1);
        if (item.empty()) continue;
        const auto dash = item.find('-');
        std::size_t i = 0, j = 0;
        bool ok = dash != std::string_view::npos;
        if (ok) {
          const auto a = std::from_chars(item.data(), item.data() + dash, i);
          const auto b = std::from_chars(item.data() + dash + 1, item.data() + item.size(), j);
          ok = a.ec == std::errc() && a.ptr == item.data() + dash && b.ec == std::errc() &&
               b.ptr == item.data() + item.size() && dash > 0 && dash + 1 < item.size();
        }
        if (!ok) {
          throw Error(ErrorKind::SchemaViolation, "bad alignment link \"" + std::string(item) + "\"").with_line(line_no);
        }
        rec.links.emplace_back(i, j);
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<AlignmentRecord> read_alignments(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::Io, "cannot open alignments " + file.string());
  return read_alignments(in);
}

std::string format_alignment(const AlignmentRecord& record) {
  std::string out = record.pair_id + "\t";
  for (std::size_t k = 0; k < record.links.size(); ++k) {
    if (k) out.push_back(' ');
    out += std::to_string(record.links[k].first) + "-" + std::to_string(record.links[k].second);
  }
  return out;
}

std::vector<AlignedSentencePair> make_pairs(Corpus sources, Corpus targets, std::vector<AlignmentRecord> alignments) {
  if (sources.size() != targets.size() || sources.size() != alignments.size()) {
    throw Error(ErrorKind::CorpusMismatch, std::to_string(sources.size()) + " source documents, " +
                                               std::to_string(targets.size()) + " target documents and " +
                                               std::to_string(alignments.size()) + " alignment lines");
  }
  std::vector<AlignedSentencePair> pairs;
  pairs.reserve(sources.size());
  for (std::size_t k = 0; k < sources.size(); ++k) {
    pairs.push_back({std::move(alignments[k].pair_id), std::move(sources[k]), std::move(targets[k]),
                     std::move(alignments[k].links)});
  }
  return pairs;
}

}  // namespace uner
