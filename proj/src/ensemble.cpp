#include "uner/ensemble.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "uner/codecs.hpp"
#include "uner/error.hpp"
#include "uner/utf8.hpp"
#include "parallel.hpp"

namespace uner {

std::vector<const ModelRun*> rank_models(std::span<const ModelRun> runs) {
  std::vector<const ModelRun*> ranked;
  ranked.reserve(runs.size());
  for (const auto& run : runs) {
    if (!run.reported_recall) {
      throw Error(ErrorKind::MissingRecall, "model " + run.model_id + " has no reported recall", run.model_id);
    }
    ranked.push_back(&run);
  }
  std::sort(ranked.begin(), ranked.end(), [](const ModelRun* a, const ModelRun* b) {
    if (*a->reported_recall != *b->reported_recall) return *a->reported_recall > *b->reported_recall;
    return a->model_id < b->model_id;
  });
  return ranked;
}

LabelMapper::LabelMapper(const Taxonomy& taxonomy, const SchemeMappings& mappings)
    : taxonomy_(taxonomy), mappings_(mappings) {}

const std::string& LabelMapper::map(std::string_view scheme_id, std::string_view label) const {
  if (scheme_id == kUnerScheme) {
    const auto id = taxonomy_.find(label);
    if (!id) {
      throw Error(ErrorKind::UnmappedLabel, "\"" + std::string(label) + "\" is not a UNER path", std::string(label));
    }
    return taxonomy_.node(*id).path;
  }
  auto it = mappings_.find(scheme_id);
  if (it == mappings_.end()) {
    throw Error(ErrorKind::Config, "no scheme mapping loaded for \"" + std::string(scheme_id) + "\"");
  }
  return it->second.map(label).str();
}

nlohmann::ordered_json MergeReport::to_json() const {
  nlohmann::ordered_json j;
  j["documents"] = documents;
  j["occurrences"] = occurrences;
  j["distinct_surfaces"] = distinct_surfaces;
  auto& ms = j["models"] = nlohmann::ordered_json::array();
  for (const auto& m : models) {
    ms.push_back({{"model_id", m.model_id}, {"produced", m.produced}, {"admitted", m.admitted},
                  {"suppressed", m.suppressed}});
  }
  return j;
}

MergedDocument merge_document(std::span<const RankedDocument> ranked, const LabelMapper& labels) {
  MergedDocument out;
  out.tallies.resize(ranked.size());
  const AnnotatedDocument* base = nullptr;
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    out.tallies[r].model_id = ranked[r].run->model_id;
    const auto* doc = ranked[r].doc;
    if (!doc) continue;
    if (!base) {
      base = doc;
    } else if (!same_tokenization(*base, *doc)) {
      throw Error(ErrorKind::TokenizationMismatch, "model " + ranked[r].run->model_id + " tokenizes " + doc->doc_id +
                                                       " differently from " + ranked[0].run->model_id);
    }
  }
  if (!base) return out;

  out.doc.doc_id = base->doc_id;
  out.doc.lang = base->lang;
  out.doc.text = base->text;
  out.doc.tokens = base->tokens;

  std::vector<bool> taken(base->tokens.size(), false);
  std::vector<std::size_t> order;
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    const auto* doc = ranked[r].doc;
    if (!doc) continue;
    const auto& run = *ranked[r].run;
    auto& tally = out.tallies[r];

    order.resize(doc->spans.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return doc->spans[a].token_start < doc->spans[b].token_start;
    });

    std::size_t run_end = 0;
    for (std::size_t k : order) {
      const auto& s = doc->spans[k];
      if (s.token_start >= s.token_end || s.token_end > taken.size()) {
        throw Error(ErrorKind::OffsetOutOfRange, "model " + run.model_id + " span " + s.id + " outside " + doc->doc_id);
      }
      if (s.token_start < run_end) {
        throw Error(ErrorKind::OverlappingSpans, "model " + run.model_id + " overlaps itself in " + doc->doc_id);
      }
      run_end = s.token_end;
      ++tally.produced;

      const bool free = std::none_of(taken.begin() + static_cast<std::ptrdiff_t>(s.token_start),
                                     taken.begin() + static_cast<std::ptrdiff_t>(s.token_end),
                                     [](bool b) { return b; });
      if (!free) {
        ++tally.suppressed;
        continue;
      }
      std::fill(taken.begin() + static_cast<std::ptrdiff_t>(s.token_start),
                taken.begin() + static_cast<std::ptrdiff_t>(s.token_end), true);
      out.doc.spans.push_back({span_id(s.token_start, s.token_end), s.token_start, s.token_end,
                               labels.map(run.scheme_id, s.label), run.model_id, s.confidence});
      ++tally.admitted;
    }
  }
  sort_spans(out.doc);
  return out;
}

MergedCorpus merge_corpus(std::span<const ModelRun> runs, const LabelMapper& labels, Execution exec) {
  const auto ranked_runs = rank_models(runs);

  // Document index: union of doc ids in order of first appearance.
  std::vector<std::string> doc_ids;
  std::unordered_map<std::string, std::size_t> slot;
  std::vector<std::vector<RankedDocument>> jobs;
  for (std::size_t r = 0; r < ranked_runs.size(); ++r) {
    for (const auto& doc : ranked_runs[r]->documents) {
      auto [it, inserted] = slot.try_emplace(doc.doc_id, doc_ids.size());
      if (inserted) {
        doc_ids.push_back(doc.doc_id);
        jobs.emplace_back(ranked_runs.size());
        for (std::size_t q = 0; q < ranked_runs.size(); ++q) jobs.back()[q].run = ranked_runs[q];
      }
      jobs[it->second][r].doc = &doc;
    }
  }

  std::vector<MergedDocument> merged(jobs.size());
  detail::for_each_index(jobs.size(), exec, [&](std::size_t d) { merged[d] = merge_document(jobs[d], labels); });

  MergedCorpus out;
  out.report.models.resize(ranked_runs.size());
  for (std::size_t r = 0; r < ranked_runs.size(); ++r) out.report.models[r].model_id = ranked_runs[r]->model_id;
  out.corpus.reserve(merged.size());
  for (auto& m : merged) {
    for (std::size_t r = 0; r < m.tallies.size(); ++r) {
      out.report.models[r].produced += m.tallies[r].produced;
      out.report.models[r].admitted += m.tallies[r].admitted;
      out.report.models[r].suppressed += m.tallies[r].suppressed;
    }
    out.corpus.push_back(std::move(m.doc));
  }
  const auto inventory = entity_inventory(out.corpus, exec);
  out.report.documents = out.corpus.size();
  out.report.occurrences = inventory.occurrences;
  out.report.distinct_surfaces = inventory.distinct_surfaces;
  return out;
}

EntityInventory entity_inventory(const Corpus& corpus, Execution exec) {
  std::vector<std::vector<std::string>> surfaces(corpus.size());
  const auto collect = [&](std::size_t d) {
    const auto& doc = corpus[d];
    if (doc.spans.empty()) return;
    const utf8::TextIndex index(doc.text);
    surfaces[d].reserve(doc.spans.size());
    for (const auto& s : doc.spans) surfaces[d].emplace_back(index.slice(doc.char_start(s), doc.char_end(s)));
  };
  detail::for_each_index(corpus.size(), exec, collect);
  EntityInventory inv;
  for (auto& doc_surfaces : surfaces) {
    inv.occurrences += doc_surfaces.size();
    for (auto& s : doc_surfaces) ++inv.per_surface[std::move(s)];
  }
  inv.distinct_surfaces = inv.per_surface.size();
  return inv;
}

std::vector<ManifestRow> load_manifest(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::Io, "cannot open manifest " + file.string());
  const auto base = file.parent_path();
  std::vector<ManifestRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cols;
    std::size_t pos = 0;
    while (true) {
      const auto tab = line.find('\t', pos);
      cols.push_back(line.substr(pos, tab == std::string::npos ? std::string::npos : tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    if (cols.size() != 4) {
      throw Error(ErrorKind::Config, file.string() + ": expected 4 tab-separated columns").with_line(line_no);
    }
    ManifestRow row{cols[0], std::nullopt, cols[2], std::filesystem::path(cols[3])};
    if (!cols[1].empty() && cols[1] != "-") {
      double recall = 0;
      const auto* first = cols[1].data();
      const auto* last = first + cols[1].size();
      const auto [ptr, ec] = std::from_chars(first, last, recall);
      if (ec != std::errc() || ptr != last || recall < 0.0 || recall > 1.0) {
        throw Error(ErrorKind::Config, file.string() + ": recall \"" + cols[1] + "\" is not in [0,1]")
            .with_line(line_no);
      }
      row.reported_recall = recall;
    }
    if (row.corpus_path.is_relative()) row.corpus_path = base / row.corpus_path;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ModelRun> load_model_runs(const std::filesystem::path& manifest) {
  std::vector<ModelRun> runs;
  std::unordered_set<std::string> model_ids;
  for (auto& row : load_manifest(manifest)) {
    if (!model_ids.insert(row.model_id).second) {
      throw Error(ErrorKind::Config, "model " + row.model_id + " listed twice in " + manifest.string());
    }
    if (!std::filesystem::exists(row.corpus_path)) {
      throw Error(ErrorKind::Io, "corpus for model " + row.model_id + " not found: " + row.corpus_path.string());
    }
    ModelRun run{row.model_id, row.reported_recall, row.scheme_id, read_corpus(row.corpus_path)};
    std::unordered_set<std::string> seen;
    for (auto& doc : run.documents) {
      if (!seen.insert(doc.doc_id).second) {
        throw Error(ErrorKind::SchemaViolation, "model " + run.model_id + " lists " + doc.doc_id + " twice");
      }
      for (auto& s : doc.spans) s.source = run.model_id;
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

}  // namespace uner
