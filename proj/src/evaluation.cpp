#include "uner/evaluation.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

#include "parallel.hpp"
#include "uner/digest.hpp"
#include "uner/error.hpp"
#include "uner/utf8.hpp"

namespace uner {

MatchLevel MatchLevel::level(int k) {
  if (k < 1 || k > kMaxLevel) throw Error(ErrorKind::LevelOutOfRange, "match level " + std::to_string(k));
  return MatchLevel(k);
}

MatchLevel MatchLevel::parse(std::string_view text) {
  if (text == "exact") return exact();
  if (text.size() == 1 && text[0] >= '1' && text[0] <= '4') return MatchLevel(text[0] - '0');
  throw Error(ErrorKind::Config, "match level must be exact or 1-4, got \"" + std::string(text) + "\"");
}

std::string MatchLevel::str() const { return is_exact() ? "exact" : std::to_string(level_); }

std::string MatchLevel::apply(std::string_view label) const {
  return is_exact() ? std::string(label) : coarsen_label(label, level_);
}

double PrfCounts::precision() const {
  return predicted ? static_cast<double>(true_positives) / static_cast<double>(predicted) : 0.0;
}

double PrfCounts::recall() const {
  return gold ? static_cast<double>(true_positives) / static_cast<double>(gold) : 0.0;
}

double PrfCounts::f1() const {
  const double p = precision();
  const double r = recall();
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

nlohmann::ordered_json ScoreReport::to_json() const {
  nlohmann::ordered_json j;
  j["match_level"] = match_level.str();
  j["true_positives"] = true_positives;
  j["predicted_count"] = predicted_count;
  j["gold_count"] = gold_count;
  j["precision"] = precision;
  j["recall"] = recall;
  j["f1"] = f1;
  j["per_label"] = nlohmann::ordered_json::object();
  for (const auto& [label, c] : per_label) {
    j["per_label"][label] = {{"true_positives", c.true_positives}, {"predicted", c.predicted}, {"gold", c.gold},
                             {"precision", c.precision()},         {"recall", c.recall()},     {"f1", c.f1()}};
  }
  return j;
}

std::string ScoreReport::table() const {
  std::size_t width = 5;
  for (const auto& [label, _] : per_label) width = std::max(width, label.size());
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << std::left << std::setw(static_cast<int>(width)) << "label" << "  " << std::right << std::setw(7) << "tp"
      << std::setw(7) << "pred" << std::setw(7) << "gold" << std::setw(9) << "P" << std::setw(9) << "R"
      << std::setw(9) << "F1" << '\n';
  const auto row = [&](const std::string& label, const PrfCounts& c) {
    out << std::left << std::setw(static_cast<int>(width)) << label << "  " << std::right << std::setw(7)
        << c.true_positives << std::setw(7) << c.predicted << std::setw(7) << c.gold << std::setw(9) << c.precision()
        << std::setw(9) << c.recall() << std::setw(9) << c.f1() << '\n';
  };
  for (const auto& [label, c] : per_label) row(label, c);
  row("ALL (" + match_level.str() + ")", {true_positives, predicted_count, gold_count});
  return out.str();
}

namespace {

struct DocScore {
  PrfCounts total;
  std::map<std::string, PrfCounts> per_label;
};

DocScore score_document(const AnnotatedDocument& gold, const AnnotatedDocument& pred, MatchLevel level) {
  DocScore out;
  std::vector<std::string> gold_labels;
  gold_labels.reserve(gold.spans.size());
  for (const auto& g : gold.spans) {
    gold_labels.push_back(level.apply(g.label));
    ++out.per_label[gold_labels.back()].gold;
  }
  std::vector<bool> matched(gold.spans.size(), false);
  for (const auto& p : pred.spans) {
    const auto label = level.apply(p.label);
    auto& per = out.per_label[label];
    ++per.predicted;
    for (std::size_t k = 0; k < gold.spans.size(); ++k) {
      const auto& g = gold.spans[k];
      if (!matched[k] && g.token_start == p.token_start && g.token_end == p.token_end && gold_labels[k] == label) {
        matched[k] = true;
        ++per.true_positives;
        ++out.total.true_positives;
        break;
      }
    }
  }
  out.total.gold = gold.spans.size();
  out.total.predicted = pred.spans.size();
  return out;
}

}  // namespace

ScoreReport score(const Corpus& gold, const Corpus& pred, MatchLevel level, Execution exec) {
  if (gold.size() != pred.size()) {
    throw Error(ErrorKind::CorpusMismatch, "gold has " + std::to_string(gold.size()) + " documents, prediction " +
                                               std::to_string(pred.size()));
  }
  std::map<std::string, const AnnotatedDocument*> pred_by_id;
  for (const auto& d : pred) pred_by_id.emplace(d.doc_id, &d);
  std::vector<const AnnotatedDocument*> partner(gold.size());
  for (std::size_t k = 0; k < gold.size(); ++k) {
    auto it = pred_by_id.find(gold[k].doc_id);
    if (it == pred_by_id.end()) {
      throw Error(ErrorKind::CorpusMismatch, "document " + gold[k].doc_id + " missing from prediction");
    }
    if (it->second->tokens != gold[k].tokens) {
      throw Error(ErrorKind::CorpusMismatch, "document " + gold[k].doc_id + " is tokenized differently");
    }
    partner[k] = it->second;
  }

  std::vector<DocScore> per_doc(gold.size());
  detail::for_each_index(gold.size(), exec,
                         [&](std::size_t k) { per_doc[k] = score_document(gold[k], *partner[k], level); });

  ScoreReport report;
  report.match_level = level;
  for (const auto& d : per_doc) {
    report.true_positives += d.total.true_positives;
    report.predicted_count += d.total.predicted;
    report.gold_count += d.total.gold;
    for (const auto& [label, c] : d.per_label) {
      auto& agg = report.per_label[label];
      agg.true_positives += c.true_positives;
      agg.predicted += c.predicted;
      agg.gold += c.gold;
    }
  }
  const PrfCounts total{report.true_positives, report.predicted_count, report.gold_count};
  report.precision = total.precision();
  report.recall = total.recall();
  report.f1 = total.f1();
  return report;
}

nlohmann::ordered_json DistributionReport::to_json() const {
  nlohmann::ordered_json j;
  j["total_spans"] = total_spans;
  j["per_path"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : per_path) j["per_path"][k] = v;
  j["per_level"] = nlohmann::ordered_json::array();
  for (const auto& level : per_level) {
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    for (const auto& [k, v] : level) m[k] = v;
    j["per_level"].push_back(std::move(m));
  }
  j["zero_example_nodes"] = zero_example_nodes;
  j["surface_head"] = nlohmann::ordered_json::array();
  for (const auto& [s, n] : surface_head) j["surface_head"].push_back({{"surface", s}, {"count", n}});
  return j;
}

DistributionReport distribution_report(const Corpus& corpus, const Taxonomy& taxonomy, std::size_t head,
                                       Execution exec) {
  struct Local {
    std::map<std::string, std::size_t> paths;
    std::map<std::string, std::size_t> surfaces;
  };
  std::vector<Local> local(corpus.size());
  detail::for_each_index(corpus.size(), exec, [&](std::size_t d) {
    const auto& doc = corpus[d];
    if (doc.spans.empty()) return;
    const utf8::TextIndex index(doc.text);
    for (const auto& s : doc.spans) {
      ++local[d].paths[s.label];
      ++local[d].surfaces[std::string(index.slice(doc.char_start(s), doc.char_end(s)))];
    }
  });

  DistributionReport r;
  std::map<std::string, std::size_t> surfaces;
  for (auto& l : local) {
    for (auto& [k, v] : l.paths) r.per_path[k] += v;
    for (auto& [k, v] : l.surfaces) surfaces[k] += v;
  }

  std::vector<bool> has_example(taxonomy.size(), false);
  for (const auto& [path, n] : r.per_path) {
    r.total_spans += n;
    for (int level = 1; level <= kMaxLevel; ++level) r.per_level[level - 1][coarsen_label(path, level)] += n;
    for (auto id = taxonomy.find(path); id && *id > 0; id = taxonomy.node(*id).parent) {
      has_example[static_cast<std::size_t>(*id)] = true;
    }
  }
  for (std::size_t id = 1; id < taxonomy.size(); ++id) {
    if (!has_example[id]) r.zero_example_nodes.push_back(taxonomy.node(static_cast<int>(id)).path);
  }

  r.surface_head.assign(surfaces.begin(), surfaces.end());
  std::stable_sort(r.surface_head.begin(), r.surface_head.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (r.surface_head.size() > head) r.surface_head.resize(head);
  return r;
}

ExportSummary export_training(const Corpus& corpus, Format format, const std::filesystem::path& out_dir,
                              const std::string& stem) {
  for (const auto& doc : corpus) {
    const auto violations = validate_structure(doc);
    if (!violations.empty()) {
      const auto& v = violations.front();
      throw Error(v.kind == ViolationKind::OverlappingSpans ? ErrorKind::OverlappingSpans : ErrorKind::SchemaViolation,
                  "document " + v.doc_id + " " + v.where + ": " + v.message);
    }
  }

  std::vector<std::size_t> order(corpus.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::vector<std::uint64_t> keys(corpus.size());
  for (std::size_t k = 0; k < corpus.size(); ++k) keys[k] = fnv1a64(corpus[k].doc_id);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return keys[a] != keys[b] ? keys[a] < keys[b] : corpus[a].doc_id < corpus[b].doc_id;
  });

  const auto n = corpus.size();
  const auto n_train = static_cast<std::size_t>(static_cast<double>(n) * 0.8 + 0.5);
  const auto n_dev = std::min(n - n_train, static_cast<std::size_t>(static_cast<double>(n) * 0.1 + 0.5));
  std::vector<int> split(n, 2);
  for (std::size_t r = 0; r < n; ++r) split[order[r]] = r < n_train ? 0 : r < n_train + n_dev ? 1 : 2;

  std::array<Corpus, 3> parts;
  for (std::size_t k = 0; k < n; ++k) parts[static_cast<std::size_t>(split[k])].push_back(corpus[k]);

  const std::string ext = format == Format::spans ? ".jsonl" : format == Format::iob2 ? ".iob2" : ".xml";
  static constexpr const char* kNames[] = {"train", "dev", "test"};
  ExportSummary summary{parts[0].size(), parts[1].size(), parts[2].size(), {}};
  std::filesystem::create_directories(out_dir);
  for (std::size_t s = 0; s < 3; ++s) {
    const auto file = out_dir / (stem + "." + kNames[s] + ext);
    write_corpus(file, parts[s], format, WriterOptions{true});
    summary.files.push_back(file);
  }
  return summary;
}

}  // namespace uner
