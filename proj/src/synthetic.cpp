#include "uner/synthetic.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <string>

#include "uner/codecs.hpp"
#include "uner/digest.hpp"
#include "uner/error.hpp"

namespace uner {

namespace {

constexpr std::string_view kWd = "http://www.wikidata.org/entity/";
constexpr std::string_view kDbo = "http://dbpedia.org/ontology/";
constexpr std::string_view kSchema = "http://schema.org/";

struct EntityType {
  const char* path;
  const char* conll;  // "" when the scheme has no matching label
  const char* onto;
  const char* wikidata;
  const char* dbpedia;
  const char* yago;
  unsigned kb_coverage;  // percent of surfaces with KB records
  std::vector<std::string> surfaces;
};

std::vector<std::string> person_names() {
  const std::array<const char*, 16> first{"Ana",   "Ivan",  "Marija", "Željko", "George", "Marie", "Luka",  "Petra",
                                          "Nikola", "Đurđa", "Tomás",  "Anja",   "Miloš",  "Elena", "Hrvoje", "Zoë"};
  const std::array<const char*, 14> last{"Kovačević", "Horvat", "Šarić",   "Clooney", "Curie", "Babić",  "Novak",
                                         "Jurić",     "Tesla",  "Müller",  "Perić",   "Knežević", "Dubois", "Marković"};
  std::vector<std::string> out;
  for (const char* f : first) {
    for (const char* l : last) out.push_back(std::string(f) + " " + l);
  }
  return out;
}

std::vector<EntityType> entity_types() {
  return {
      {"Name.Person.Name", "PER", "PERSON", "Q5", "Person", "Person", 60, person_names()},
      {"Name.Location.City", "LOC", "GPE", "Q515", "City", "City", 100,
       {"Zagreb", "Split", "Rijeka", "Osijek", "Zadar", "Paris", "Berlin", "Sarajevo", "Ljubljana", "Beograd",
        "São Paulo", "New York", "Los Angeles", "Kraków", "Zürich", "Skopje", "Athens", "Vienna"}},
      {"Name.Location.Country", "LOC", "GPE", "Q6256", "Country", "Country", 100,
       {"Croatia", "France", "Germany", "Bosnia and Herzegovina", "Serbia", "Slovenia", "United States", "Türkiye",
        "Greece", "Austria", "Italy", "North Macedonia"}},
      {"Name.Organization.Corporation.Company", "ORG", "ORG", "Q4830453", "Company", "Corporation", 90,
       {"Podravka", "Končar", "Acme Corporation", "Siemens", "Ericsson Nikola Tesla", "Atlantic Grupa", "Pliva",
        "Hrvatski Telekom"}},
      {"Name.Organization.International Organization", "ORG", "ORG", "Q484652", "InternationalOrganisation", "",
       100, {"European Union", "United Nations", "NATO", "World Bank", "OSCE", "Council of Europe"}},
      {"Name.Location.Geological Region.Mountain", "LOC", "LOC", "Q8502", "Mountain", "Mountain", 100,
       {"Velebit", "Dinara", "Mont Blanc", "Triglav", "Biokovo", "Učka"}},
      {"Name.Location.Geological Region.River", "LOC", "LOC", "Q4022", "River", "RiverBodyOfWater", 100,
       {"Sava", "Drava", "Danube", "Neretva", "Una", "Kupa"}},
      {"Name.Organization.Ethnic Group.Nationality", "MISC", "NORP", "", "", "", 0,
       {"Croatian", "French", "German", "Serbian", "Bosnian", "Slovene"}},
      {"Name.Product.Rule.Law", "MISC", "LAW", "Q7748", "", "", 100, {"Labour Act", "Criminal Code", "Media Act"}},
      {"Name.Event.Historical Event.War", "MISC", "EVENT", "Q198", "MilitaryConflict", "Event", 100,
       {"Homeland War", "Second World War", "Thirty Years War"}},
      {"Timex TOP.Timex.Date", "", "DATE", "", "", "", 0,
       {"Monday", "Tuesday", "Friday", "5 May 2009", "January 2010", "12 March 2008", "2011"}},
      {"Numex.Percent", "", "PERCENT", "", "", "", 0, {"5 percent", "12.5 percent", "40 %", "3 percent"}},
      {"Numex.Money", "", "MONEY", "", "", "", 0, {"200 euros", "3 million dollars", "1,500 kuna"}},
  };
}

// Surfaces whose KB evidence points away from the gold type: persons named
// after countries and cities.
struct Ambiguous {
  const char* surface;
  const char* wikidata;
  const char* dbpedia;
};
constexpr std::array<Ambiguous, 2> kAmbiguous{{{"Jordan", "Q6256", "Country"}, {"Victoria", "Q515", "City"}}};

const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> words{
      "the",    "said",  "on",      "in",        "minister", "visited", "government", "announced", "that",
      "will",   "meet",  "with",    "officials", "from",     "after",   "talks",      "about",     "economy",
      "new",    "plan",  "for",     "region",    "reported", "agency",  "according",  "to",        "sources",
      "and",    "a",     "statement", "was",     "issued",   "by",      "during",     "week",      "shares",
      "rose",   "fell",  "prices",  "election",  "support",  "project", "investment", "border",    "police",
      "court",  "today", "visit",   "trade",     "energy",   "water",   "school",     "workers",   "union"};
  return words;
}

bool is_article(const std::string& w) { return w == "the" || w == "a"; }

// Deterministic pseudo-translation: reversed word with a vowel ending.
std::string translate(const std::string& w) {
  std::string t(w.rbegin(), w.rend());
  t += (fnv1a64(w) & 1) ? "a" : "i";
  return t;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  bool chance(double p) { return static_cast<double>(engine_() >> 11) * 0x1.0p-53 < p; }

 private:
  std::mt19937_64 engine_;
};

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

struct Mention {
  std::size_t type;  // index into types, or types.size() + k for kAmbiguous[k]
  std::size_t start;
  std::size_t end;
  std::string label;
};

EntitySpan make_span(std::size_t start, std::size_t end, std::string label) {
  return {span_id(start, end), start, end, std::move(label), "", std::nullopt};
}

nlohmann::ordered_json kb_record(const std::string& surface, std::string_view kb_id, std::string iri) {
  nlohmann::ordered_json j;
  j["surface"] = surface;
  j["kb_id"] = kb_id;
  j["classes"] = nlohmann::ordered_json::array({std::move(iri)});
  return j;
}

}  // namespace

SyntheticCorpus make_synthetic(const SyntheticOptions& options) {
  const auto types = entity_types();
  const auto& fillers = filler_words();
  Rng rng(options.seed);

  SyntheticCorpus out;
  struct RunSpec {
    const char* model_id;
    double recall;
    const char* scheme;
  };
  const std::array<RunSpec, 3> specs{{{"onto-large", 0.85, "ontonotes18"},
                                      {"conll-base", 0.80, "conll4"},
                                      {"uner-crf", 0.70, "uner"}}};
  for (const auto& s : specs) out.runs.push_back({s.model_id, s.recall, s.scheme, {}});

  for (std::size_t n = 0; n < options.sentences; ++n) {
    char id_buf[16];
    std::snprintf(id_buf, sizeof id_buf, "s%05zu", n);
    const std::string doc_id = id_buf;

    // Source sentence: filler runs around 1-3 entity mentions.
    std::vector<std::string> words;
    std::vector<bool> entity_token;
    std::vector<Mention> mentions;
    const auto add_fillers = [&](std::size_t count) {
      for (std::size_t k = 0; k < count; ++k) {
        words.push_back(fillers[rng.pick(fillers.size())]);
        entity_token.push_back(false);
      }
    };
    add_fillers(rng.pick(3));
    const std::size_t entity_count = 1 + rng.pick(3);
    for (std::size_t e = 0; e < entity_count; ++e) {
      std::size_t type;
      std::string surface;
      std::string label;
      if (rng.chance(0.02)) {
        const auto k = rng.pick(kAmbiguous.size());
        type = types.size() + k;
        surface = kAmbiguous[k].surface;
        label = "Name.Person.Name";
      } else {
        type = rng.pick(types.size());
        surface = types[type].surfaces[rng.pick(types[type].surfaces.size())];
        label = types[type].path;
      }
      const std::size_t start = words.size();
      for (auto& w : split_words(surface)) {
        words.push_back(std::move(w));
        entity_token.push_back(true);
      }
      mentions.push_back({type, start, words.size(), label});
      add_fillers(1 + rng.pick(3));
    }
    words.push_back(".");
    entity_token.push_back(false);

    AnnotatedDocument gold = make_document(doc_id, "en", words);
    for (const auto& m : mentions) gold.spans.push_back(make_span(m.start, m.end, m.label));

    // Target side. Each source token becomes a chunk of target tokens.
    std::vector<std::vector<std::string>> chunks(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (entity_token[i]) {
        chunks[i].push_back(words[i]);
      } else if (words[i] == ".") {
        chunks[i].push_back(".");
      } else if (is_article(words[i]) && rng.chance(0.8)) {
        // articles mostly vanish in translation
      } else {
        chunks[i].push_back(translate(words[i]));
        if (rng.chance(0.05)) chunks[i].push_back("se");
      }
    }
    // Inflect the last token of some single-word mentions.
    for (const auto& m : mentions) {
      if (m.end - m.start == 1 && rng.chance(0.3)) chunks[m.start].back() += "u";
    }
    std::vector<std::size_t> order(words.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    // Local reordering of adjacent filler tokens.
    for (std::size_t i = 0; i + 2 < order.size(); ++i) {
      if (!entity_token[order[i]] && !entity_token[order[i + 1]] && rng.chance(0.15)) {
        std::swap(order[i], order[i + 1]);
        ++i;
      }
    }
    std::vector<std::string> target_words;
    std::vector<AlignmentLink> links;
    std::vector<std::pair<std::size_t, std::size_t>> target_range(words.size(), {0, 0});
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      const auto i = order[pos];
      const auto begin = target_words.size();
      for (std::size_t c = 0; c < chunks[i].size(); ++c) {
        // An unaligned particle occasionally splits a multi-token name.
        if (c == 0 && entity_token[i] && i > 0 && entity_token[i - 1] &&
            std::none_of(mentions.begin(), mentions.end(), [&](const Mention& m) { return m.start == i; }) &&
            rng.chance(0.03)) {
          target_words.push_back("de");
        }
        links.emplace_back(i, target_words.size());
        target_words.push_back(chunks[i][c]);
      }
      target_range[i] = {begin, target_words.size()};
    }

    AnnotatedDocument target = make_document(doc_id, "xx", target_words);
    AnnotatedDocument target_gold = target;
    for (const auto& m : mentions) {
      target_gold.spans.push_back(make_span(target_range[m.start].first, target_range[m.end - 1].second, m.label));
    }
    sort_spans(target_gold);
    std::sort(links.begin(), links.end());
    out.alignments.push_back({doc_id, std::move(links)});

    // Mock tagger outputs.
    for (std::size_t r = 0; r < specs.size(); ++r) {
      AnnotatedDocument run_doc{gold.doc_id, gold.lang, gold.text, gold.tokens, {}};
      const std::string scheme = specs[r].scheme;
      for (const auto& m : mentions) {
        if (!rng.chance(specs[r].recall)) continue;
        const bool ambiguous = m.type >= types.size();
        const EntityType* t = ambiguous ? &types[0] : &types[m.type];
        std::string label;
        if (scheme == "conll4") label = t->conll;
        else if (scheme == "ontonotes18") label = t->onto;
        else label = rng.chance(0.15) ? coarsen_label(m.label, 2) : m.label;
        if (label.empty()) continue;
        std::size_t end = m.end;
        if (end - m.start > 1 && rng.chance(0.03)) --end;
        run_doc.spans.push_back(make_span(m.start, end, label));
      }
      // Occasional false positive on a filler token.
      for (std::size_t i = 0; i < words.size(); ++i) {
        if (entity_token[i] || words[i] == "." || !rng.chance(0.01)) continue;
        const char* fp = scheme == "conll4" ? "MISC" : scheme == "ontonotes18" ? "CARDINAL" : "Name.Product";
        run_doc.spans.push_back(make_span(i, i + 1, fp));
      }
      sort_spans(run_doc);
      out.runs[r].documents.push_back(std::move(run_doc));
    }

    out.source_gold.push_back(std::move(gold));
    out.targets.push_back(std::move(target));
    out.target_gold.push_back(std::move(target_gold));
  }

  // Knowledge-base fixtures.
  for (const auto& t : types) {
    for (const auto& surface : t.surfaces) {
      if (fnv1a64(surface) % 100 >= t.kb_coverage) continue;
      if (*t.wikidata) out.kb_records.push_back(kb_record(surface, "wikidata", std::string(kWd) + t.wikidata));
      if (*t.dbpedia) out.kb_records.push_back(kb_record(surface, "dbpedia", std::string(kDbo) + t.dbpedia));
      if (*t.yago) out.kb_records.push_back(kb_record(surface, "yago", std::string(kSchema) + t.yago));
    }
  }
  for (const auto& a : kAmbiguous) {
    out.kb_records.push_back(kb_record(a.surface, "wikidata", std::string(kWd) + a.wikidata));
    out.kb_records.push_back(kb_record(a.surface, "dbpedia", std::string(kDbo) + a.dbpedia));
  }
  return out;
}

std::filesystem::path write_synthetic_workspace(const SyntheticCorpus& corpus, const std::filesystem::path& dir,
                                                const std::filesystem::path& data_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "runs");
  const auto copy = [&](const fs::path& from, const fs::path& to) {
    if (!fs::exists(from)) throw Error(ErrorKind::Io, "missing " + from.string());
    fs::copy_file(from, dir / to, fs::copy_options::overwrite_existing);
  };
  copy(data_dir / "taxonomy" / "uner.json", "uner.json");
  copy(data_dir / "mappings" / "schemes.tsv", "schemes.tsv");
  copy(data_dir / "mappings" / "kb.tsv", "kb.tsv");

  std::string manifest = "# model_id\treported_recall\tscheme_id\tcorpus\n";
  for (const auto& run : corpus.runs) {
    const auto rel = fs::path("runs") / (run.model_id + ".jsonl");
    write_corpus(dir / rel, run.documents);
    char recall[32];
    std::snprintf(recall, sizeof recall, "%.2f", *run.reported_recall);
    manifest += run.model_id + "\t" + recall + "\t" + run.scheme_id + "\t" + rel.string() + "\n";
  }
  write_text_atomic(dir / "manifest.tsv", manifest);
  write_corpus(dir / "gold.source.jsonl", corpus.source_gold);
  write_corpus(dir / "gold.target.jsonl", corpus.target_gold);
  write_corpus(dir / "target.jsonl", corpus.targets);

  std::string alignments;
  for (const auto& a : corpus.alignments) alignments += format_alignment(a) + "\n";
  write_text_atomic(dir / "alignments.txt", alignments);

  std::string kb;
  for (const auto& r : corpus.kb_records) kb += r.dump() + "\n";
  write_text_atomic(dir / "kb-fixtures.jsonl", kb);

  nlohmann::ordered_json config;
  config["taxonomy"] = "uner.json";
  config["scheme_mappings"] = {"schemes.tsv"};
  config["manifest"] = "manifest.tsv";
  config["kb"] = {{"mappings", "kb.tsv"}, {"fixtures", "kb-fixtures.jsonl"}, {"offline", true}};
  config["policy"] = {{"action", "refine-only"}, {"kb_precedence", {"wikidata", "dbpedia", "yago"}}};
  config["projection"] = {{"enabled", true},
                          {"targets", "target.jsonl"},
                          {"alignments", "alignments.txt"},
                          {"min_coverage", 0.5},
                          {"on_collision", "drop"}};
  config["score"] = {{"gold_source", "gold.source.jsonl"}, {"gold_target", "gold.target.jsonl"}, {"level", "exact"}};
  config["output_dir"] = "out";
  const auto config_path = dir / "pipeline.json";
  write_text_atomic(config_path, config.dump(2) + "\n");
  return config_path;
}

}  // namespace uner
