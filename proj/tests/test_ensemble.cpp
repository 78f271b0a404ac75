#include <fstream>
#include <map>
#include <random>

#include "doctest.h"
#include "support/ensemble_check.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"
#include "support/paths.hpp"
#include "uner/codecs.hpp"
#include "uner/ensemble.hpp"
#include "uner/error.hpp"
#include "uner/utf8.hpp"

using namespace uner;

namespace {

struct Env {
  Taxonomy tax = Taxonomy::load(testenv::taxonomy_file());
  SchemeMappings schemes;
  Env() { load_scheme_mappings(testenv::data_dir() / "mappings" / "schemes.tsv", tax, schemes); }
};

const Env& env() {
  static const Env e;
  return e;
}

const LabelMapper& mapper() {
  static const LabelMapper m(env().tax, env().schemes);
  return m;
}

const std::vector<std::string> kLabels{"Name", "Numex", "Timex TOP"};

ModelRun run_of(std::string id, double recall, std::vector<AnnotatedDocument> docs, std::string scheme = "uner") {
  return {std::move(id), recall, std::move(scheme), std::move(docs)};
}

AnnotatedDocument doc_with(std::vector<std::tuple<std::size_t, std::size_t, std::string>> spans, std::size_t n = 4,
                           std::string id = "d") {
  std::vector<std::string> words;
  for (std::size_t i = 0; i < n; ++i) words.push_back("w" + std::to_string(i));
  auto d = make_document(std::move(id), "en", words);
  for (auto& [s, e, l] : spans) d.spans.push_back({span_id(s, e), s, e, l, "", std::nullopt});
  return d;
}

std::vector<std::string> ids(const std::vector<const ModelRun*>& ranked) {
  std::vector<std::string> out;
  for (auto* r : ranked) out.push_back(r->model_id);
  return out;
}

}  // namespace

TEST_SUITE("ensemble") {

TEST_CASE("rank_models") {
  std::vector<ModelRun> runs{run_of("a", 0.80, {}), run_of("b", 0.92, {}), run_of("c", 0.85, {})};
  CHECK(ids(rank_models(runs)) == std::vector<std::string>{"b", "c", "a"});
  std::vector<ModelRun> tie{run_of("b", 0.9, {}), run_of("a", 0.9, {})};
  CHECK(ids(rank_models(tie)) == std::vector<std::string>{"a", "b"});
  std::vector<ModelRun> one{run_of("only", 0.1, {})};
  CHECK(ids(rank_models(one)) == std::vector<std::string>{"only"});
  std::vector<ModelRun> missing{run_of("a", 0.5, {}), {"b", std::nullopt, "uner", {}}};
  try {
    rank_models(missing);
    FAIL("expected MissingRecall");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingRecall);
    CHECK(e.detail() == "b");
  }
}

TEST_CASE("merge_document examples") {
  std::vector<ModelRun> runs{run_of("r1", 0.9, {doc_with({{0, 2, "Name"}})}),
                             run_of("r2", 0.8, {doc_with({{1, 3, "Numex"}})})};
  auto merged = merge_corpus(runs, mapper(), Execution::serial);
  REQUIRE(merged.corpus.size() == 1);
  REQUIRE(merged.corpus[0].spans.size() == 1);
  CHECK(merged.corpus[0].spans[0].token_end == 2);
  CHECK(merged.corpus[0].spans[0].source == "r1");
  CHECK(merged.report.models[1].suppressed == 1);

  runs = {run_of("r1", 0.9, {doc_with({})}), run_of("r2", 0.8, {doc_with({{0, 1, "Numex"}})})};
  merged = merge_corpus(runs, mapper(), Execution::serial);
  REQUIRE(merged.corpus[0].spans.size() == 1);
  CHECK(merged.corpus[0].spans[0].label == "Numex");

  const auto same = doc_with({{0, 1, "Name"}, {2, 4, "Numex"}});
  runs = {run_of("r1", 0.9, {same}), run_of("r2", 0.8, {same})};
  merged = merge_corpus(runs, mapper(), Execution::serial);
  CHECK(merged.corpus[0].spans.size() == 2);
  CHECK(merged.report.models[0].admitted == 2);
  CHECK(merged.report.models[1].admitted == 0);
  CHECK(merged.report.models[1].suppressed == 2);
}

TEST_CASE("merge errors") {
  std::vector<ModelRun> runs{run_of("r1", 0.9, {doc_with({}, 4)}), run_of("r2", 0.8, {doc_with({}, 5)})};
  try {
    merge_corpus(runs, mapper(), Execution::serial);
    FAIL("expected TokenizationMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TokenizationMismatch);
  }
  runs = {run_of("r1", 0.9, {doc_with({{0, 2, "Name"}, {1, 3, "Name"}})})};
  CHECK_THROWS_AS(merge_corpus(runs, mapper(), Execution::serial), Error);
  runs = {run_of("r1", 0.9, {doc_with({{0, 1, "BOGUS"}})}, "conll4")};
  try {
    merge_corpus(runs, mapper(), Execution::serial);
    FAIL("expected UnmappedLabel");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnmappedLabel);
  }
}

TEST_CASE("one-model and empty corpora") {
  std::vector<ModelRun> runs{run_of("solo", 0.5, {doc_with({{0, 1, "PER"}, {2, 4, "MISC"}})}, "conll4")};
  const auto merged = merge_corpus(runs, mapper(), Execution::serial);
  REQUIRE(merged.corpus[0].spans.size() == 2);
  CHECK(merged.corpus[0].spans[0].label == "Name.Person.Name");
  CHECK(merged.corpus[0].spans[1].label == "Name");

  const auto empty = merge_corpus({}, mapper(), Execution::serial);
  CHECK(empty.corpus.empty());
  CHECK(empty.report.documents == 0);
  CHECK(empty.report.occurrences == 0);
  CHECK(empty.report.models.empty());
}

TEST_CASE("documents missing from some runs") {
  std::vector<ModelRun> runs{run_of("r1", 0.9, {doc_with({{0, 1, "Name"}}, 4, "a")}),
                             run_of("r2", 0.8, {doc_with({{0, 2, "Numex"}}, 4, "b"), doc_with({{1, 2, "Numex"}}, 4, "a")})};
  const auto merged = merge_corpus(runs, mapper(), Execution::serial);
  REQUIRE(merged.corpus.size() == 2);
  CHECK(merged.corpus[0].doc_id == "a");
  CHECK(merged.corpus[0].spans.size() == 2);
  CHECK(merged.corpus[1].doc_id == "b");
}

TEST_CASE("conll4 fixture maps onto the hand-labeled gold") {
  std::vector<ModelRun> runs{{"conll-fixture", 0.9, "conll4", read_corpus(testenv::fixtures() / "conll4_20.iob2", Format::iob2)}};
  const auto merged = merge_corpus(runs, mapper(), Execution::serial);
  const auto gold = read_corpus(testenv::fixtures() / "conll4_20.uner.jsonl");
  REQUIRE(merged.corpus.size() == 20);
  REQUIRE(gold.size() == 20);
  for (std::size_t d = 0; d < gold.size(); ++d) {
    CHECK(merged.corpus[d].doc_id == gold[d].doc_id);
    CHECK(merged.corpus[d].text == gold[d].text);
    CHECK(merged.corpus[d].tokens == gold[d].tokens);
    CHECK(merged.corpus[d].spans == gold[d].spans);
    CHECK(validate(merged.corpus[d], env().tax).empty());
  }
}

TEST_CASE("exhaustive oracle agreement on small corpora") {
  const auto unlabeled = ensemble_check::exhaustive_model_labels(4, 3, kLabels, mapper());
  CHECK(unlabeled.failures == 0);
  CHECK(unlabeled.first_failure == "");
  CHECK(unlabeled.cases > 0);
  const auto labeled = ensemble_check::exhaustive_labeled(3, 2, kLabels, mapper());
  CHECK(labeled.failures == 0);
  CHECK(labeled.first_failure == "");
}

TEST_CASE("flat set enumeration counts") {
  // unlabeled flat span sets follow the odd-indexed Fibonacci numbers
  const std::size_t expected[] = {1, 2, 5, 13, 34, 89, 233};
  for (std::size_t n = 0; n <= 6; ++n) CHECK(ensemble_check::flat_sets(n, {"X"}).size() == expected[n]);
  CHECK(ensemble_check::flat_sets(3, kLabels).size() == 91);
  CHECK(ensemble_check::flat_sets(4, kLabels).size() == 436);
}

TEST_CASE("monotonicity, dominance and label equivariance") {
  const auto r = ensemble_check::random_properties(300, 17, kLabels, mapper());
  CHECK(r.failures == 0);
  CHECK(r.first_failure == "");
}

TEST_CASE("3-model corpus occurrence count matches the oracle") {
  std::mt19937_64 rng(3);
  std::vector<ModelRun> runs{run_of("x", 0.7, {}), run_of("y", 0.85, {}), run_of("z", 0.7, {})};
  std::size_t expected = 0;
  for (int d = 0; d < 10; ++d) {
    const auto n = 3 + gen::below(rng, 15);
    std::vector<oracle::Model> om;
    for (auto& run : runs) {
      auto doc = doc_with({}, n, "doc" + std::to_string(d));
      doc.spans = gen::random_spans(rng, n, kLabels, 0.4, 3);
      oracle::Model m{run.model_id, *run.reported_recall, {}};
      for (const auto& s : doc.spans) m.spans.push_back({s.token_start, s.token_end, s.label});
      om.push_back(std::move(m));
      run.documents.push_back(std::move(doc));
    }
    expected += oracle::merge(om).size();
  }
  const auto serial = merge_corpus(runs, mapper(), Execution::serial);
  const auto parallel = merge_corpus(runs, mapper(), Execution::parallel);
  CHECK(serial.report.occurrences == expected);
  CHECK(serial.corpus == parallel.corpus);
  CHECK(serial.report.to_json() == parallel.report.to_json());
  std::size_t admitted = 0;
  for (const auto& m : serial.report.models) admitted += m.admitted;
  CHECK(admitted == expected);
  CHECK(serial.report.models[0].model_id == "y");
  CHECK(serial.report.models[1].model_id == "x");
}

TEST_CASE("entity inventory") {
  auto d = make_document("i", "en", {"Zagreb", "and", "Zagreb", "and", "EU"});
  d.spans = {{"t0-1", 0, 1, "Name", "", {}}, {"t2-3", 2, 3, "Name", "", {}}, {"t4-5", 4, 5, "Name", "", {}}};
  const auto inv = entity_inventory({d});
  CHECK(inv.occurrences == 3);
  CHECK(inv.distinct_surfaces == 2);
  CHECK(inv.per_surface.at("Zagreb") == 2);
  const auto none = entity_inventory({});
  CHECK(none.occurrences == 0);
  CHECK(none.distinct_surfaces == 0);
}

TEST_CASE("entity inventory over 500 random documents matches a one-pass count") {
  std::mt19937_64 rng(500);
  Corpus corpus;
  for (int i = 0; i < 500; ++i) corpus.push_back(gen::random_document(rng, "s" + std::to_string(i), kLabels, 10, false));
  std::map<std::string, std::size_t> counts;
  std::size_t occurrences = 0;
  for (const auto& d : corpus) {
    // byte offsets of each code point, computed directly from the lead bytes
    std::vector<std::size_t> at;
    for (std::size_t b = 0; b < d.text.size(); ++b) {
      if ((static_cast<unsigned char>(d.text[b]) & 0xC0) != 0x80) at.push_back(b);
    }
    at.push_back(d.text.size());
    for (const auto& s : d.spans) {
      const auto from = at[d.tokens[s.token_start].start];
      const auto to = at[d.tokens[s.token_end - 1].end];
      ++counts[d.text.substr(from, to - from)];
      ++occurrences;
    }
  }
  for (auto exec : {Execution::serial, Execution::parallel}) {
    const auto inv = entity_inventory(corpus, exec);
    CHECK(inv.occurrences == occurrences);
    CHECK(inv.distinct_surfaces == counts.size());
    CHECK(inv.per_surface == counts);
  }
}

TEST_CASE("manifest loading") {
  testenv::TempDir dir;
  auto a = doc_with({{0, 1, "PER"}});
  write_corpus(dir / "a.jsonl", {a});
  write_corpus(dir / "b.jsonl", {doc_with({{1, 2, "DATE"}})});
  {
    std::ofstream out(dir / "runs.tsv");
    out << "# model\trecall\tscheme\tcorpus\nflair\t0.88\tconll4\ta.jsonl\nspacy\t0.91\tontonotes18\tb.jsonl\n";
  }
  const auto runs = load_model_runs(dir / "runs.tsv");
  REQUIRE(runs.size() == 2);
  CHECK(runs[0].documents[0].spans[0].source == "flair");
  const auto merged = merge_corpus(runs, mapper(), Execution::serial);
  REQUIRE(merged.corpus[0].spans.size() == 2);
  CHECK(merged.report.models[0].model_id == "spacy");

  {
    std::ofstream out(dir / "norecall.tsv");
    out << "flair\t-\tconll4\ta.jsonl\n";
  }
  const auto unranked = load_model_runs(dir / "norecall.tsv");
  CHECK_THROWS_AS(rank_models(unranked), Error);
  {
    std::ofstream out(dir / "bad.tsv");
    out << "flair\t1.7\tconll4\ta.jsonl\n";
  }
  try {
    load_manifest(dir / "bad.tsv");
    FAIL("expected Config");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    CHECK(e.line() == 1);
  }
  {
    std::ofstream out(dir / "dup.tsv");
    out << "flair\t0.5\tconll4\ta.jsonl\nflair\t0.6\tconll4\ta.jsonl\n";
  }
  CHECK_THROWS_AS(load_model_runs(dir / "dup.tsv"), Error);
  write_corpus(dir / "twice.jsonl", {a, a});
  {
    std::ofstream out(dir / "twice.tsv");
    out << "flair\t0.5\tconll4\ttwice.jsonl\n";
  }
  CHECK_THROWS_AS(load_model_runs(dir / "twice.tsv"), Error);
}

}  // TEST_SUITE
