#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "support/paths.hpp"
#include "uner/codecs.hpp"

using namespace uner;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) {
    if (c == '\'') q += "'\\''";
    else q += c;
  }
  return q + "'";
}

Outcome uner_cli(const testenv::TempDir& dir, const std::vector<std::string>& args) {
  std::string cmd = quote(UNER_CLI_PATH);
  for (const auto& a : args) cmd += " " + quote(a);
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  cmd += " > " + quote(out.string()) + " 2> " + quote(err.string());
  const int status = std::system(cmd.c_str());
  Outcome o;
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.out = slurp(out);
  o.err = slurp(err);
  return o;
}

struct Bare {
  std::size_t start, end;
  std::string label;
  friend bool operator==(const Bare&, const Bare&) = default;
};

std::vector<std::vector<Bare>> bare(const Corpus& corpus) {
  std::vector<std::vector<Bare>> out;
  for (const auto& d : corpus) {
    auto& v = out.emplace_back();
    for (const auto& s : d.spans) v.push_back({s.token_start, s.token_end, s.label});
  }
  return out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with 2") {
  testenv::TempDir dir;
  CHECK(uner_cli(dir, {}).code == 2);
  CHECK(uner_cli(dir, {"no-such-command"}).code == 2);
  CHECK(uner_cli(dir, {"convert", "--in", "x"}).code == 2);
  CHECK(uner_cli(dir, {"--version"}).code == 0);
}

TEST_CASE("validate-taxonomy prints level counts") {
  testenv::TempDir dir;
  auto o = uner_cli(dir, {"validate-taxonomy", testenv::taxonomy_file().string(), "--expect", "1,3,29,95,129"});
  CHECK(o.code == 0);
  CHECK(o.out.find("levels 1 3 29 95 129") != std::string::npos);
  o = uner_cli(dir, {"validate-taxonomy", testenv::taxonomy_file().string(), "--expect", "1,3,28,87,125"});
  CHECK(o.code == 1);
  o = uner_cli(dir, {"validate-taxonomy", (testenv::data_dir() / "taxonomy" / "sekine-7.1.0.json").string(), "--expect",
                     "1,3,28,87,125"});
  CHECK(o.code == 0);
}

TEST_CASE("convert round trips through every format") {
  testenv::TempDir dir;
  const auto src = testenv::fixtures() / "conll4_20.uner.jsonl";
  const auto original = read_corpus(src);
  for (const char* fmt : {"iob2", "inline-xml"}) {
    CAPTURE(fmt);
    const auto mid = dir / (std::string("mid.") + fmt);
    const auto back = dir / "back.jsonl";
    std::vector<std::string> to{"convert", "--in", src.string(), "--out", mid.string(), "--to", fmt};
    if (std::string(fmt) == "iob2") to.push_back("--doc-headers");
    REQUIRE(uner_cli(dir, to).code == 0);
    REQUIRE(uner_cli(dir, {"convert", "--in", mid.string(), "--out", back.string(), "--from", fmt, "--to", "spans"}).code == 0);
    const auto round = read_corpus(back);
    REQUIRE(round.size() == original.size());
    CHECK(bare(round) == bare(original));
    for (std::size_t i = 0; i < round.size(); ++i) CHECK(round[i].tokens == original[i].tokens);
  }
}

TEST_CASE("malformed input exits with 1 and names the line") {
  testenv::TempDir dir;
  const auto bad = dir / "bad.jsonl";
  {
    std::ofstream out(bad);
    const auto lines = slurp(testenv::fixtures() / "conll4_20.uner.jsonl");
    out << lines.substr(0, lines.find('\n') + 1) << "{\"doc_id\": 3\n";
  }
  const auto o = uner_cli(dir, {"convert", "--in", bad.string(), "--out", (dir / "o.iob2").string(), "--to", "iob2"});
  CHECK(o.code == 1);
  CHECK(o.err.find("line 2") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "o.iob2"));
  CHECK(uner_cli(dir, {"validate", (dir / "missing.jsonl").string()}).code != 0);
}

TEST_CASE("score and validate") {
  testenv::TempDir dir;
  const auto gold = testenv::fixtures() / "conll4_20.uner.jsonl";
  const auto report = dir / "score.json";
  auto o = uner_cli(dir, {"score", "--gold", gold.string(), "--pred", gold.string(), "--report", report.string()});
  REQUIRE(o.code == 0);
  const auto j = nlohmann::json::parse(slurp(report));
  CHECK(j.at("f1").get<double>() == doctest::Approx(1.0));
  CHECK(uner_cli(dir, {"validate", gold.string()}).code == 0);

  const auto bad = dir / "bad-label.jsonl";
  auto corpus = read_corpus(gold);
  for (auto& d : corpus) {
    if (!d.spans.empty()) {
      d.spans[0].label = "Name.Nowhere";
      break;
    }
  }
  write_corpus(bad, corpus);
  o = uner_cli(dir, {"validate", bad.string()});
  CHECK(o.code == 1);
  CHECK(o.out.find("Name.Nowhere") != std::string::npos);
}

TEST_CASE("synth then run then stage outputs validate") {
  testenv::TempDir dir;
  const auto ws = dir / "ws";
  auto o = uner_cli(dir, {"synth", "--out", ws.string(), "--sentences", "150", "--data-dir", testenv::data_dir().string()});
  REQUIRE(o.code == 0);
  o = uner_cli(dir, {"run", "--config", (ws / "pipeline.json").string(), "--review"});
  REQUIRE(o.code == 0);
  CHECK(o.out.find("outputs in") != std::string::npos);
  for (const char* f : {"01-merge.jsonl", "02-correct.jsonl", "03-review.jsonl", "04-project.jsonl"}) {
    CAPTURE(f);
    CHECK(uner_cli(dir, {"validate", (ws / "out" / f).string()}).code == 0);
  }
  o = uner_cli(dir, {"run", "--config", (ws / "pipeline.json").string(), "--policy", "overwrite"});
  CHECK(o.code == 2);
}

TEST_CASE("tasks, apply-verdicts and export") {
  testenv::TempDir dir;
  const auto gold = testenv::fixtures() / "conll4_20.uner.jsonl";
  const auto tasks = dir / "tasks.jsonl";
  REQUIRE(uner_cli(dir, {"tasks", "--in", gold.string(), "--out", tasks.string(), "--sampling", "quota:1"}).code == 0);
  const auto loaded = slurp(tasks);
  CHECK(std::count(loaded.begin(), loaded.end(), '\n') == 4);

  const auto log = dir / "log.jsonl";
  {
    std::ofstream out(log);
    out << "{\"task_id\":\"nope#s0\",\"annotator_id\":\"a\",\"action\":\"accept\",\"ts\":\"t\"}\n";
  }
  const auto out = dir / "applied.jsonl";
  auto o = uner_cli(dir, {"apply-verdicts", "--in", gold.string(), "--log", log.string(), "--out", out.string(),
                          "--quorum", "1"});
  REQUIRE(o.code == 0);
  CHECK(bare(read_corpus(out)) == bare(read_corpus(gold)));

  const auto splits = dir / "splits";
  REQUIRE(uner_cli(dir, {"export", "--in", gold.string(), "--out-dir", splits.string(), "--format", "spans"}).code == 0);
  std::size_t total = 0;
  for (const auto& e : fs::directory_iterator(splits)) {
    if (e.path().extension() == ".jsonl") total += read_corpus(e.path()).size();
  }
  CHECK(total == read_corpus(gold).size());
}

}  // TEST_SUITE
