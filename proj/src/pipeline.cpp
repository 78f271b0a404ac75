#include "uner/pipeline.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "uner/codecs.hpp"
#include "uner/digest.hpp"
#include "uner/ensemble.hpp"
#include "uner/error.hpp"

namespace uner {

namespace fs = std::filesystem;

namespace {

Error config_error(const std::string& message) { return Error(ErrorKind::Config, message); }

void reject_unknown_keys(const nlohmann::json& j, std::string_view where, std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) throw config_error(std::string(where) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw config_error("unknown key \"" + key + "\" in " + std::string(where));
    }
  }
}

template <typename T>
T get(const nlohmann::json& j, const char* key, std::string_view where) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw config_error(std::string(where) + "." + key + " is missing or has the wrong type");
  }
}

// null is accepted wherever a key is optional, so to_json output loads back.
bool present(const nlohmann::json& j, const char* key) { return j.contains(key) && !j.at(key).is_null(); }

fs::path resolve(const fs::path& base, const std::string& p) { return (base / p).lexically_normal(); }

std::string path_str(const fs::path& p) { return p.generic_string(); }

void require_file(const fs::path& p, std::string_view what) {
  if (!fs::is_regular_file(p)) throw config_error(std::string(what) + " not found: " + p.string());
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j, const fs::path& base_dir) {
  reject_unknown_keys(j, "config",
                      {"taxonomy", "scheme_mappings", "manifest", "kb", "policy", "review", "projection", "score",
                       "output_dir", "parallel"});
  PipelineConfig c;
  c.taxonomy = resolve(base_dir, get<std::string>(j, "taxonomy", "config"));
  if (present(j, "scheme_mappings")) {
    for (const auto& p : get<std::vector<std::string>>(j, "scheme_mappings", "config")) {
      c.scheme_mappings.push_back(resolve(base_dir, p));
    }
  }
  c.manifest = resolve(base_dir, get<std::string>(j, "manifest", "config"));
  c.output_dir = resolve(base_dir, present(j, "output_dir") ? get<std::string>(j, "output_dir", "config") : "out");
  if (present(j, "parallel")) c.exec = get<bool>(j, "parallel", "config") ? Execution::parallel : Execution::serial;

  const auto& kb = j.at("kb");
  reject_unknown_keys(kb, "kb", {"mappings", "fixtures", "endpoints", "offline", "timeout_seconds"});
  c.kb.mappings = resolve(base_dir, get<std::string>(kb, "mappings", "kb"));
  if (present(kb, "fixtures")) c.kb.fixtures = resolve(base_dir, get<std::string>(kb, "fixtures", "kb"));
  if (present(kb, "endpoints")) c.kb.endpoints = get<std::map<std::string, std::string>>(kb, "endpoints", "kb");
  if (present(kb, "offline")) c.kb.offline = get<bool>(kb, "offline", "kb");
  if (present(kb, "timeout_seconds")) c.kb.timeout_seconds = get<int>(kb, "timeout_seconds", "kb");

  if (present(j, "policy")) {
    const auto& p = j.at("policy");
    reject_unknown_keys(p, "policy", {"action", "kb_precedence"});
    if (present(p, "action")) c.policy.action = parse_correction_action(get<std::string>(p, "action", "policy"));
    if (present(p, "kb_precedence")) {
      c.policy.kb_precedence = get<std::vector<std::string>>(p, "kb_precedence", "policy");
    }
  }

  if (present(j, "review")) {
    const auto& r = j.at("review");
    reject_unknown_keys(r, "review", {"enabled", "sampling", "verdicts", "quorum"});
    c.review.enabled = r.value("enabled", true);
    if (present(r, "sampling")) c.review.sampling = Sampling::parse(get<std::string>(r, "sampling", "review"));
    if (present(r, "verdicts")) c.review.verdicts = resolve(base_dir, get<std::string>(r, "verdicts", "review"));
    if (present(r, "quorum")) c.review.quorum = get<std::size_t>(r, "quorum", "review");
  }

  if (present(j, "projection")) {
    const auto& p = j.at("projection");
    reject_unknown_keys(p, "projection", {"enabled", "targets", "alignments", "min_coverage", "on_collision"});
    c.projection.enabled = p.value("enabled", true);
    if (c.projection.enabled || present(p, "targets")) {
      c.projection.targets = resolve(base_dir, get<std::string>(p, "targets", "projection"));
      c.projection.alignments = resolve(base_dir, get<std::string>(p, "alignments", "projection"));
    }
    if (present(p, "min_coverage")) c.projection.config.min_coverage = get<double>(p, "min_coverage", "projection");
    if (present(p, "on_collision")) {
      c.projection.config.on_collision = parse_collision_policy(get<std::string>(p, "on_collision", "projection"));
    }
  }

  if (present(j, "score")) {
    const auto& s = j.at("score");
    reject_unknown_keys(s, "score", {"gold_source", "gold_target", "level", "head"});
    if (present(s, "gold_source")) c.score.gold_source = resolve(base_dir, get<std::string>(s, "gold_source", "score"));
    if (present(s, "gold_target")) c.score.gold_target = resolve(base_dir, get<std::string>(s, "gold_target", "score"));
    if (present(s, "level")) {
      const auto& level = s.at("level");
      c.score.level = MatchLevel::parse(level.is_number() ? std::to_string(level.get<int>()) : level.get<std::string>());
    }
    if (present(s, "head")) c.score.head = get<std::size_t>(s, "head", "score");
  }
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw config_error("cannot open config " + file.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw config_error(file.string() + ": " + e.what());
  }
  return from_json(j, fs::absolute(file).parent_path());
}

void PipelineConfig::check() const {
  require_file(taxonomy, "taxonomy");
  for (const auto& p : scheme_mappings) require_file(p, "scheme mapping");
  require_file(manifest, "run manifest");
  require_file(kb.mappings, "kb mapping table");
  if (kb.fixtures) require_file(*kb.fixtures, "kb fixture store");
  if (!kb.offline && kb.endpoints.empty() && !kb.fixtures) {
    throw config_error("online correction needs kb.endpoints or kb.fixtures");
  }
  policy.check();
  if (review.enabled && review.verdicts) require_file(*review.verdicts, "verdict log");
  if (review.quorum < 1) throw config_error("review.quorum must be at least 1");
  if (projection.enabled) {
    require_file(projection.targets, "projection targets");
    require_file(projection.alignments, "alignment file");
    if (!(projection.config.min_coverage >= 0.0 && projection.config.min_coverage <= 1.0)) {
      throw config_error("projection.min_coverage must lie in [0, 1]");
    }
  }
  if (score.gold_source) require_file(*score.gold_source, "source gold");
  if (score.gold_target) require_file(*score.gold_target, "target gold");
  if (output_dir.empty()) throw config_error("output_dir is empty");

  // Parse the small tables now so a bad row fails before any stage runs.
  try {
    const auto tax = Taxonomy::load(taxonomy);
    SchemeMappings mappings;
    for (const auto& p : scheme_mappings) load_scheme_mappings(p, tax, mappings);
    for (const auto& row : load_manifest(manifest)) {
      require_file(row.corpus_path, "model run");
      if (row.scheme_id != kUnerScheme && !mappings.count(row.scheme_id)) {
        throw config_error("model " + row.model_id + " uses scheme " + row.scheme_id + " with no mapping table");
      }
    }
    KbClassMappings::load(kb.mappings, tax);
  } catch (const Error& e) {
    if (is_config_error(e.kind())) throw;
    throw config_error(e.what());
  }
}

nlohmann::ordered_json PipelineConfig::to_json() const {
  nlohmann::ordered_json j;
  j["taxonomy"] = path_str(taxonomy);
  j["scheme_mappings"] = nlohmann::ordered_json::array();
  for (const auto& p : scheme_mappings) j["scheme_mappings"].push_back(path_str(p));
  j["manifest"] = path_str(manifest);
  j["kb"]["mappings"] = path_str(kb.mappings);
  j["kb"]["fixtures"] = kb.fixtures ? nlohmann::ordered_json(path_str(*kb.fixtures)) : nlohmann::ordered_json();
  j["kb"]["endpoints"] = kb.endpoints;
  j["kb"]["offline"] = kb.offline;
  j["kb"]["timeout_seconds"] = kb.timeout_seconds;
  j["policy"]["action"] = to_string(policy.action);
  j["policy"]["kb_precedence"] = policy.kb_precedence;
  j["review"]["enabled"] = review.enabled;
  j["review"]["sampling"] = review.sampling.str();
  j["review"]["verdicts"] = review.verdicts ? nlohmann::ordered_json(path_str(*review.verdicts)) : nlohmann::ordered_json();
  j["review"]["quorum"] = review.quorum;
  j["projection"]["enabled"] = projection.enabled;
  j["projection"]["targets"] = path_str(projection.targets);
  j["projection"]["alignments"] = path_str(projection.alignments);
  j["projection"]["min_coverage"] = projection.config.min_coverage;
  j["projection"]["on_collision"] = to_string(projection.config.on_collision);
  j["score"]["gold_source"] =
      score.gold_source ? nlohmann::ordered_json(path_str(*score.gold_source)) : nlohmann::ordered_json();
  j["score"]["gold_target"] =
      score.gold_target ? nlohmann::ordered_json(path_str(*score.gold_target)) : nlohmann::ordered_json();
  j["score"]["level"] = score.level.str();
  j["score"]["head"] = score.head;
  j["output_dir"] = path_str(output_dir);
  j["parallel"] = exec == Execution::parallel;
  return j;
}

std::string PipelineConfig::digest() const { return sha256_hex(to_json().dump()); }

void write_provenance(const fs::path& output, std::string_view stage, std::span<const fs::path> inputs,
                      const nlohmann::ordered_json& parameters, std::string_view config_digest) {
  nlohmann::ordered_json j;
  j["stage"] = stage;
  j["output"] = path_str(output.filename());
  j["output_sha256"] = sha256_file(output);
  j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& in : inputs) {
    j["inputs"].push_back({{"path", path_str(fs::absolute(in).lexically_normal())}, {"sha256", sha256_file(in)}});
  }
  j["parameters"] = parameters;
  j["config_digest"] = config_digest;
  j["timestamp"] = utc_timestamp();
  auto prov = output;
  prov += ".prov.json";
  write_text_atomic(prov, j.dump(2) + "\n");
}

namespace {

void write_json(const fs::path& file, const nlohmann::ordered_json& j) { write_text_atomic(file, j.dump(2) + "\n"); }

nlohmann::ordered_json trace_json(const CorrectionTrace& t) {
  nlohmann::ordered_json j;
  j["doc_id"] = t.doc_id;
  j["span_id"] = t.span_id;
  j["old_label"] = t.old_label;
  j["new_label"] = t.new_label;
  j["kb_id"] = t.kb_id;
  j["reason"] = t.reason;
  return j;
}

class StageRunner {
 public:
  StageRunner(const PipelineConfig& config, std::ostream* log) : config_(config), log_(log) {}

  void run(const std::string& name, const std::function<std::vector<fs::path>()>& body) {
    std::vector<fs::path> files;
    try {
      files = body();
    } catch (const Error& e) {
      throw Error(e.kind(), "stage " + name + " failed: " + e.message() + last_artifact(), e.detail());
    } catch (const std::exception& e) {
      throw Error(ErrorKind::Io, "stage " + name + " failed: " + e.what() + last_artifact());
    }
    if (log_) {
      *log_ << "stage " << name << ":";
      for (const auto& f : files) *log_ << " " << f.filename().string();
      *log_ << "\n";
    }
    if (!files.empty()) last_ = files.front();
    result.stages.push_back({name, std::move(files)});
  }

  PipelineResult result;

 private:
  std::string last_artifact() const {
    return last_ ? " (last valid artifact: " + last_->string() + ")" : " (no artifact written yet)";
  }

  const PipelineConfig& config_;
  std::ostream* log_;
  std::optional<fs::path> last_;
};

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config, std::ostream* log) {
  config.check();
  const auto& out = config.output_dir;
  fs::create_directories(out);
  const auto digest = config.digest();
  const auto taxonomy = Taxonomy::load(config.taxonomy);
  SchemeMappings schemes;
  for (const auto& p : config.scheme_mappings) load_scheme_mappings(p, taxonomy, schemes);

  StageRunner stages(config, log);
  fs::path current;  // the source-side corpus handed to the next stage

  stages.run("merge", [&] {
    const auto runs = load_model_runs(config.manifest);
    std::vector<fs::path> inputs{config.taxonomy, config.manifest};
    inputs.insert(inputs.end(), config.scheme_mappings.begin(), config.scheme_mappings.end());
    for (const auto& row : load_manifest(config.manifest)) inputs.push_back(row.corpus_path);
    const LabelMapper labels(taxonomy, schemes);
    auto merged = merge_corpus(runs, labels, config.exec);
    const auto file = out / "01-merge.jsonl";
    const auto report = out / "01-merge.report.json";
    write_corpus(file, merged.corpus);
    write_json(report, merged.report.to_json());
    write_provenance(file, "merge", inputs, {{"manifest", path_str(config.manifest)}}, digest);
    current = file;
    return std::vector<fs::path>{file, report};
  });

  stages.run("correct", [&] {
    const auto input = current;
    const auto corpus = read_corpus(input);
    const auto mappings = KbClassMappings::load(config.kb.mappings, taxonomy);
    std::unique_ptr<KbClient> client;
    if (config.kb.offline || config.kb.endpoints.empty()) {
      client = std::make_unique<FixtureKbClient>(config.kb.fixtures ? FixtureKbClient::load(*config.kb.fixtures)
                                                                     : FixtureKbClient());
    } else {
      client = std::make_unique<SparqlKbClient>(config.kb.endpoints, config.kb.timeout_seconds);
    }
    KbCache cache;
    auto corrected = correct_corpus(corpus, *client, cache, mappings, config.policy, config.exec);
    const auto file = out / "02-correct.jsonl";
    const auto report = out / "02-correct.report.json";
    const auto traces = out / "02-correct.traces.jsonl";
    write_corpus(file, corrected.corpus);
    auto rj = corrected.report.to_json();
    rj["policy"] = {{"action", to_string(config.policy.action)}, {"kb_precedence", config.policy.kb_precedence}};
    rj["client_calls"] = client->calls();
    rj["network_calls"] = client->network_calls();
    write_json(report, rj);
    std::string lines;
    for (const auto& t : corrected.traces) lines += trace_json(t).dump() + "\n";
    write_text_atomic(traces, lines);
    std::vector<fs::path> inputs{input, config.kb.mappings};
    if (config.kb.fixtures) inputs.push_back(*config.kb.fixtures);
    write_provenance(file, "correct", inputs, config.to_json()["policy"], digest);
    current = file;
    return std::vector<fs::path>{file, report, traces};
  });

  if (config.review.enabled) {
    stages.run("review", [&] {
      const auto input = current;
      const auto corpus = read_corpus(input);
      const auto tasks = generate_tasks(corpus, config.review.sampling, &taxonomy);
      const auto tasks_file = out / "03-review.tasks.jsonl";
      write_tasks(tasks_file, tasks);
      write_provenance(tasks_file, "tasks", std::vector<fs::path>{input},
                       {{"sampling", config.review.sampling.str()}}, digest);
      const auto file = out / "03-review.jsonl";
      std::vector<fs::path> files{file, tasks_file};
      std::vector<fs::path> inputs{input};
      if (config.review.verdicts) {
        const auto verdicts = VerdictLog::read(*config.review.verdicts);
        auto adjudicated = apply_verdicts(corpus, verdicts, config.review.quorum);
        write_corpus(file, adjudicated.corpus);
        const auto report = out / "03-review.report.json";
        write_json(report, adjudicated.report.to_json());
        files.push_back(report);
        inputs.push_back(*config.review.verdicts);
      } else {
        write_corpus(file, corpus);
      }
      write_provenance(file, "apply-verdicts", inputs, config.to_json()["review"], digest);
      current = file;
      return files;
    });
  }

  fs::path projected;
  if (config.projection.enabled) {
    stages.run("project", [&] {
      const auto input = current;
      auto pairs = make_pairs(read_corpus(input), read_corpus(config.projection.targets),
                              read_alignments(config.projection.alignments));
      auto result = project_corpus(pairs, config.projection.config, config.exec);
      const auto file = out / "04-project.jsonl";
      const auto report = out / "04-project.report.json";
      write_corpus(file, result.targets);
      write_json(report, result.report.to_json());
      write_provenance(file, "project", std::vector<fs::path>{input, config.projection.targets, config.projection.alignments},
                       config.projection.config.to_json(), digest);
      projected = file;
      return std::vector<fs::path>{file, report};
    });
  }

  if (config.score.gold_source || (config.score.gold_target && !projected.empty())) {
    stages.run("score", [&] {
      nlohmann::ordered_json j;
      std::string table;
      std::vector<fs::path> inputs;
      const auto score_one = [&](const char* side, const fs::path& gold_file, const fs::path& pred_file) {
        const auto report = score(read_corpus(gold_file), read_corpus(pred_file), config.score.level, config.exec);
        j[side] = report.to_json();
        table += std::string(side) + "\n" + report.table() + "\n";
        inputs.push_back(gold_file);
        inputs.push_back(pred_file);
        return report;
      };
      if (config.score.gold_source) stages.result.source_score = score_one("source", *config.score.gold_source, current);
      if (config.score.gold_target && !projected.empty()) {
        stages.result.target_score = score_one("target", *config.score.gold_target, projected);
      }
      const auto file = out / "05-score.json";
      const auto text = out / "05-score.txt";
      write_json(file, j);
      write_text_atomic(text, table);
      write_provenance(file, "score", inputs, {{"level", config.score.level.str()}}, digest);
      return std::vector<fs::path>{file, text};
    });
  }

  stages.run("stats", [&] {
    nlohmann::ordered_json j;
    std::vector<fs::path> inputs{current};
    const auto source = read_corpus(current);
    j["source"] = distribution_report(source, taxonomy, config.score.head, config.exec).to_json();
    const auto inventory = entity_inventory(source, config.exec);
    j["source"]["occurrences"] = inventory.occurrences;
    j["source"]["distinct_surfaces"] = inventory.distinct_surfaces;
    if (!projected.empty()) {
      j["target"] = distribution_report(read_corpus(projected), taxonomy, config.score.head, config.exec).to_json();
      inputs.push_back(projected);
    }
    const auto file = out / "06-stats.json";
    write_json(file, j);
    write_provenance(file, "stats", inputs, {{"head", config.score.head}}, digest);
    return std::vector<fs::path>{file};
  });

  nlohmann::ordered_json run;
  run["config"] = config.to_json();
  run["config_digest"] = digest;
  run["stages"] = nlohmann::ordered_json::array();
  for (const auto& s : stages.result.stages) {
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const auto& f : s.files) files.push_back(path_str(f.filename()));
    run["stages"].push_back({{"stage", s.stage}, {"files", files}});
  }
  write_json(out / "run.json", run);
  return std::move(stages.result);
}

}  // namespace uner
