// uner: command-line front end for the UNER toolkit.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "uner/codecs.hpp"
#include "uner/digest.hpp"
#include "uner/ensemble.hpp"
#include "uner/error.hpp"
#include "uner/evaluation.hpp"
#include "uner/kb_linker.hpp"
#include "uner/pipeline.hpp"
#include "uner/projection.hpp"
#include "uner/review.hpp"
#include "uner/review_server.hpp"
#include "uner/synthetic.hpp"

namespace fs = std::filesystem;
using namespace uner;

namespace {

constexpr int kDataError = 1;
constexpr int kConfigError = 2;

fs::path data_dir() {
  if (const char* env = std::getenv("UNER_DATA_DIR"); env && *env) return env;
  return UNER_DEFAULT_DATA_DIR;
}

fs::path default_taxonomy() { return data_dir() / "taxonomy" / "uner.json"; }

Execution execution(bool serial) { return serial ? Execution::serial : Execution::parallel; }

void provenance(const fs::path& output, std::string_view stage, std::vector<fs::path> inputs,
                const nlohmann::ordered_json& params) {
  write_provenance(output, stage, inputs, params, sha256_hex(params.dump()));
}

void write_report(const std::string& path, const nlohmann::ordered_json& j) {
  if (path.empty()) return;
  write_text_atomic(path, j.dump(2) + "\n");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// "kb=url" pairs; a bare URL is taken as the wikidata endpoint.
std::map<std::string, std::string> parse_endpoints(const std::vector<std::string>& specs) {
  std::map<std::string, std::string> out;
  for (const auto& s : specs) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || s.compare(0, 4, "http") == 0) {
      out["wikidata"] = s;
    } else {
      out[s.substr(0, eq)] = s.substr(eq + 1);
    }
  }
  return out;
}

void print_violations(const std::vector<Violation>& violations, std::ostream& out) {
  for (const auto& v : violations) {
    out << v.doc_id << "\t" << to_string(v.kind) << "\t" << v.where << "\t" << v.message << "\n";
  }
}

std::vector<int> parse_counts(const std::string& s) {
  std::vector<int> out;
  for (const auto& item : split_list(s)) out.push_back(std::stoi(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UNER toolkit: taxonomy, codecs, ensemble merge, KB correction, projection, review, scoring"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "uner 1.0.0");

  std::function<int()> action;

  // validate-taxonomy
  auto* vt = app.add_subcommand("validate-taxonomy", "Load a taxonomy and print its per-level node counts");
  std::string vt_file = default_taxonomy().string();
  std::string vt_expect;
  vt->add_option("taxonomy", vt_file, "Taxonomy JSON")->capture_default_str();
  vt->add_option("--expect", vt_expect, "Expected counts, e.g. 1,3,29,95,129");
  vt->callback([&] {
    action = [&] {
      const auto tax = Taxonomy::load(vt_file);
      const auto counts = tax.level_counts();
      std::cout << "levels";
      for (auto c : counts) std::cout << " " << c;
      std::cout << "\nnodes " << tax.size() << "\n";
      if (!vt_expect.empty()) {
        const auto want = parse_counts(vt_expect);
        if (want.size() != counts.size() ||
            !std::equal(want.begin(), want.end(), counts.begin(), [](int a, std::size_t b) { return a >= 0 && std::size_t(a) == b; })) {
          std::cerr << "level counts differ from " << vt_expect << "\n";
          return kDataError;
        }
      }
      return 0;
    };
  });

  // validate
  auto* va = app.add_subcommand("validate", "Check a corpus against the structural rules and the taxonomy");
  std::string va_in, va_format = "spans", va_tax = default_taxonomy().string();
  va->add_option("corpus", va_in, "Corpus file")->required();
  va->add_option("--format", va_format, "spans | iob2 | inline-xml")->capture_default_str();
  va->add_option("--taxonomy", va_tax, "Taxonomy JSON")->capture_default_str();
  va->callback([&] {
    action = [&] {
      const auto tax = Taxonomy::load(va_tax);
      std::ifstream in(va_in);
      if (!in) throw Error(ErrorKind::Io, "cannot open " + va_in);
      CorpusReader reader(in, parse_format(va_format));
      Corpus corpus;
      while (auto doc = reader.next()) corpus.push_back(std::move(*doc));
      for (const auto& w : reader.warnings()) std::cerr << "warning: " << w << "\n";
      const auto violations = validate(corpus, tax);
      print_violations(violations, std::cout);
      std::cerr << corpus.size() << " documents, " << violations.size() << " violations\n";
      return violations.empty() ? 0 : kDataError;
    };
  });

  // convert
  auto* cv = app.add_subcommand("convert", "Convert between spans (JSONL), IOB2 and inline XML");
  std::string cv_in, cv_out, cv_from = "spans", cv_to = "iob2";
  bool cv_headers = false;
  cv->add_option("--in", cv_in, "Input file")->required();
  cv->add_option("--out", cv_out, "Output file")->required();
  cv->add_option("--from", cv_from, "Input format")->capture_default_str();
  cv->add_option("--to", cv_to, "Output format")->capture_default_str();
  cv->add_flag("--doc-headers", cv_headers, "Write '# doc_id = ...' lines in IOB2 output");
  cv->callback([&] {
    action = [&] {
      const auto from = parse_format(cv_from);
      const auto to = parse_format(cv_to);
      std::ifstream in(cv_in);
      if (!in) throw Error(ErrorKind::Io, "cannot open " + cv_in);
      const fs::path out_path = cv_out;
      auto tmp = out_path;
      tmp += ".tmp";
      std::size_t n = 0;
      {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
        CorpusReader reader(in, from);
        CorpusWriter writer(out, to, {cv_headers});
        try {
          while (auto doc = reader.next()) {
            writer.write(*doc);
            ++n;
          }
        } catch (...) {
          out.close();
          fs::remove(tmp);
          throw;
        }
        for (const auto& w : reader.warnings()) std::cerr << "warning: " << w << "\n";
      }
      fs::rename(tmp, out_path);
      std::cerr << n << " documents\n";
      return 0;
    };
  });

  // merge
  auto* mg = app.add_subcommand("merge", "Merge model runs by recall priority");
  std::string mg_manifest, mg_out, mg_report, mg_tax = default_taxonomy().string();
  std::vector<std::string> mg_schemes{(data_dir() / "mappings" / "schemes.tsv").string()};
  bool mg_serial = false;
  mg->add_option("--manifest", mg_manifest, "Run manifest TSV")->required();
  mg->add_option("--out", mg_out, "Merged corpus")->required();
  mg->add_option("--report", mg_report, "Merge report JSON");
  mg->add_option("--schemes", mg_schemes, "Scheme mapping TSV files")->capture_default_str();
  mg->add_option("--taxonomy", mg_tax, "Taxonomy JSON")->capture_default_str();
  mg->add_flag("--serial", mg_serial, "Disable OpenMP");
  mg->callback([&] {
    action = [&] {
      const auto tax = Taxonomy::load(mg_tax);
      SchemeMappings schemes;
      for (const auto& s : mg_schemes) load_scheme_mappings(s, tax, schemes);
      const auto runs = load_model_runs(mg_manifest);
      const LabelMapper labels(tax, schemes);
      const auto merged = merge_corpus(runs, labels, execution(mg_serial));
      write_corpus(mg_out, merged.corpus);
      write_report(mg_report, merged.report.to_json());
      std::vector<fs::path> inputs{mg_tax, mg_manifest};
      for (const auto& s : mg_schemes) inputs.emplace_back(s);
      for (const auto& row : load_manifest(mg_manifest)) inputs.push_back(row.corpus_path);
      provenance(mg_out, "merge", inputs, {{"manifest", mg_manifest}});
      std::cout << merged.report.to_json().dump(2) << "\n";
      return 0;
    };
  });

  // correct
  auto* co = app.add_subcommand("correct", "Refine labels from knowledge-base classes");
  std::string co_in, co_out, co_report, co_traces, co_fixtures, co_policy = "refine-only",
      co_precedence = "wikidata,dbpedia,yago", co_tax = default_taxonomy().string(),
      co_mappings = (data_dir() / "mappings" / "kb.tsv").string();
  std::vector<std::string> co_endpoints;
  bool co_offline = false, co_serial = false;
  int co_timeout = 20;
  co->add_option("--in", co_in, "Input corpus")->required();
  co->add_option("--out", co_out, "Corrected corpus")->required();
  co->add_option("--report", co_report, "Correction report JSON");
  co->add_option("--traces", co_traces, "Per-span trace JSONL");
  co->add_option("--fixtures", co_fixtures, "Offline KB store (JSONL)");
  co->add_option("--endpoint", co_endpoints, "SPARQL endpoint as kb=url (repeatable)");
  co->add_option("--policy", co_policy, "refine-only | replace | annotate-only")->capture_default_str();
  co->add_option("--precedence", co_precedence, "KB precedence, comma separated")->capture_default_str();
  co->add_option("--kb-mappings", co_mappings, "KB class mapping TSV")->capture_default_str();
  co->add_option("--taxonomy", co_tax, "Taxonomy JSON")->capture_default_str();
  co->add_option("--timeout", co_timeout, "Endpoint timeout in seconds")->capture_default_str();
  co->add_flag("--offline", co_offline, "Never contact an endpoint");
  co->add_flag("--serial", co_serial, "Disable OpenMP");
  co->callback([&] {
    action = [&] {
      const auto tax = Taxonomy::load(co_tax);
      const auto mappings = KbClassMappings::load(co_mappings, tax);
      CorrectionPolicy policy;
      policy.action = parse_correction_action(co_policy);
      policy.kb_precedence = split_list(co_precedence);
      policy.check();
      const auto endpoints = parse_endpoints(co_endpoints);
      std::unique_ptr<KbClient> client;
      if (co_offline || endpoints.empty()) {
        if (co_fixtures.empty() && !co_offline) {
          throw Error(ErrorKind::Config, "give --fixtures, --endpoint or --offline");
        }
        client = std::make_unique<FixtureKbClient>(co_fixtures.empty() ? FixtureKbClient()
                                                                       : FixtureKbClient::load(co_fixtures));
      } else {
        client = std::make_unique<SparqlKbClient>(endpoints, co_timeout);
      }
      const auto corpus = read_corpus(co_in);
      KbCache cache;
      const auto corrected = correct_corpus(corpus, *client, cache, mappings, policy, execution(co_serial));
      write_corpus(co_out, corrected.corpus);
      auto rj = corrected.report.to_json();
      rj["client_calls"] = client->calls();
      rj["network_calls"] = client->network_calls();
      write_report(co_report, rj);
      if (!co_traces.empty()) {
        std::string lines;
        for (const auto& t : corrected.traces) {
          nlohmann::ordered_json j;
          j["doc_id"] = t.doc_id;
          j["span_id"] = t.span_id;
          j["old_label"] = t.old_label;
          j["new_label"] = t.new_label;
          j["kb_id"] = t.kb_id;
          j["reason"] = t.reason;
          lines += j.dump() + "\n";
        }
        write_text_atomic(co_traces, lines);
      }
      std::vector<fs::path> inputs{co_in, co_mappings};
      if (!co_fixtures.empty()) inputs.emplace_back(co_fixtures);
      provenance(co_out, "correct", inputs,
                 {{"action", co_policy}, {"kb_precedence", policy.kb_precedence}, {"offline", co_offline},
                  {"endpoints", endpoints}});
      std::cout << rj.dump(2) << "\n";
      return 0;
    };
  });

  // project
  auto* pj = app.add_subcommand("project", "Project source spans onto aligned target sentences");
  std::string pj_source, pj_target, pj_align, pj_out, pj_report, pj_collision = "drop";
  double pj_coverage = 0.5;
  bool pj_serial = false;
  pj->add_option("--source", pj_source, "Annotated source corpus")->required();
  pj->add_option("--target", pj_target, "Unannotated target corpus")->required();
  pj->add_option("--alignments", pj_align, "Alignment file")->required();
  pj->add_option("--out", pj_out, "Projected target corpus")->required();
  pj->add_option("--report", pj_report, "Projection report JSON");
  pj->add_option("--min-coverage", pj_coverage, "Minimum aligned fraction of a source span")->capture_default_str();
  pj->add_option("--on-collision", pj_collision, "drop | keep-first")->capture_default_str();
  pj->add_flag("--serial", pj_serial, "Disable OpenMP");
  pj->callback([&] {
    action = [&] {
      ProjectionConfig config;
      config.min_coverage = pj_coverage;
      config.on_collision = parse_collision_policy(pj_collision);
      if (!(pj_coverage >= 0.0 && pj_coverage <= 1.0)) throw Error(ErrorKind::Config, "--min-coverage must lie in [0, 1]");
      auto pairs = make_pairs(read_corpus(pj_source), read_corpus(pj_target), read_alignments(fs::path(pj_align)));
      const auto result = project_corpus(pairs, config, execution(pj_serial));
      write_corpus(pj_out, result.targets);
      write_report(pj_report, result.report.to_json());
      provenance(pj_out, "project", {pj_source, pj_target, pj_align}, config.to_json());
      std::cout << result.report.to_json().dump(2) << "\n";
      return 0;
    };
  });

  // score
  auto* sc = app.add_subcommand("score", "Span-level precision, recall and F1");
  std::string sc_gold, sc_pred, sc_level = "exact", sc_report;
  bool sc_serial = false;
  sc->add_option("--gold", sc_gold, "Gold corpus")->required();
  sc->add_option("--pred", sc_pred, "Predicted corpus")->required();
  sc->add_option("--level", sc_level, "exact | 1 | 2 | 3 | 4")->capture_default_str();
  sc->add_option("--report", sc_report, "Score report JSON");
  sc->add_flag("--serial", sc_serial, "Disable OpenMP");
  sc->callback([&] {
    action = [&] {
      const auto level = MatchLevel::parse(sc_level);
      const auto report = score(read_corpus(sc_gold), read_corpus(sc_pred), level, execution(sc_serial));
      write_report(sc_report, report.to_json());
      std::cout << report.table();
      return 0;
    };
  });

  // stats
  auto* st = app.add_subcommand("stats", "Label distribution and zero-example nodes");
  std::string st_in, st_report, st_tax = default_taxonomy().string();
  std::size_t st_head = 20;
  st->add_option("--in", st_in, "Corpus")->required();
  st->add_option("--report", st_report, "Report JSON");
  st->add_option("--taxonomy", st_tax, "Taxonomy JSON")->capture_default_str();
  st->add_option("--head", st_head, "Number of top surfaces")->capture_default_str();
  st->callback([&] {
    action = [&] {
      const auto tax = Taxonomy::load(st_tax);
      const auto corpus = read_corpus(st_in);
      auto j = distribution_report(corpus, tax, st_head).to_json();
      const auto inv = entity_inventory(corpus);
      j["occurrences"] = inv.occurrences;
      j["distinct_surfaces"] = inv.distinct_surfaces;
      write_report(st_report, j);
      std::cout << j.dump(2) << "\n";
      return 0;
    };
  });

  // tasks
  auto* tk = app.add_subcommand("tasks", "Generate review tasks from a corpus");
  std::string tk_in, tk_out, tk_sampling = "all", tk_tax = default_taxonomy().string();
  tk->add_option("--in", tk_in, "Corpus")->required();
  tk->add_option("--out", tk_out, "Task JSONL")->required();
  tk->add_option("--sampling", tk_sampling, "all | quota:<n> | random:<fraction>:<seed>")->capture_default_str();
  tk->add_option("--taxonomy", tk_tax, "Taxonomy JSON")->capture_default_str();
  tk->callback([&] {
    action = [&] {
      const auto sampling = Sampling::parse(tk_sampling);
      const auto tax = Taxonomy::load(tk_tax);
      const auto tasks = generate_tasks(read_corpus(tk_in), sampling, &tax);
      write_tasks(tk_out, tasks);
      provenance(tk_out, "tasks", {tk_in}, {{"sampling", sampling.str()}});
      std::cerr << tasks.size() << " tasks\n";
      return 0;
    };
  });

  // serve
  auto* sv = app.add_subcommand("serve", "Serve review tasks over HTTP");
  std::string sv_tasks, sv_log, sv_host = "127.0.0.1", sv_static, sv_tax = default_taxonomy().string();
  int sv_port = 8080;
  std::size_t sv_quorum = 1;
  sv->add_option("--tasks", sv_tasks, "Task JSONL")->required();
  sv->add_option("--log", sv_log, "Verdict log (appended)")->required();
  sv->add_option("--port", sv_port, "Port, 0 for any free port")->capture_default_str();
  sv->add_option("--host", sv_host, "Bind address")->capture_default_str();
  sv->add_option("--taxonomy", sv_tax, "Taxonomy JSON")->capture_default_str();
  sv->add_option("--quorum", sv_quorum, "Verdicts after which a task is done")->capture_default_str();
  sv->add_option("--static", sv_static, "Directory served at /");
  sv->callback([&] {
    action = [&] {
      const auto tax = Taxonomy::load(sv_tax);
      VerdictLog log(sv_log);
      ReviewService service(read_tasks(sv_tasks), log, &tax, sv_quorum);
      ReviewServer server(service, sv_static.empty() ? std::nullopt : std::optional<fs::path>(sv_static));
      const int port = server.bind(sv_host, sv_port);
      std::cout << "listening on http://" << sv_host << ":" << port << std::endl;
      server.listen();
      return 0;
    };
  });

  // apply-verdicts
  auto* ap = app.add_subcommand("apply-verdicts", "Apply majority verdicts to a corpus");
  std::string ap_in, ap_log, ap_out, ap_report;
  std::size_t ap_quorum = 3;
  ap->add_option("--in", ap_in, "Corpus the tasks were generated from")->required();
  ap->add_option("--log", ap_log, "Verdict log")->required();
  ap->add_option("--out", ap_out, "Corrected corpus")->required();
  ap->add_option("--report", ap_report, "Agreement report JSON");
  ap->add_option("--quorum", ap_quorum, "Verdicts required per task")->capture_default_str();
  ap->callback([&] {
    action = [&] {
      if (!fs::exists(ap_log)) throw Error(ErrorKind::Io, "verdict log " + ap_log + " not found");
      const auto verdicts = VerdictLog::read(ap_log);
      const auto result = apply_verdicts(read_corpus(ap_in), verdicts, ap_quorum);
      write_corpus(ap_out, result.corpus);
      write_report(ap_report, result.report.to_json());
      provenance(ap_out, "apply-verdicts", {ap_in, ap_log}, {{"quorum", ap_quorum}});
      std::cout << result.report.to_json().dump(2) << "\n";
      return 0;
    };
  });

  // export
  auto* ex = app.add_subcommand("export", "Write train/dev/test splits");
  std::string ex_in, ex_dir, ex_format = "iob2", ex_stem = "uner";
  ex->add_option("--in", ex_in, "Corpus")->required();
  ex->add_option("--out-dir", ex_dir, "Output directory")->required();
  ex->add_option("--format", ex_format, "spans | iob2 | inline-xml")->capture_default_str();
  ex->add_option("--stem", ex_stem, "File name stem")->capture_default_str();
  ex->callback([&] {
    action = [&] {
      const auto summary = export_training(read_corpus(ex_in), parse_format(ex_format), ex_dir, ex_stem);
      std::cout << "train " << summary.train << "\ndev " << summary.dev << "\ntest " << summary.test << "\n";
      return 0;
    };
  });

  // run
  auto* rn = app.add_subcommand("run", "Run the whole pipeline from a config file");
  std::string rn_config, rn_out, rn_policy, rn_precedence, rn_collision, rn_level, rn_verdicts, rn_sampling, rn_fixtures;
  double rn_coverage = 0.5;
  std::size_t rn_quorum = 0;
  bool rn_offline = false, rn_online = false, rn_no_proj = false, rn_serial = false, rn_review = false,
       rn_no_review = false;
  rn->add_option("--config", rn_config, "Pipeline config JSON")->required();
  rn->add_option("--output-dir", rn_out, "Override output_dir");
  rn->add_option("--policy", rn_policy, "Override policy.action");
  rn->add_option("--precedence", rn_precedence, "Override policy.kb_precedence (comma separated)");
  rn->add_option("--fixtures", rn_fixtures, "Override kb.fixtures");
  rn->add_option("--min-coverage", rn_coverage, "Override projection.min_coverage");
  rn->add_option("--on-collision", rn_collision, "Override projection.on_collision");
  rn->add_option("--level", rn_level, "Override score.level");
  rn->add_option("--verdicts", rn_verdicts, "Override review.verdicts");
  rn->add_option("--sampling", rn_sampling, "Override review.sampling");
  rn->add_option("--quorum", rn_quorum, "Override review.quorum");
  rn->add_flag("--offline", rn_offline, "Forbid all network use");
  rn->add_flag("--online", rn_online, "Allow configured endpoints");
  rn->add_flag("--no-projection", rn_no_proj, "Skip projection");
  rn->add_flag("--review", rn_review, "Enable the review stage");
  rn->add_flag("--no-review", rn_no_review, "Disable the review stage");
  rn->add_flag("--serial", rn_serial, "Disable OpenMP");
  rn->callback([&] {
    action = [&] {
      auto config = PipelineConfig::load(rn_config);
      if (!rn_out.empty()) config.output_dir = fs::absolute(rn_out);
      if (!rn_policy.empty()) config.policy.action = parse_correction_action(rn_policy);
      if (!rn_precedence.empty()) config.policy.kb_precedence = split_list(rn_precedence);
      if (!rn_fixtures.empty()) config.kb.fixtures = fs::absolute(rn_fixtures);
      if (rn->count("--min-coverage")) config.projection.config.min_coverage = rn_coverage;
      if (!rn_collision.empty()) config.projection.config.on_collision = parse_collision_policy(rn_collision);
      if (!rn_level.empty()) config.score.level = MatchLevel::parse(rn_level);
      if (!rn_verdicts.empty()) config.review.verdicts = fs::absolute(rn_verdicts);
      if (!rn_sampling.empty()) config.review.sampling = Sampling::parse(rn_sampling);
      if (rn_quorum) config.review.quorum = rn_quorum;
      if (rn_review) config.review.enabled = true;
      if (rn_no_review) config.review.enabled = false;
      if (rn_offline) config.kb.offline = true;
      if (rn_online) config.kb.offline = false;
      if (rn_no_proj) config.projection.enabled = false;
      if (rn_serial) config.exec = Execution::serial;
      const auto result = run_pipeline(config, &std::cerr);
      if (result.source_score) std::cout << "source\n" << result.source_score->table();
      if (result.target_score) std::cout << "target\n" << result.target_score->table();
      std::cout << "outputs in " << config.output_dir.string() << "\n";
      return 0;
    };
  });

  // synth
  auto* sy = app.add_subcommand("synth", "Generate a synthetic bilingual workspace with a pipeline config");
  std::string sy_out, sy_data = data_dir().string();
  std::size_t sy_sentences = 10000;
  std::uint64_t sy_seed = 2019;
  sy->add_option("--out", sy_out, "Workspace directory")->required();
  sy->add_option("--sentences", sy_sentences, "Number of sentence pairs")->capture_default_str();
  sy->add_option("--seed", sy_seed, "Random seed")->capture_default_str();
  sy->add_option("--data-dir", sy_data, "Directory holding taxonomy/ and mappings/")->capture_default_str();
  sy->callback([&] {
    action = [&] {
      const auto corpus = make_synthetic({sy_sentences, sy_seed});
      const auto config = write_synthetic_workspace(corpus, sy_out, sy_data);
      std::cout << config.string() << "\n";
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    return action();
  } catch (const Error& e) {
    std::cerr << "uner: " << e.what() << "\n";
    return is_config_error(e.kind()) ? kConfigError : kDataError;
  } catch (const CLI::Error& e) {
    std::cerr << "uner: " << e.what() << "\n";
    return kConfigError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "uner: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "uner: " << e.what() << "\n";
    return kDataError;
  }
}
