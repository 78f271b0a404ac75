#include "uner/review.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>

#include "uner/codecs.hpp"
#include "uner/digest.hpp"
#include "uner/error.hpp"

namespace uner {

nlohmann::ordered_json ReviewTask::to_json() const {
  nlohmann::ordered_json j;
  j["task_id"] = task_id;
  j["doc_id"] = doc_id;
  j["span_id"] = span_id;
  j["context"] = context;
  j["char_start"] = char_start;
  j["char_end"] = char_end;
  j["proposed_label"] = proposed_label;
  j["candidate_labels"] = candidate_labels;
  j["status"] = status;
  return j;
}

ReviewTask ReviewTask::from_json(const nlohmann::json& j) {
  try {
    ReviewTask t;
    t.task_id = j.at("task_id").get<std::string>();
    t.doc_id = j.at("doc_id").get<std::string>();
    t.span_id = j.at("span_id").get<std::string>();
    t.context = j.at("context").get<std::string>();
    t.char_start = j.at("char_start").get<std::size_t>();
    t.char_end = j.at("char_end").get<std::size_t>();
    t.proposed_label = j.at("proposed_label").get<std::string>();
    t.candidate_labels = j.value("candidate_labels", std::vector<std::string>{});
    t.status = j.value("status", std::string("open"));
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaViolation, std::string("bad task record: ") + e.what());
  }
}

std::string make_task_id(std::string_view doc_id, std::string_view span_id) {
  return std::string(doc_id) + "#" + std::string(span_id);
}

std::optional<std::pair<std::string, std::string>> split_task_id(std::string_view task_id) {
  const auto hash = task_id.rfind('#');
  if (hash == std::string_view::npos) return std::nullopt;
  return std::pair{std::string(task_id.substr(0, hash)), std::string(task_id.substr(hash + 1))};
}

Sampling Sampling::parse(std::string_view text) {
  Sampling s;
  if (text == "all") return s;
  const auto bad = [&] {
    return Error(ErrorKind::Config, "sampling must be all, quota:<n> or random:<fraction>:<seed>, got \"" +
                                        std::string(text) + "\"");
  };
  if (text.rfind("quota:", 0) == 0) {
    const auto num = text.substr(6);
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), s.quota);
    if (ec != std::errc() || ptr != num.data() + num.size()) throw bad();
    s.kind = Kind::per_label_quota;
    return s;
  }
  if (text.rfind("random:", 0) == 0) {
    const auto rest = text.substr(7);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) throw bad();
    const auto frac = rest.substr(0, colon);
    const auto seed = rest.substr(colon + 1);
    const auto a = std::from_chars(frac.data(), frac.data() + frac.size(), s.fraction);
    const auto b = std::from_chars(seed.data(), seed.data() + seed.size(), s.seed);
    if (a.ec != std::errc() || a.ptr != frac.data() + frac.size() || b.ec != std::errc() ||
        b.ptr != seed.data() + seed.size() || s.fraction < 0.0 || s.fraction > 1.0) {
      throw bad();
    }
    s.kind = Kind::random;
    return s;
  }
  throw bad();
}

std::string Sampling::str() const {
  switch (kind) {
    case Kind::all: return "all";
    case Kind::per_label_quota: return "quota:" + std::to_string(quota);
    case Kind::random: {
      std::ostringstream out;
      out << "random:" << fraction << ":" << seed;
      return out.str();
    }
  }
  return "?";
}

std::vector<ReviewTask> generate_tasks(const Corpus& corpus, const Sampling& sampling, const Taxonomy* taxonomy) {
  struct Ref {
    std::size_t doc;
    std::size_t span;
  };
  std::vector<Ref> refs;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    for (std::size_t k = 0; k < corpus[d].spans.size(); ++k) refs.push_back({d, k});
  }

  std::vector<bool> keep(refs.size(), sampling.kind == Sampling::Kind::all);
  if (sampling.kind == Sampling::Kind::per_label_quota) {
    std::map<std::string, std::size_t> taken;
    for (std::size_t r = 0; r < refs.size(); ++r) {
      auto& n = taken[corpus[refs[r].doc].spans[refs[r].span].label];
      if (n < sampling.quota) {
        ++n;
        keep[r] = true;
      }
    }
  } else if (sampling.kind == Sampling::Kind::random) {
    std::mt19937_64 rng(sampling.seed);
    std::vector<std::pair<std::uint64_t, std::size_t>> keys(refs.size());
    for (std::size_t r = 0; r < refs.size(); ++r) keys[r] = {rng(), r};
    std::sort(keys.begin(), keys.end());
    const auto k = static_cast<std::size_t>(std::llround(sampling.fraction * static_cast<double>(refs.size())));
    for (std::size_t r = 0; r < k && r < keys.size(); ++r) keep[keys[r].second] = true;
  }

  std::vector<ReviewTask> tasks;
  for (std::size_t r = 0; r < refs.size(); ++r) {
    if (!keep[r]) continue;
    const auto& doc = corpus[refs[r].doc];
    const auto& span = doc.spans[refs[r].span];
    ReviewTask t;
    t.task_id = make_task_id(doc.doc_id, span.id);
    t.doc_id = doc.doc_id;
    t.span_id = span.id;
    t.context = doc.text;
    t.char_start = doc.char_start(span);
    t.char_end = doc.char_end(span);
    t.proposed_label = span.label;
    if (taxonomy && taxonomy->contains(span.label)) {
      t.candidate_labels = taxonomy->neighbourhood(TagPath::parse(span.label));
    }
    tasks.push_back(std::move(t));
  }
  return tasks;
}

std::vector<ReviewTask> read_tasks(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::Io, "cannot open tasks " + file.string());
  std::vector<ReviewTask> tasks;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      tasks.push_back(ReviewTask::from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::SchemaViolation, e.what()).with_line(line_no);
    } catch (const Error& e) {
      throw e.with_line(line_no);
    }
    if (!ids.insert(tasks.back().task_id).second) {
      throw Error(ErrorKind::SchemaViolation, "task id " + tasks.back().task_id + " repeats").with_line(line_no);
    }
  }
  return tasks;
}

void write_tasks(const std::filesystem::path& file, std::span<const ReviewTask> tasks) {
  std::string out;
  for (const auto& t : tasks) out += t.to_json().dump() + "\n";
  write_text_atomic(file, out);
}

std::string_view to_string(VerdictAction action) {
  switch (action) {
    case VerdictAction::accept: return "accept";
    case VerdictAction::reject: return "reject";
    case VerdictAction::relabel: return "relabel";
  }
  return "?";
}

nlohmann::ordered_json Verdict::to_json() const {
  nlohmann::ordered_json j;
  j["task_id"] = task_id;
  j["annotator_id"] = annotator_id;
  j["action"] = to_string(action);
  j["label"] = label ? nlohmann::ordered_json(*label) : nlohmann::ordered_json(nullptr);
  j["ts"] = ts;
  return j;
}

Verdict Verdict::from_json(const nlohmann::json& j, const Taxonomy* taxonomy) {
  const auto bad = [](const std::string& why) { return Error(ErrorKind::InvalidVerdict, why); };
  if (!j.is_object()) throw bad("verdict must be an object");
  const auto str = [&](const char* key) -> std::string {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string() || it->get<std::string>().empty()) {
      throw bad(std::string("\"") + key + "\" must be a non-empty string");
    }
    return it->get<std::string>();
  };
  Verdict v;
  v.task_id = str("task_id");
  v.annotator_id = str("annotator_id");
  const auto action = str("action");
  if (action == "accept") v.action = VerdictAction::accept;
  else if (action == "reject") v.action = VerdictAction::reject;
  else if (action == "relabel") v.action = VerdictAction::relabel;
  else throw bad("unknown action \"" + action + "\"");

  auto label = j.find("label");
  const bool has_label = label != j.end() && !label->is_null();
  if (v.action == VerdictAction::relabel) {
    if (!has_label || !label->is_string()) throw bad("relabel needs a string \"label\"");
    v.label = label->get<std::string>();
    if (taxonomy && !taxonomy->contains(*v.label)) throw bad("label \"" + *v.label + "\" is not in the taxonomy");
    if (!taxonomy) TagPath::parse(*v.label);
  } else if (has_label) {
    throw bad("only relabel verdicts carry a label");
  }
  if (auto ts = j.find("ts"); ts != j.end() && !ts->is_null()) {
    if (!ts->is_string()) throw bad("\"ts\" must be a string");
    v.ts = ts->get<std::string>();
  }
  return v;
}

namespace {

std::string judged_key(const std::string& task_id, const std::string& annotator_id) {
  return task_id + '\x1f' + annotator_id;
}

}  // namespace

std::vector<Verdict> VerdictLog::read(const std::filesystem::path& file) {
  std::vector<Verdict> out;
  std::ifstream in(file);
  if (!in) return out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(Verdict::from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::InvalidVerdict, file.string() + ": " + e.what()).with_line(line_no);
    } catch (const Error& e) {
      throw e.with_line(line_no);
    }
  }
  return out;
}

VerdictLog::VerdictLog(std::filesystem::path file) : file_(std::move(file)) {
  for (auto& v : read(file_)) {
    if (judged_.insert(judged_key(v.task_id, v.annotator_id)).second) {
      ++per_task_[v.task_id];
      verdicts_.push_back(std::move(v));
    }
  }
  if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());
  out_.open(file_, std::ios::app | std::ios::binary);
  if (!out_) throw Error(ErrorKind::Io, "cannot open verdict log " + file_.string());
}

VerdictLog::AppendResult VerdictLog::append(const Verdict& verdict) {
  std::lock_guard writer(writer_);
  if (has_judged(verdict.task_id, verdict.annotator_id)) return AppendResult::duplicate;
  out_ << verdict.to_json().dump() << '\n';
  out_.flush();
  if (!out_) throw Error(ErrorKind::Io, "write to verdict log " + file_.string() + " failed");
  std::unique_lock index(index_mutex_);
  judged_.insert(judged_key(verdict.task_id, verdict.annotator_id));
  ++per_task_[verdict.task_id];
  verdicts_.push_back(verdict);
  return AppendResult::appended;
}

std::vector<Verdict> VerdictLog::snapshot() const {
  std::shared_lock lock(index_mutex_);
  return verdicts_;
}

std::size_t VerdictLog::size() const {
  std::shared_lock lock(index_mutex_);
  return verdicts_.size();
}

bool VerdictLog::has_judged(const std::string& task_id, const std::string& annotator_id) const {
  std::shared_lock lock(index_mutex_);
  return judged_.count(judged_key(task_id, annotator_id)) > 0;
}

std::size_t VerdictLog::count_for(const std::string& task_id) const {
  std::shared_lock lock(index_mutex_);
  auto it = per_task_.find(task_id);
  return it == per_task_.end() ? 0 : it->second;
}

Decision decide(std::span<const Verdict> verdicts, std::size_t quorum) {
  Decision d;
  if (verdicts.empty() || verdicts.size() < quorum) return d;
  std::map<std::string, std::size_t> votes;
  for (const auto& v : verdicts) {
    ++votes[std::string(to_string(v.action)) + (v.label ? "\x1f" + *v.label : std::string())];
  }
  d.unanimous = votes.size() == 1;
  const auto winner = std::max_element(votes.begin(), votes.end(),
                                       [](const auto& a, const auto& b) { return a.second < b.second; });
  if (2 * winner->second <= verdicts.size()) {
    d.kind = Decision::Kind::tie;
    return d;
  }
  const auto& key = winner->first;
  if (key == "accept") {
    d.kind = Decision::Kind::keep;
  } else if (key == "reject") {
    d.kind = Decision::Kind::remove;
  } else {
    d.kind = Decision::Kind::relabel;
    d.label = key.substr(key.find('\x1f') + 1);
  }
  return d;
}

double AgreementReport::agreement() const {
  return tasks_decided ? static_cast<double>(unanimous) / static_cast<double>(tasks_decided) : 0.0;
}

nlohmann::ordered_json AgreementReport::to_json() const {
  nlohmann::ordered_json j;
  j["tasks_with_verdicts"] = tasks_with_verdicts;
  j["tasks_decided"] = tasks_decided;
  j["unanimous"] = unanimous;
  j["agreement"] = agreement();
  j["accepted"] = accepted;
  j["rejected"] = rejected;
  j["relabeled"] = relabeled;
  j["stale"] = stale;
  j["flagged"] = flagged;
  j["quorum_unmet"] = quorum_unmet;
  j["accept_rate_by_label"] = nlohmann::ordered_json::object();
  for (const auto& [label, counts] : accept_by_label) {
    j["accept_rate_by_label"][label] = {
        {"accepted", counts.first},
        {"decided", counts.second},
        {"rate", counts.second ? static_cast<double>(counts.first) / static_cast<double>(counts.second) : 0.0}};
  }
  return j;
}

Adjudicated apply_verdicts(const Corpus& corpus, std::span<const Verdict> verdicts, std::size_t quorum) {
  if (quorum < 1) throw Error(ErrorKind::Config, "quorum must be at least 1");

  // First verdict per (task, annotator), grouped by task in first-seen order.
  std::vector<std::string> task_order;
  std::map<std::string, std::vector<Verdict>> by_task;
  std::unordered_set<std::string> seen;
  for (const auto& v : verdicts) {
    if (!seen.insert(judged_key(v.task_id, v.annotator_id)).second) continue;
    auto [it, inserted] = by_task.try_emplace(v.task_id);
    if (inserted) task_order.push_back(v.task_id);
    it->second.push_back(v);
  }

  Adjudicated out{corpus, {}};
  std::unordered_map<std::string, std::size_t> doc_index;
  for (std::size_t d = 0; d < out.corpus.size(); ++d) doc_index.emplace(out.corpus[d].doc_id, d);

  auto& report = out.report;
  std::map<std::size_t, std::set<std::string>> removals;  // doc -> span ids
  for (const auto& task_id : task_order) {
    const auto& votes = by_task[task_id];
    ++report.tasks_with_verdicts;
    const auto decision = decide(votes, quorum);
    if (decision.kind == Decision::Kind::quorum_unmet) {
      report.quorum_unmet.push_back(task_id);
      continue;
    }
    ++report.tasks_decided;
    if (decision.unanimous) ++report.unanimous;

    EntitySpan* span = nullptr;
    std::size_t doc = 0;
    if (const auto parts = split_task_id(task_id)) {
      if (auto it = doc_index.find(parts->first); it != doc_index.end()) {
        doc = it->second;
        for (auto& s : out.corpus[doc].spans) {
          if (s.id == parts->second) span = &s;
        }
      }
    }
    if (!span) {
      ++report.stale;
      continue;
    }
    auto& rate = report.accept_by_label[span->label];
    ++rate.second;
    switch (decision.kind) {
      case Decision::Kind::keep:
        ++report.accepted;
        ++rate.first;
        break;
      case Decision::Kind::remove:
        ++report.rejected;
        removals[doc].insert(span->id);
        break;
      case Decision::Kind::relabel:
        ++report.relabeled;
        span->label = *decision.label;
        span->source = "human";
        break;
      case Decision::Kind::tie:
        report.flagged.push_back(task_id);
        break;
      case Decision::Kind::quorum_unmet:
        break;
    }
  }
  for (const auto& [doc, ids] : removals) {
    auto& spans = out.corpus[doc].spans;
    spans.erase(std::remove_if(spans.begin(), spans.end(), [&](const EntitySpan& s) { return ids.count(s.id) > 0; }),
                spans.end());
  }
  return out;
}

}  // namespace uner
