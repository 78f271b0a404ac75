#pragma once

// All verdict multisets of size <= 3 over {accept, reject, relabel A,
// relabel B}, applied at quorums 1-3 and compared with the majority oracle.

#include <algorithm>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "uner/codecs.hpp"
#include "uner/review.hpp"

namespace review_check {

inline const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> v{"accept", "reject", "relabel:Name.Location.City", "relabel:Numex.Money"};
  return v;
}

inline std::vector<std::vector<std::string>> multisets(std::size_t max_size) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> cur;
  const auto rec = [&](auto&& self, std::size_t from) -> void {
    out.push_back(cur);
    if (cur.size() == max_size) return;
    for (std::size_t k = from; k < vocabulary().size(); ++k) {
      cur.push_back(vocabulary()[k]);
      self(self, k);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

inline uner::Verdict verdict(const std::string& task, const std::string& annotator, const std::string& vote) {
  uner::Verdict v{task, annotator, uner::VerdictAction::accept, std::nullopt, "2026-01-01T00:00:00Z"};
  if (vote == "reject") v.action = uner::VerdictAction::reject;
  if (vote.rfind("relabel:", 0) == 0) {
    v.action = uner::VerdictAction::relabel;
    v.label = vote.substr(8);
  }
  return v;
}

struct Result {
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;
  bool idempotent = true;
  bool valid = true;
};

/// One document with one span per multiset; every multiset is voted on by
/// distinct annotators, in every order when `orders` is set.
inline Result run(const uner::Taxonomy& taxonomy, bool orders = true) {
  const auto sets = multisets(3);
  Result result;
  std::vector<std::string> words;
  for (std::size_t i = 0; i < sets.size(); ++i) words.push_back("w" + std::to_string(i));
  auto doc = uner::make_document("rv", "en", words);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    doc.spans.push_back({uner::span_id(i, i + 1), i, i + 1, "Name.Location", "model", std::nullopt});
  }
  const uner::Corpus corpus{doc};

  for (std::size_t quorum = 1; quorum <= 3; ++quorum) {
    // every permutation of each multiset, so vote order cannot matter
    std::size_t variants = 1;
    std::vector<std::vector<std::vector<std::string>>> orderings(sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i) {
      auto votes = sets[i];
      std::sort(votes.begin(), votes.end());
      do orderings[i].push_back(votes);
      while (orders && std::next_permutation(votes.begin(), votes.end()));
      variants = std::max(variants, orderings[i].size());
    }
    for (std::size_t variant = 0; variant < variants; ++variant) {
      std::vector<uner::Verdict> log;
      for (std::size_t i = 0; i < sets.size(); ++i) {
        const auto& votes = orderings[i][variant % orderings[i].size()];
        const auto task = uner::make_task_id("rv", uner::span_id(i, i + 1));
        for (std::size_t a = 0; a < votes.size(); ++a) log.push_back(verdict(task, "ann" + std::to_string(a), votes[a]));
      }
      const auto out = uner::apply_verdicts(corpus, log, quorum);
      const auto& spans = out.corpus[0].spans;
      std::size_t unanimous = 0, decided = 0;
      for (std::size_t i = 0; i < sets.size(); ++i) {
        const auto task = uner::make_task_id("rv", uner::span_id(i, i + 1));
        const auto [outcome, label] = oracle::adjudicate(sets[i], quorum);
        const auto it = std::find_if(spans.begin(), spans.end(), [&](const auto& s) { return s.token_start == i; });
        const bool flagged = std::count(out.report.flagged.begin(), out.report.flagged.end(), task) > 0;
        const bool unmet = std::count(out.report.quorum_unmet.begin(), out.report.quorum_unmet.end(), task) > 0;
        bool ok = false;
        switch (outcome) {
          case oracle::Outcome::keep:
            ok = it != spans.end() && it->label == "Name.Location" && it->source == "model" && !flagged;
            break;
          case oracle::Outcome::remove:
            ok = it == spans.end();
            break;
          case oracle::Outcome::relabel:
            ok = it != spans.end() && it->label == label && it->source == "human";
            break;
          case oracle::Outcome::tie:
            ok = it != spans.end() && it->label == "Name.Location" && it->source == "model" && flagged;
            break;
          case oracle::Outcome::unmet:
            ok = it != spans.end() && it->label == "Name.Location" && !flagged && unmet == !sets[i].empty();
            break;
        }
        if (outcome != oracle::Outcome::unmet) {
          ++decided;
          unanimous += std::all_of(sets[i].begin(), sets[i].end(), [&](const auto& v) { return v == sets[i][0]; });
        }
        ++result.cases;
        if (!ok && result.failures++ == 0) {
          result.first_failure = "quorum " + std::to_string(quorum) + " votes";
          for (const auto& v : sets[i]) result.first_failure += " " + v;
        }
      }
      if (out.report.tasks_decided != decided || out.report.unanimous != unanimous) {
        if (result.failures++ == 0) result.first_failure = "agreement counts at quorum " + std::to_string(quorum);
      }
      const auto again = uner::apply_verdicts(out.corpus, log, quorum);
      result.idempotent = result.idempotent && again.corpus == out.corpus;
      result.valid = result.valid && uner::validate(out.corpus, taxonomy).empty();
    }
  }
  return result;
}

}  // namespace review_check
