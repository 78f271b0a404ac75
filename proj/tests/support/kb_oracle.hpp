#pragma once

// Enumerates the correction policy table: every current label, every record
// drawn from a small class vocabulary, every action and every precedence
// order, compared against a direct restatement of the rules.

#include <algorithm>
#include <array>
#include <map>
#include <string>
#include <vector>

#include "uner/kb_linker.hpp"

namespace kb_oracle {

struct Vocab {
  std::string kb;
  std::vector<std::pair<std::string, std::string>> classes;  // iri -> path ("" for unmapped)
};

inline const std::vector<Vocab>& vocab() {
  static const std::vector<Vocab> v{
      {"wikidata", {{"w:A", "Name"}, {"w:B", "Name.Location"}, {"w:C", "Name.Location.City"}, {"w:D", "Name.Organization"}, {"w:X", ""}}},
      {"dbpedia", {{"d:A", "Name.Location.Country"}, {"d:B", "Name.Person.Name"}, {"d:C", "Numex"}, {"d:X", ""}}},
      {"yago", {{"y:A", "Name.Location.City"}, {"y:B", "Timex TOP"}, {"y:X", ""}}},
  };
  return v;
}

inline const std::vector<std::string>& current_labels() {
  static const std::vector<std::string> l{"Name",           "Name.Location",    "Name.Location.City",
                                          "Name.Location.Country", "Name.Organization", "Name.Person.Name",
                                          "Numex",          "Timex TOP.Timex.Date"};
  return l;
}

inline uner::KbClassMappings mappings(const uner::Taxonomy& tax) {
  uner::KbClassMappings m;
  for (const auto& v : vocab()) {
    for (const auto& [iri, path] : v.classes) {
      if (!path.empty()) m.add(v.kb, iri, tax.resolve(path));
    }
  }
  return m;
}

struct Expected {
  std::string label;
  std::string source;
  std::string kb;
  std::string proposed;
  std::string reason;
};

inline std::size_t depth(const std::string& p) { return static_cast<std::size_t>(std::count(p.begin(), p.end(), '.')) + 1; }

inline Expected expect(const std::string& label, const std::string& source, const std::map<std::string, std::vector<std::string>>& record,
                       const std::vector<std::string>& precedence, uner::CorrectionAction action) {
  Expected e{label, source, "", "", "no-evidence"};
  for (const auto& kb : precedence) {
    auto it = record.find(kb);
    if (it == record.end()) continue;
    std::vector<std::string> mapped;
    for (const auto& v : vocab()) {
      if (v.kb != kb) continue;
      for (const auto& iri : it->second) {
        for (const auto& [viri, path] : v.classes) {
          if (viri == iri && !path.empty()) mapped.push_back(path);
        }
      }
    }
    if (mapped.empty()) continue;
    std::sort(mapped.begin(), mapped.end(), [](const std::string& a, const std::string& b) {
      return depth(a) != depth(b) ? depth(a) > depth(b) : a < b;
    });
    e.kb = kb;
    e.proposed = mapped.front();
    break;
  }
  if (e.kb.empty()) return e;
  const bool below = e.proposed.size() > label.size() && e.proposed.compare(0, label.size() + 1, label + ".") == 0;
  if (e.proposed == label) {
    e.reason = "identity";
    if (action == uner::CorrectionAction::replace) e.source = "kb:" + e.kb;
  } else if (action == uner::CorrectionAction::replace) {
    e.reason = "replaced";
    e.label = e.proposed;
    e.source = "kb:" + e.kb;
  } else if (action == uner::CorrectionAction::annotate_only) {
    e.reason = "annotated";
  } else if (below) {
    e.reason = "refined";
    e.label = e.proposed;
    e.source = "kb:" + e.kb;
  } else {
    e.reason = "conflict-suppressed";
  }
  return e;
}

struct Result {
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;
};

/// Every subset of at most two classes from each kb's vocabulary.
inline std::vector<std::vector<std::string>> small_subsets(const Vocab& v) {
  std::vector<std::vector<std::string>> out{{}};
  for (std::size_t i = 0; i < v.classes.size(); ++i) {
    out.push_back({v.classes[i].first});
    for (std::size_t j = i + 1; j < v.classes.size(); ++j) out.push_back({v.classes[i].first, v.classes[j].first});
  }
  return out;
}

inline Result run(const uner::Taxonomy& tax) {
  const auto m = mappings(tax);
  Result result;
  std::array<std::vector<std::vector<std::string>>, 3> subsets;
  for (std::size_t k = 0; k < 3; ++k) subsets[k] = small_subsets(vocab()[k]);

  std::vector<std::string> order{"dbpedia", "wikidata", "yago"};
  std::vector<std::vector<std::string>> precedences;
  do precedences.push_back(order);
  while (std::next_permutation(order.begin(), order.end()));

  for (const auto& s0 : subsets[0]) {
    for (const auto& s1 : subsets[1]) {
      for (const auto& s2 : subsets[2]) {
        uner::KbRecord record;
        record.surface = "x";
        // an empty list is still present for the kb, the way lookup stores it
        record.classes = {{"wikidata", s0}, {"dbpedia", s1}, {"yago", s2}};
        for (const auto& label : current_labels()) {
          const uner::EntitySpan span{"t1-3", 1, 3, label, "model-a", 0.25};
          for (const auto& precedence : precedences) {
            for (auto action : {uner::CorrectionAction::refine_only, uner::CorrectionAction::replace,
                                uner::CorrectionAction::annotate_only}) {
              const uner::CorrectionPolicy policy{precedence, action};
              const auto got = uner::correct_span(span, record, m, policy);
              const auto want = expect(label, span.source, record.classes, precedence, action);
              const bool ok = got.span.label == want.label && got.span.source == want.source &&
                              got.trace.reason == want.reason && got.trace.kb_id == want.kb &&
                              got.trace.new_label == want.proposed && got.trace.old_label == label &&
                              got.span.token_start == 1 && got.span.token_end == 3 && got.span.id == "t1-3" &&
                              got.span.confidence == span.confidence;
              ++result.cases;
              if (!ok && result.failures++ == 0) {
                result.first_failure = label + " / " + std::string(uner::to_string(action)) + " / " + precedence[0] +
                                       ": got " + got.span.label + " " + got.trace.reason + ", want " + want.label +
                                       " " + want.reason;
              }
            }
          }
        }
      }
    }
  }
  return result;
}

}  // namespace kb_oracle
