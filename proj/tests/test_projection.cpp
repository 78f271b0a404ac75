#include <sstream>

#include "doctest.h"
#include "support/paths.hpp"
#include "support/projection_check.hpp"
#include "uner/codecs.hpp"
#include "uner/error.hpp"
#include "uner/projection.hpp"

using namespace uner;

namespace {

const Taxonomy& tax() {
  static const Taxonomy t = Taxonomy::load(testenv::taxonomy_file());
  return t;
}

AlignedSentencePair pair_of(std::size_t ns, std::size_t nt, std::vector<AlignmentLink> links,
                            std::vector<std::pair<std::size_t, std::size_t>> spans) {
  AlignedSentencePair p{"p", projection_check::words_doc("p", ns, "s"), projection_check::words_doc("p", nt, "t"),
                        std::move(links)};
  for (auto [s, e] : spans) p.source.spans.push_back({span_id(s, e), s, e, "Name.Location", "m", 0.5});
  return p;
}

std::pair<std::size_t, std::size_t> range(const ProjectionOutcome& o) {
  REQUIRE(o.span);
  return {o.span->token_start, o.span->token_end};
}

}  // namespace

TEST_SUITE("projection") {

TEST_CASE("project_span examples") {
  const ProjectionConfig c;
  auto p = pair_of(2, 2, {{0, 0}, {1, 1}}, {{0, 2}});
  auto o = project_span(p.source.spans[0], p, c);
  CHECK(range(o) == std::pair<std::size_t, std::size_t>{0, 2});
  CHECK(o.span->label == "Name.Location");
  CHECK(o.span->source == "proj:m");
  CHECK(o.span->confidence == 0.5);
  CHECK(o.reason == "projected");

  p = pair_of(2, 2, {}, {{0, 2}});
  o = project_span(p.source.spans[0], p, c);
  CHECK_FALSE(o.span);
  CHECK(o.reason == "unaligned");

  p = pair_of(2, 3, {{0, 2}}, {{0, 2}});
  o = project_span(p.source.spans[0], p, c);
  CHECK(o.coverage == 0.5);
  CHECK(range(o) == std::pair<std::size_t, std::size_t>{2, 3});
  o = project_span(p.source.spans[0], p, {0.51, CollisionPolicy::drop});
  CHECK(o.reason == "low-coverage");

  p = pair_of(2, 2, {{0, 1}, {1, 0}}, {{0, 2}});
  CHECK(range(project_span(p.source.spans[0], p, c)) == std::pair<std::size_t, std::size_t>{0, 2});

  p = pair_of(1, 4, {{0, 0}, {0, 3}}, {{0, 1}});
  o = project_span(p.source.spans[0], p, c);
  CHECK(range(o) == std::pair<std::size_t, std::size_t>{0, 4});
  CHECK(o.hull_gapped);
}

TEST_CASE("project_document collisions") {
  auto p = pair_of(4, 4, {{0, 0}, {1, 1}, {2, 2}, {3, 3}}, {{0, 2}, {2, 4}});
  auto d = project_document(p, {});
  CHECK(d.target.spans.size() == 2);

  // both spans map onto target [1,3)
  p = pair_of(4, 4, {{0, 1}, {1, 2}, {2, 1}, {3, 2}}, {{0, 2}, {2, 4}});
  d = project_document(p, {});
  REQUIRE(d.target.spans.size() == 1);
  CHECK(d.outcomes[0].reason == "projected");
  CHECK(d.outcomes[1].reason == "collision");

  // keep-first refits the later span onto its still-free aligned tokens
  p = pair_of(4, 5, {{0, 0}, {1, 1}, {2, 1}, {3, 3}}, {{0, 2}, {2, 4}});
  d = project_document(p, {0.5, CollisionPolicy::drop});
  CHECK(d.outcomes[1].reason == "collision");
  d = project_document(p, {0.5, CollisionPolicy::keep_first});
  CHECK(d.outcomes[1].reason == "refit");
  CHECK(range(d.outcomes[1]) == std::pair<std::size_t, std::size_t>{3, 4});
  CHECK(validate(d.target, tax()).empty());

  p = pair_of(3, 3, {{0, 0}}, {});
  d = project_document(p, {});
  CHECK(d.target.spans.empty());
  CHECK(d.outcomes.empty());
}

TEST_CASE("spans below the threshold still claim their hull") {
  // span [0,4) has one aligned token over the whole target, the two later spans
  // sit inside that hull; coverage of the first is 0.25
  auto p = pair_of(6, 4, {{0, 0}, {0, 3}, {4, 1}, {5, 2}}, {{0, 4}, {4, 5}, {5, 6}});
  auto low = project_document(p, {0.2, CollisionPolicy::drop});
  CHECK(low.target.spans.size() == 1);
  auto high = project_document(p, {0.5, CollisionPolicy::drop});
  CHECK(high.target.spans.empty());
  CHECK(high.outcomes[0].reason == "low-coverage");
  CHECK(high.outcomes[1].reason == "collision");
}

TEST_CASE("errors") {
  auto p = pair_of(2, 2, {{0, 5}}, {{0, 1}});
  CHECK_THROWS_AS(project_document(p, {}), Error);
  try {
    project_span(p.source.spans[0], p, {});
    FAIL("expected IndexOutOfRange");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IndexOutOfRange);
  }
  p = pair_of(2, 2, {{0, 0}}, {{0, 1}});
  p.target.spans.push_back({"t0-1", 0, 1, "Name", "", {}});
  try {
    project_document(p, {});
    FAIL("expected TargetAlreadyAnnotated");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TargetAlreadyAnnotated);
  }
  std::vector<AlignedSentencePair> dup{pair_of(1, 1, {}, {}), pair_of(1, 1, {}, {})};
  try {
    project_corpus(dup, {});
    FAIL("expected DuplicatePairId");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DuplicatePairId);
  }
  CHECK_THROWS_AS(project_span(pair_of(1, 1, {}, {{0, 1}}).source.spans[0], pair_of(1, 1, {}, {{0, 1}}), {1.5, CollisionPolicy::drop}),
                  Error);
  CHECK(parse_collision_policy("keep-first") == CollisionPolicy::keep_first);
  CHECK_THROWS_AS(parse_collision_policy("merge"), Error);
}

TEST_CASE("identity alignment is a fixpoint") {
  const auto pairs = projection_check::identity_pairs(100, 1);
  const auto out = project_corpus(pairs, {});
  CHECK(out.report.rate() == 1.0);
  CHECK(out.report.projected_spans == out.report.source_spans);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    REQUIRE(out.targets[k].spans.size() == pairs[k].source.spans.size());
    for (std::size_t s = 0; s < pairs[k].source.spans.size(); ++s) {
      CHECK(out.targets[k].spans[s].token_start == pairs[k].source.spans[s].token_start);
      CHECK(out.targets[k].spans[s].token_end == pairs[k].source.spans[s].token_end);
      CHECK(out.targets[k].spans[s].label == pairs[k].source.spans[s].label);
    }
  }
}

TEST_CASE("deleting 30% of links matches the oracle rate") {
  auto pairs = projection_check::identity_pairs(100, 2);
  std::mt19937_64 rng(30);
  std::size_t oracle_projected = 0, oracle_total = 0;
  for (auto& p : pairs) {
    std::vector<AlignmentLink> kept;
    for (const auto& l : p.links) {
      if (!gen::chance(rng, 0.3)) kept.push_back(l);
    }
    p.links = kept;
    for (const auto& o : projection_check::expected(p, {})) {
      ++oracle_total;
      oracle_projected += o.span.has_value();
    }
  }
  const auto out = project_corpus(pairs, {}, Execution::serial);
  CHECK(out.report.rate() > 0.0);
  CHECK(out.report.rate() < 1.0);
  CHECK(out.report.source_spans == oracle_total);
  CHECK(out.report.projected_spans == oracle_projected);
  const auto parallel = project_corpus(pairs, {}, Execution::parallel);
  CHECK(parallel.targets == out.targets);
  CHECK(parallel.report.to_json() == out.report.to_json());
}

TEST_CASE("random pairs agree with the oracle and are threshold-monotone") {
  const auto r = projection_check::random_agreement(250, 9);
  CHECK(r.failures == 0);
  CHECK(r.first_failure == "");
  CHECK(r.monotonicity_failures == 0);
}

TEST_CASE("empty pair list") {
  const auto out = project_corpus({}, {});
  CHECK(out.targets.empty());
  CHECK(out.report.source_spans == 0);
  CHECK(out.report.by_reason.empty());
  CHECK(out.report.rate() == 1.0);
}

TEST_CASE("report and determinism") {
  std::vector<AlignedSentencePair> pairs{pair_of(2, 2, {{0, 0}, {1, 1}}, {{0, 1}, {1, 2}}), pair_of(2, 2, {}, {{0, 2}})};
  pairs[1].pair_id = "q";
  const auto a = project_corpus(pairs, {});
  const auto b = project_corpus(pairs, {});
  CHECK(a.report.to_json().dump() == b.report.to_json().dump());
  CHECK(a.report.by_reason.at("projected") == 2);
  CHECK(a.report.by_reason.at("unaligned") == 1);
  CHECK(a.report.per_label.at("Name.Location").source == 3);
  CHECK(a.report.to_json()["config"]["min_coverage"] == 0.5);
}

TEST_CASE("alignment files and positional pairing") {
  std::istringstream in("p1\t0-0 1-2 2-1\np2\t\np3\n");
  const auto recs = read_alignments(in);
  REQUIRE(recs.size() == 3);
  CHECK(recs[0].links == std::vector<AlignmentLink>{{0, 0}, {1, 2}, {2, 1}});
  CHECK(recs[1].links.empty());
  CHECK(format_alignment(recs[0]) == "p1\t0-0 1-2 2-1");
  std::istringstream bad("p1\t0-0 x-1\n");
  try {
    read_alignments(bad);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.line() == 1);
  }
  Corpus src{projection_check::words_doc("a", 2, "s")}, tgt{projection_check::words_doc("b", 2, "t")};
  const auto pairs = make_pairs(src, tgt, {{"a", {{0, 1}}}});
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].links.size() == 1);
  CHECK_THROWS_AS(make_pairs(src, tgt, {}), Error);
}

}  // TEST_SUITE
