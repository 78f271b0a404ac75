#include <atomic>
#include <memory>
#include <fstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "support/paths.hpp"
#include "uner/codecs.hpp"
#include "uner/error.hpp"
#include "uner/review.hpp"
#include "uner/review_server.hpp"

using namespace uner;

namespace {

const Taxonomy& tax() {
  static const Taxonomy t = Taxonomy::load(testenv::taxonomy_file());
  return t;
}

std::vector<ReviewTask> three_tasks() {
  auto d = make_document("doc", "en", {"George", "Clooney", "visited", "Zagreb", "and", "Split"});
  d.spans = {{"t0-2", 0, 2, "Name.Person.Name", "m", {}},
             {"t3-4", 3, 4, "Name.Location", "m", {}},
             {"t5-6", 5, 6, "Name.Location.City", "m", {}}};
  return generate_tasks({d}, {}, &tax());
}

std::string verdict_body(const std::string& task, const std::string& annotator, const std::string& action,
                         const char* label = nullptr) {
  nlohmann::json j{{"task_id", task}, {"annotator_id", annotator}, {"action", action}};
  if (label) j["label"] = label;
  return j.dump();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

struct Running {
  testenv::TempDir dir;
  VerdictLog log{dir / "verdicts.jsonl"};
  ReviewService service;
  ReviewServer server;
  int port = 0;
  std::unique_ptr<httplib::Client> client;

  explicit Running(std::size_t quorum = 1, std::optional<std::filesystem::path> static_dir = std::nullopt)
      : service(three_tasks(), log, &tax(), quorum), server(service, static_dir) {
    port = server.start("127.0.0.1", 0);
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
  }
  ~Running() { server.stop(); }

  nlohmann::json progress() {
    auto res = client->Get("/progress");
    REQUIRE(res);
    REQUIRE(res->status == 200);
    return nlohmann::json::parse(res->body);
  }
};

}  // namespace

TEST_SUITE("http") {

TEST_CASE("next task, verdicts and progress") {
  Running r;
  auto res = r.client->Get("/tasks/next?annotator=ann1");
  REQUIRE(res);
  CHECK(res->status == 200);
  const auto task = nlohmann::json::parse(res->body);
  CHECK(task["task_id"] == "doc#t0-2");
  CHECK(task["char_start"] == 0);
  CHECK(task["char_end"] == 14);
  CHECK(task["proposed_label"] == "Name.Person.Name");

  CHECK(r.progress()["done"] == 0);
  res = r.client->Post("/verdicts", verdict_body("doc#t0-2", "ann1", "accept"), "application/json");
  REQUIRE(res);
  CHECK(res->status == 201);
  CHECK(r.progress()["done"] == 1);
  CHECK(r.progress()["verdicts"] == 1);

  res = r.client->Get("/tasks/next?annotator=ann1");
  CHECK(nlohmann::json::parse(res->body)["task_id"] == "doc#t3-4");
  res = r.client->Get("/tasks/next");
  CHECK(res->status == 400);
}

TEST_CASE("error statuses and an unchanged log") {
  Running r;
  CHECK(r.client->Post("/verdicts", verdict_body("doc#t0-2", "a", "reject"), "application/json")->status == 201);
  const auto before = slurp(r.dir / "verdicts.jsonl");
  auto res = r.client->Post("/verdicts", verdict_body("doc#t0-2", "a", "accept"), "application/json");
  CHECK(res->status == 409);
  CHECK(nlohmann::json::parse(res->body)["error"] == "duplicate");
  CHECK(r.client->Post("/verdicts", verdict_body("doc#t9-9", "a", "accept"), "application/json")->status == 404);
  CHECK(r.client->Post("/verdicts", "{not json", "application/json")->status == 400);
  CHECK(r.client->Post("/verdicts", verdict_body("doc#t3-4", "a", "relabel", "Name.Banana"), "application/json")->status == 400);
  CHECK(r.client->Post("/verdicts", verdict_body("doc#t3-4", "a", "relabel"), "application/json")->status == 400);
  CHECK(slurp(r.dir / "verdicts.jsonl") == before);
  CHECK(r.progress()["verdicts"] == 1);
  CHECK(r.client->Get("/nowhere")->status == 404);
}

TEST_CASE("annotator who judged everything gets 204") {
  Running r(2);
  for (const auto* t : {"doc#t0-2", "doc#t3-4", "doc#t5-6"}) {
    CHECK(r.client->Post("/verdicts", verdict_body(t, "a", "accept"), "application/json")->status == 201);
  }
  auto res = r.client->Get("/tasks/next?annotator=a");
  CHECK(res->status == 204);
  CHECK(res->body.empty());
  // still open for others until the quorum of two is met
  CHECK(r.progress()["done"] == 0);
  res = r.client->Get("/tasks/next?annotator=b");
  CHECK(res->status == 200);
  CHECK(r.client->Post("/verdicts", verdict_body("doc#t0-2", "b", "relabel", "Name.Person.Fictional"), "application/json")
            ->status == 201);
  CHECK(r.progress()["done"] == 1);
  CHECK(r.progress()["quorum"] == 2);
}

TEST_CASE("taxonomy endpoint") {
  Running r;
  auto res = r.client->Get("/taxonomy");
  REQUIRE(res);
  CHECK(res->status == 200);
  const auto tree = nlohmann::json::parse(res->body);
  CHECK(tree["name"] == "TOP");
  CHECK(tree["children"].size() == 3);
  std::size_t nodes = 0;
  const auto count = [&](auto&& self, const nlohmann::json& n) -> void {
    ++nodes;
    for (const auto& c : n["children"]) self(self, c);
  };
  count(count, tree);
  CHECK(nodes == 257);
}

TEST_CASE("static directory") {
  testenv::TempDir web;
  {
    std::ofstream out(web / "index.html");
    out << "<html>review</html>";
  }
  Running r(1, web.path());
  auto res = r.client->Get("/index.html");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body == "<html>review</html>");
  CHECK(r.client->Get("/progress")->status == 200);
}

TEST_CASE("concurrent posts are serialized") {
  Running r(100);
  std::vector<std::thread> threads;
  std::atomic<int> created{0}, conflicts{0};
  for (int t = 0; t < 6; ++t) {
    threads.emplace_back([&, t] {
      httplib::Client c("127.0.0.1", r.port);
      for (int k = 0; k < 20; ++k) {
        // pairs of threads share an annotator id, so half the posts collide
        const auto task = std::string("doc#") + (k % 3 == 0 ? "t0-2" : k % 3 == 1 ? "t3-4" : "t5-6");
        const auto annotator = "ann" + std::to_string(t / 2) + "-" + std::to_string(k);
        auto res = c.Post("/verdicts", verdict_body(task, annotator, "accept"), "application/json");
        if (res && res->status == 201) ++created;
        if (res && res->status == 409) ++conflicts;
        c.Get("/progress");
      }
    });
  }
  for (auto& th : threads) th.join();
  CHECK(created == 60);
  CHECK(conflicts == 60);
  CHECK(r.log.size() == 60);
  CHECK(VerdictLog::read(r.dir / "verdicts.jsonl").size() == 60);
}

TEST_CASE("service without transport") {
  testenv::TempDir dir;
  VerdictLog log(dir / "v.jsonl");
  ReviewService service(three_tasks(), log, &tax(), 1);
  CHECK(service.next_task("x").status == 200);
  CHECK(service.post_verdict(verdict_body("doc#t0-2", "x", "accept")).status == 201);
  CHECK(service.post_verdict(verdict_body("doc#t0-2", "x", "accept")).status == 409);
  CHECK(nlohmann::json::parse(service.progress().body)["done"] == 1);
  CHECK_THROWS_AS(ReviewService(three_tasks(), log, &tax(), 0), uner::Error);
  auto dup = three_tasks();
  dup.push_back(dup[0]);
  CHECK_THROWS_AS(ReviewService(dup, log, &tax(), 1), uner::Error);
}

}  // TEST_SUITE
