#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "uner/review.hpp"
#include "uner/taxonomy.hpp"

namespace httplib {
class Server;
}

namespace uner {

struct ServiceResponse {
  int status = 200;
  std::string body;  // JSON, empty for 204
};

/// The review endpoints without the transport, so they can be exercised
/// directly. A task counts as done once it holds `quorum` verdicts; until
/// then it stays open and is offered to annotators who have not judged it.
class ReviewService {
 public:
  ReviewService(std::vector<ReviewTask> tasks, VerdictLog& log, const Taxonomy* taxonomy = nullptr,
                std::size_t quorum = 1);

  ServiceResponse next_task(const std::string& annotator) const;
  ServiceResponse post_verdict(std::string_view body);
  ServiceResponse progress() const;
  ServiceResponse taxonomy() const;

  std::size_t quorum() const { return quorum_; }

 private:
  std::vector<ReviewTask> tasks_;
  std::unordered_map<std::string, std::size_t> index_;
  VerdictLog& log_;
  const Taxonomy* taxonomy_;
  std::size_t quorum_;
};

/// Nested `{"name", "path", "level", "children"}` view of the hierarchy.
nlohmann::ordered_json taxonomy_tree_json(const Taxonomy& taxonomy);

/// HTTP front end:
///   GET  /tasks/next?annotator=<id>   200 task | 204 | 400
///   POST /verdicts                     201 | 400 | 404 | 409
///   GET  /progress                     200
///   GET  /taxonomy                     200
/// plus an optional static directory mounted at "/".
class ReviewServer {
 public:
  explicit ReviewServer(ReviewService& service, std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~ReviewServer();

  ReviewServer(const ReviewServer&) = delete;
  ReviewServer& operator=(const ReviewServer&) = delete;

  /// Port 0 picks a free port. Returns the bound port; throws Config.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void listen();
  /// bind + listen on a background thread.
  int start(const std::string& host, int port);
  void stop();

 private:
  ReviewService& service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace uner
