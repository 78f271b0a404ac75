#include "uner/review_server.hpp"

#include "httplib.h"
#include "uner/digest.hpp"
#include "uner/error.hpp"

namespace uner {

namespace {

ServiceResponse json_response(int status, const nlohmann::ordered_json& body) {
  return {status, body.dump()};
}

ServiceResponse error_response(int status, std::string_view error, std::string_view message) {
  nlohmann::ordered_json j;
  j["error"] = error;
  j["message"] = message;
  return json_response(status, j);
}

nlohmann::ordered_json node_json(const Taxonomy& taxonomy, int id) {
  const auto& node = taxonomy.node(id);
  nlohmann::ordered_json j;
  j["name"] = node.name;
  j["path"] = node.path;
  j["level"] = node.level;
  j["children"] = nlohmann::ordered_json::array();
  for (int child : node.children) j["children"].push_back(node_json(taxonomy, child));
  return j;
}

}  // namespace

nlohmann::ordered_json taxonomy_tree_json(const Taxonomy& taxonomy) { return node_json(taxonomy, 0); }

ReviewService::ReviewService(std::vector<ReviewTask> tasks, VerdictLog& log, const Taxonomy* taxonomy,
                             std::size_t quorum)
    : tasks_(std::move(tasks)), log_(log), taxonomy_(taxonomy), quorum_(quorum) {
  if (quorum_ < 1) throw Error(ErrorKind::Config, "quorum must be at least 1");
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    if (!index_.emplace(tasks_[i].task_id, i).second) {
      throw Error(ErrorKind::SchemaViolation, "task id " + tasks_[i].task_id + " repeats");
    }
  }
}

ServiceResponse ReviewService::next_task(const std::string& annotator) const {
  if (annotator.empty()) return error_response(400, "bad-request", "annotator parameter is required");
  for (const auto& task : tasks_) {
    if (log_.count_for(task.task_id) >= quorum_) continue;
    if (log_.has_judged(task.task_id, annotator)) continue;
    return json_response(200, task.to_json());
  }
  return {204, {}};
}

ServiceResponse ReviewService::post_verdict(std::string_view body) {
  Verdict verdict;
  try {
    verdict = Verdict::from_json(nlohmann::json::parse(body), taxonomy_);
  } catch (const nlohmann::json::exception& e) {
    return error_response(400, "malformed", e.what());
  } catch (const Error& e) {
    return error_response(400, "malformed", e.message());
  }
  if (!index_.count(verdict.task_id)) {
    return error_response(404, "unknown-task", "no task " + verdict.task_id);
  }
  if (verdict.ts.empty()) verdict.ts = utc_timestamp();
  if (log_.append(verdict) == VerdictLog::AppendResult::duplicate) {
    return error_response(409, "duplicate",
                          verdict.annotator_id + " already judged " + verdict.task_id);
  }
  nlohmann::ordered_json j;
  j["status"] = "recorded";
  j["verdict"] = verdict.to_json();
  return json_response(201, j);
}

ServiceResponse ReviewService::progress() const {
  std::size_t done = 0;
  std::size_t started = 0;
  for (const auto& task : tasks_) {
    const auto n = log_.count_for(task.task_id);
    if (n > 0) ++started;
    if (n >= quorum_) ++done;
  }
  nlohmann::ordered_json j;
  j["tasks"] = tasks_.size();
  j["done"] = done;
  j["open"] = tasks_.size() - done;
  j["started"] = started;
  j["verdicts"] = log_.size();
  j["quorum"] = quorum_;
  return json_response(200, j);
}

ServiceResponse ReviewService::taxonomy() const {
  if (!taxonomy_) return error_response(404, "no-taxonomy", "service was started without a taxonomy");
  return json_response(200, taxonomy_tree_json(*taxonomy_));
}

ReviewServer::ReviewServer(ReviewService& service, std::optional<std::filesystem::path> static_dir)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto send = [](httplib::Response& res, const ServiceResponse& out) {
    res.status = out.status;
    if (!out.body.empty()) res.set_content(out.body, "application/json");
  };
  server_->Get("/tasks/next", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service_.next_task(req.get_param_value("annotator")));
  });
  server_->Post("/verdicts", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service_.post_verdict(req.body));
  });
  server_->Get("/progress", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, service_.progress());
  });
  server_->Get("/taxonomy", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, service_.taxonomy());
  });
  server_->set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    res.status = 500;
    res.set_content(nlohmann::json{{"error", "internal"}, {"message", what}}.dump(), "application/json");
  });
  if (static_dir) {
    if (!server_->set_mount_point("/", static_dir->string())) {
      throw Error(ErrorKind::Config, "static directory " + static_dir->string() + " does not exist");
    }
  }
}

ReviewServer::~ReviewServer() { stop(); }

int ReviewServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(ErrorKind::Config, "cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void ReviewServer::listen() { server_->listen_after_bind(); }

int ReviewServer::start(const std::string& host, int port) {
  const int bound = bind(host, port);
  thread_ = std::thread([this] { listen(); });
  server_->wait_until_ready();
  return bound;
}

void ReviewServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace uner
