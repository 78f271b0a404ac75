#include "httplib.h"
#include "uner/error.hpp"
#include "uner/kb_linker.hpp"

namespace uner {
namespace {

std::string escape_literal(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Url split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorKind::Config, "endpoint \"" + url + "\" is not an URL");
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

SparqlKbClient::SparqlKbClient(std::map<std::string, std::string> endpoints, int timeout_seconds)
    : endpoints_(std::move(endpoints)), timeout_seconds_(timeout_seconds) {
  for (const auto& [kb, url] : endpoints_) split_url(url);
}

std::string SparqlKbClient::build_query(const std::string& kb_id, const std::string& surface) {
  const std::string type_predicate = kb_id == "wikidata" ? "<http://www.wikidata.org/prop/direct/P31>"
                                                         : "<http://www.w3.org/1999/02/22-rdf-syntax-ns#type>";
  return "SELECT DISTINCT ?c WHERE { ?s <http://www.w3.org/2000/01/rdf-schema#label> \"" + escape_literal(surface) +
         "\"@en . ?s " + type_predicate + " ?c . } LIMIT 100";
}

std::vector<std::string> SparqlKbClient::do_fetch(const std::string& kb_id, const std::string& surface) {
  auto it = endpoints_.find(kb_id);
  if (it == endpoints_.end()) return {};
  const auto url = split_url(it->second);

  count_network_call();
  httplib::Client client(url.origin);
  client.set_connection_timeout(timeout_seconds_);
  client.set_read_timeout(timeout_seconds_);
  client.set_follow_location(true);
  const httplib::Params params{{"query", build_query(kb_id, surface)}, {"format", "json"}};
  const httplib::Headers headers{{"Accept", "application/sparql-results+json"},
                                 {"User-Agent", "uner-kb-linker/1.0"}};
  auto res = client.Get(url.path, params, headers);
  if (!res) {
    throw Error(ErrorKind::EndpointUnavailable, kb_id + " endpoint " + it->second + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorKind::EndpointUnavailable, kb_id + " endpoint returned HTTP " + std::to_string(res->status));
  }

  std::vector<std::string> classes;
  try {
    const auto j = nlohmann::json::parse(res->body);
    for (const auto& binding : j.at("results").at("bindings")) {
      if (auto c = binding.find("c"); c != binding.end()) classes.push_back(c->at("value").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::EndpointUnavailable, kb_id + " endpoint sent an unreadable result: " + e.what());
  }
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  return classes;
}

}  // namespace uner
