#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "pgv/error.hpp"
#include "pgv/oracles.hpp"

namespace pgv {

namespace {

std::string env_or_empty(const char * name)
{
  const char * v = std::getenv(name);
  return v ? v : "";
}

// Splits "https://host:port/base" into ("https://host:port", "/base").
std::pair<std::string, std::string> split_url(const std::string & url)
{
  std::size_t scheme = url.find("://");
  std::size_t host = scheme == std::string::npos ? 0 : scheme + 3;
  std::size_t path = url.find('/', host);
  if (path == std::string::npos) {
    return {url, ""};
  }
  std::string base = url.substr(path);
  while (!base.empty() && base.back() == '/') {
    base.pop_back();
  }
  return {url.substr(0, path), base};
}

}  // namespace

HttpChatTransport::HttpChatTransport(std::string endpoint, std::string model,
                                     std::string api_key, std::chrono::seconds timeout)
    : endpoint_(std::move(endpoint)),
      model_(std::move(model)),
      key_(std::move(api_key)),
      timeout_(timeout)
{
}

std::unique_ptr<HttpChatTransport> HttpChatTransport::from_env()
{
  std::string endpoint = env_or_empty("PGV_LLM_ENDPOINT");
  std::string model = env_or_empty("PGV_LLM_MODEL");
  std::string key = env_or_empty("PGV_LLM_API_KEY");
  if (endpoint.empty() || model.empty()) {
    throw TransportError("LLM transport needs PGV_LLM_ENDPOINT and PGV_LLM_MODEL");
  }
  return std::make_unique<HttpChatTransport>(endpoint, model, key);
}

std::string HttpChatTransport::complete(const std::vector<ChatMessage> & messages)
{
  auto [origin, base] = split_url(endpoint_);
  std::string path = base;
  if (path.size() < 17 || path.compare(path.size() - 17, 17, "/chat/completions") != 0) {
    path += "/chat/completions";
  }

  nlohmann::json body;
  body["model"] = model_;
  body["messages"] = nlohmann::json::array();
  for (const auto & m : messages) {
    body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  }

  httplib::Headers headers;
  if (!key_.empty()) {
    headers.emplace("Authorization", "Bearer " + key_);
  }

  httplib::Result res{nullptr, httplib::Error::Unknown};
  try {
    httplib::Client cli(origin);
    cli.set_connection_timeout(timeout_);
    cli.set_read_timeout(timeout_);
    cli.set_write_timeout(timeout_);
    res = cli.Post(path, headers, body.dump(), "application/json");
  } catch (const std::exception & e) {
    throw TransportError("LLM request to " + origin + " failed: " + e.what());
  }
  if (!res) {
    throw TransportError("LLM request to " + origin + " failed: "
                         + httplib::to_string(res.error()));
  }
  if (res->status / 100 != 2) {
    throw TransportError("LLM endpoint returned HTTP " + std::to_string(res->status)
                         + ": " + res->body.substr(0, 200));
  }
  try {
    auto j = nlohmann::json::parse(res->body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception & e) {
    throw TransportError(std::string("malformed LLM response: ") + e.what());
  }
}

}  // namespace pgv
