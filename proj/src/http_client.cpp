#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "storyaudit/collect.hpp"

namespace storyaudit {

namespace {

// "http://host:port/path" -> (scheme://host:port, /path)
std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) return {url, "/"};
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

struct HttpTextClient::Impl {
  std::string base;
  std::string path;
  std::string model_id;
  std::string token;
};

HttpTextClient::HttpTextClient(std::string endpoint_url, std::string model_id,
                               std::string credentials_env)
    : impl_(std::make_unique<Impl>()) {
  auto [base, path] = split_url(endpoint_url);
  impl_->base = std::move(base);
  impl_->path = std::move(path);
  impl_->model_id = std::move(model_id);
  if (!credentials_env.empty()) {
    const char* token = std::getenv(credentials_env.c_str());
    if (token) impl_->token = token;
  }
}

HttpTextClient::~HttpTextClient() = default;

ClientResult HttpTextClient::generate(const std::string&, const std::string& prompt_text) {
  httplib::Client http(impl_->base);
  http.set_connection_timeout(30);
  http.set_read_timeout(120);
  httplib::Headers headers;
  if (!impl_->token.empty()) headers.emplace("Authorization", "Bearer " + impl_->token);

  nlohmann::json body;
  body["model"] = impl_->model_id;
  body["prompt"] = prompt_text;
  auto res = http.Post(impl_->path, headers, body.dump(), "application/json");
  if (!res)
    return ClientResult::fail(ClientErrorKind::Transient,
                              "http: no response from " + impl_->base);
  if (res->status == 429 || res->status >= 500)
    return ClientResult::fail(ClientErrorKind::Transient,
                              "http: status " + std::to_string(res->status));
  if (res->status != 200)
    return ClientResult::fail(ClientErrorKind::Permanent,
                              "http: status " + std::to_string(res->status));
  try {
    const auto j = nlohmann::json::parse(res->body);
    if (!j.contains("text") || !j["text"].is_string())
      return ClientResult::fail(ClientErrorKind::Permanent, "http: reply missing 'text' field");
    return ClientResult::ok(j["text"].get<std::string>());
  } catch (const nlohmann::json::parse_error& e) {
    return ClientResult::fail(ClientErrorKind::Permanent,
                              std::string("http: invalid JSON reply (") + e.what() + ")");
  }
}

}  // namespace storyaudit
