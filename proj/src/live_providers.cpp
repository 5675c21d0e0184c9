#include "bats/live_providers.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>

namespace bats {

namespace {

std::string bearer_token(const std::string& env_name) {
  if (env_name.empty()) return {};
  const char* value = std::getenv(env_name.c_str());
  return value ? value : "";
}

httplib::Headers auth_headers(const HttpEndpoint& endpoint) {
  httplib::Headers headers{{"Content-Type", "application/json"}};
  const std::string token = bearer_token(endpoint.api_key_env);
  if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);
  return headers;
}

// POSTs the body with retries on transport errors and 5xx; 4xx fails fast.
nlohmann::json post_json(const HttpEndpoint& endpoint, const nlohmann::json& body,
                         const std::string& what) {
  InFlightLimiter::Slot slot(endpoint.limiter.get());
  httplib::Client client(endpoint.base_url);
  client.set_read_timeout(endpoint.timeout_seconds, 0);
  client.set_connection_timeout(10, 0);
  std::string error;
  for (int attempt = 0; attempt <= endpoint.max_retries; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(250 * (1 << (attempt - 1))));
    auto res = client.Post(endpoint.path, auth_headers(endpoint), body.dump(),
                           "application/json");
    if (!res) {
      error = what + ": transport error " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      error = what + ": server error " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw ProviderUnavailable(what + ": HTTP " + std::to_string(res->status) + " " +
                                res->body.substr(0, 512));
    nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) throw ProviderUnavailable(what + ": non-JSON response");
    return parsed;
  }
  throw ProviderUnavailable(error.empty() ? what + ": retries exhausted" : error);
}

}  // namespace

HttpEndpoint HttpEndpoint::from_json(const nlohmann::json& j, const std::string& default_path) {
  HttpEndpoint e;
  e.base_url = j.value("base_url", std::string());
  e.path = j.value("path", default_path);
  e.api_key_env = j.value("api_key_env", std::string());
  e.max_retries = j.value("max_retries", 3);
  e.timeout_seconds = j.value("timeout_seconds", 120);
  if (e.base_url.empty()) throw std::invalid_argument("http provider needs base_url");
  return e;
}

HttpLlmClient::HttpLlmClient(HttpEndpoint endpoint, std::string model)
    : endpoint_(std::move(endpoint)), model_(std::move(model)) {}

LlmResponse HttpLlmClient::chat(const LlmRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  if (!request.system.empty())
    messages.push_back({{"role", "system"}, {"content", request.system}});
  for (const auto& turn : request.turns)
    messages.push_back({{"role", turn.role}, {"content", turn.text}});
  nlohmann::json body = {{"model", model_},
                         {"messages", messages},
                         {"temperature", request.temperature},
                         {"max_tokens", request.max_new_tokens}};

  nlohmann::json reply = post_json(endpoint_, body, "llm");
  LlmResponse out;
  try {
    out.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw ProviderUnavailable("llm: response missing choices[0].message.content");
  }
  if (reply.contains("usage")) {
    const auto& u = reply.at("usage");
    out.usage.input = u.value("prompt_tokens", std::int64_t{0});
    out.usage.output = u.value("completion_tokens", std::int64_t{0});
    if (u.contains("prompt_tokens_details"))
      out.usage.cache_hit = u.at("prompt_tokens_details").value("cached_tokens", std::int64_t{0});
    out.usage.cache_hit = std::min(out.usage.cache_hit, out.usage.input);
  }
  return out;
}

HttpSearchClient::HttpSearchClient(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

std::vector<std::vector<SearchResult>> HttpSearchClient::search(
    const std::vector<std::string>& queries) {
  for (const auto& q : queries)
    if (q.empty()) throw EmptyQueryError();
  nlohmann::json reply = post_json(endpoint_, {{"query", queries}}, "search");
  std::vector<std::vector<SearchResult>> out(queries.size());
  if (!reply.contains("results") || !reply.at("results").is_array()) return out;
  const auto& lists = reply.at("results");
  for (std::size_t i = 0; i < out.size() && i < lists.size(); ++i) {
    for (const auto& r : lists[i]) {
      SearchResult sr;
      sr.title = r.value("title", std::string());
      sr.snippet = r.value("snippet", std::string());
      sr.url = r.value("url", std::string());
      out[i].push_back(std::move(sr));
      if (out[i].size() == 10) break;
    }
  }
  return out;
}

HttpBrowseClient::HttpBrowseClient(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

std::vector<PageContent> HttpBrowseClient::browse(const std::vector<std::string>& urls,
                                                  const std::string& goal) {
  std::vector<PageContent> out;
  out.reserve(urls.size());
  for (const auto& url : urls) {
    try {
      nlohmann::json reply = post_json(endpoint_, {{"url", url}, {"goal", goal}}, "browse");
      out.push_back(PageContent::make(url, reply.value("text", std::string())));
    } catch (const ProviderUnavailable& e) {
      // Dead links are part of the job; report in-band and keep going.
      out.push_back(PageContent::make(url, std::string("Error: fetch failed: ") + e.what()));
    }
  }
  return out;
}

ProviderSet make_http_providers(const nlohmann::json& config) {
  ProviderSet set;
  if (!config.contains("llm")) throw std::invalid_argument("http providers need an llm section");
  auto limiter = std::make_shared<InFlightLimiter>(config.value("max_in_flight", 4));
  auto endpoint = [&](const nlohmann::json& j, const std::string& default_path) {
    HttpEndpoint e = HttpEndpoint::from_json(j, default_path);
    e.limiter = limiter;
    return e;
  };
  const auto& llm = config.at("llm");
  set.llm = std::make_shared<HttpLlmClient>(endpoint(llm, "/v1/chat/completions"),
                                            llm.value("model", std::string()));
  set.verifier = set.llm;
  set.judge = config.contains("judge")
                  ? std::make_shared<HttpLlmClient>(
                        endpoint(config.at("judge"), "/v1/chat/completions"),
                        config.at("judge").value("model", std::string()))
                  : set.llm;
  if (config.contains("search"))
    set.search = std::make_shared<HttpSearchClient>(endpoint(config.at("search"), "/search"));
  if (config.contains("browse"))
    set.browse = std::make_shared<HttpBrowseClient>(endpoint(config.at("browse"), "/scrape"));
  if (!set.search || !set.browse)
    throw std::invalid_argument("http providers need search and browse sections");
  return set;
}

}  // namespace bats
