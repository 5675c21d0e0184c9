#pragma once

#include <condition_variable>
#include <memory>
#include <mutex>
#include <string>

#include <nlohmann/json.hpp>

#include "bats/providers.hpp"

namespace bats {

/// Caps concurrent requests across the provider bundle (live-mode rate
/// limiting). Shared by the llm/search/browse clients of one bundle.
class InFlightLimiter {
 public:
  explicit InFlightLimiter(int max_in_flight) : slots_(max_in_flight) {}

  class Slot {
   public:
    explicit Slot(InFlightLimiter* limiter) : limiter_(limiter) {
      if (limiter_) limiter_->acquire();
    }
    ~Slot() {
      if (limiter_) limiter_->release();
    }
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;

   private:
    InFlightLimiter* limiter_;
  };

 private:
  void acquire() {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [&] { return slots_ > 0; });
    --slots_;
  }
  void release() {
    {
      std::lock_guard<std::mutex> lock(mu_);
      ++slots_;
    }
    cv_.notify_one();
  }

  std::mutex mu_;
  std::condition_variable cv_;
  int slots_;
};

/// Connection settings for one HTTP service. The credential is read from
/// the named environment variable at call time; manifests never hold keys.
struct HttpEndpoint {
  std::string base_url;     // e.g. "https://api.example.com"
  std::string path;         // e.g. "/v1/chat/completions"
  std::string api_key_env;  // env var holding the bearer token ("" = none)
  int max_retries = 3;
  int timeout_seconds = 120;
  std::shared_ptr<InFlightLimiter> limiter;  // optional shared request cap

  static HttpEndpoint from_json(const nlohmann::json& j, const std::string& default_path);
};

/// OpenAI-style chat-completions client. Transient transport failures retry
/// up to max_retries; only the final successful exchange bills tokens.
class HttpLlmClient : public LlmClient {
 public:
  HttpLlmClient(HttpEndpoint endpoint, std::string model);
  LlmResponse chat(const LlmRequest& request) override;

 private:
  HttpEndpoint endpoint_;
  std::string model_;
};

/// Web-search API client: POST {"query": [...]} ->
/// {"results": [[{title, snippet, url}, ...], ...]}.
class HttpSearchClient : public SearchClient {
 public:
  explicit HttpSearchClient(HttpEndpoint endpoint);
  std::vector<std::vector<SearchResult>> search(
      const std::vector<std::string>& queries) override;

 private:
  HttpEndpoint endpoint_;
};

/// Page-scrape client: POST {"url": "...", "goal": "..."} -> {"text": "..."}.
/// Fetch failures come back as in-band error pages.
class HttpBrowseClient : public BrowseClient {
 public:
  explicit HttpBrowseClient(HttpEndpoint endpoint);
  std::vector<PageContent> browse(const std::vector<std::string>& urls,
                                  const std::string& goal) override;

 private:
  HttpEndpoint endpoint_;
};

/// Builds the live bundle from a manifest providers section of type "http":
///   {"type": "http",
///    "llm": {"base_url": ..., "model": ..., "api_key_env": "LLM_API_KEY"},
///    "search": {...}, "browse": {...}}
ProviderSet make_http_providers(const nlohmann::json& config);

}  // namespace bats
