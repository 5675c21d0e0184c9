#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "bats/cost.hpp"

namespace bats {

struct ProviderUnavailable : std::runtime_error {
  explicit ProviderUnavailable(const std::string& what) : std::runtime_error(what) {}
};

struct TranscriptExhausted : std::logic_error {
  explicit TranscriptExhausted(const std::string& what) : std::logic_error(what) {}
};

/// Strict-mode transcript mismatch: a protocol-critical string was missing
/// from the prompt. Always a test bug, so it surfaces loudly.
struct TranscriptMismatch : std::logic_error {
  explicit TranscriptMismatch(const std::string& what) : std::logic_error(what) {}
};

struct EmptyQueryError : std::invalid_argument {
  EmptyQueryError() : std::invalid_argument("search: empty query") {}
};

struct ChatTurn {
  std::string role;  // "user" | "assistant"
  std::string text;
};

struct LlmRequest {
  std::string system;
  std::vector<ChatTurn> turns;
  double temperature = 0.7;
  int max_new_tokens = 65536;

  std::size_t char_length() const {
    std::size_t n = system.size();
    for (const auto& t : turns) n += t.text.size();
    return n;
  }
};

struct LlmResponse {
  std::string text;
  TokenUsage usage;  // always present; mocks synthesize deterministic counts
};

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  virtual LlmResponse chat(const LlmRequest& request) = 0;
};

struct SearchResult {
  std::string title;
  std::string snippet;
  std::string url;
};

inline constexpr std::size_t kBrowseCharCap = 150'000;

/// Page text hard-capped at 150,000 characters before any downstream use.
struct PageContent {
  std::string url;
  std::string text;
  bool truncated = false;

  static PageContent make(std::string url, std::string raw,
                          std::size_t cap = kBrowseCharCap) {
    PageContent p;
    p.url = std::move(url);
    if (raw.size() > cap) {
      raw.resize(cap);
      p.truncated = true;
    }
    p.text = std::move(raw);
    return p;
  }
};

class SearchClient {
 public:
  virtual ~SearchClient() = default;
  /// One result list per query, order-aligned with the input, at most 10
  /// results each.
  virtual std::vector<std::vector<SearchResult>> search(
      const std::vector<std::string>& queries) = 0;
};

class BrowseClient {
 public:
  virtual ~BrowseClient() = default;
  /// Per-URL fetch failures come back in-band as error pages; the step (and
  /// its budget) stands either way.
  virtual std::vector<PageContent> browse(const std::vector<std::string>& urls,
                                          const std::string& goal) = 0;
};

/// The full provider bundle one run needs. Verifier and judge default to the
/// agent LLM when unset.
struct ProviderSet {
  std::shared_ptr<LlmClient> llm;
  std::shared_ptr<LlmClient> verifier;  // self-verification calls (billed)
  std::shared_ptr<LlmClient> judge;     // selection/grading calls (not billed)
  std::shared_ptr<SearchClient> search;
  std::shared_ptr<BrowseClient> browse;

  LlmClient& verifier_llm() const { return verifier ? *verifier : *llm; }
  LlmClient& judge_llm() const { return judge ? *judge : *llm; }
};

}  // namespace bats
