#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bats/providers.hpp"

namespace bats {

/// One pre-scripted reply. expect_substrings are only checked in strict
/// mode; usage overrides the synthesized token counts when set.
struct ScriptedTurn {
  std::string reply;
  std::vector<std::string> expect_substrings;
  std::optional<TokenUsage> usage;
};

/// Deterministic token synthesis used by all mock LLMs: roughly four
/// characters per token, no cache hits unless scripted.
TokenUsage synthesize_usage(const LlmRequest& request, const std::string& reply);

/// Renders a request to one flat string (system + turns) for strict-mode
/// substring checks and token synthesis.
std::string flatten_request(const LlmRequest& request);

/// Replays a fixed transcript by turn index. Asking for a turn past the end
/// throws TranscriptExhausted — that is a test bug, not a runtime condition.
/// Strict mode additionally pins protocol-critical prompt substrings.
class ScriptedLlm : public LlmClient {
 public:
  explicit ScriptedLlm(std::vector<ScriptedTurn> turns, bool strict = false);

  LlmResponse chat(const LlmRequest& request) override;

  std::size_t calls() const { return next_; }
  std::size_t remaining_turns() const { return turns_.size() - next_; }

  /// Transcript fixtures serialize as JSONL, one turn per line:
  /// {"reply": "...", "expect": ["..."], "usage": {...}}
  static ScriptedLlm load_jsonl(const std::string& path, bool strict = false);
  void save_jsonl(const std::string& path) const;

 private:
  std::vector<ScriptedTurn> turns_;
  std::size_t next_ = 0;
  bool strict_;
};

/// A deterministic policy as an LLM: the callback sees the full request and
/// produces the reply text. Token usage is synthesized.
class CallbackLlm : public LlmClient {
 public:
  using Fn = std::function<std::string(const LlmRequest&)>;
  explicit CallbackLlm(Fn fn) : fn_(std::move(fn)) {}

  LlmResponse chat(const LlmRequest& request) override {
    LlmResponse resp;
    resp.text = fn_(request);
    resp.usage = synthesize_usage(request, resp.text);
    return resp;
  }

 private:
  Fn fn_;
};

/// A world with nothing in it: every search comes back empty, every browse
/// is a not-found page. Useful behind scripted transcripts that never call
/// tools (and as the degenerate fixture for error-path tests).
class EmptySearchWorld : public SearchClient, public BrowseClient {
 public:
  std::vector<std::vector<SearchResult>> search(
      const std::vector<std::string>& queries) override {
    for (const auto& q : queries)
      if (q.empty()) throw EmptyQueryError();
    return std::vector<std::vector<SearchResult>>(queries.size());
  }

  std::vector<PageContent> browse(const std::vector<std::string>& urls,
                                  const std::string& /*goal*/) override {
    std::vector<PageContent> out;
    out.reserve(urls.size());
    for (const auto& url : urls)
      out.push_back(PageContent::make(url, "Error: page not found: " + url));
    return out;
  }
};

}  // namespace bats
