#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bats/budget.hpp"
#include "bats/events.hpp"
#include "bats/plan.hpp"
#include "bats/prompts.hpp"
#include "bats/providers.hpp"

namespace bats {

enum class StepKind {
  think,
  tool_code,
  tool_response,
  budget_block,
  answer,
  forcing_message,
  plan_block,
  summary,
};

const char* step_kind_name(StepKind kind);

struct ToolCall {
  std::string name;
  nlohmann::json arguments;
};

struct Step {
  StepKind kind = StepKind::think;
  std::string text;               // payload (tag content, message, summary)
  std::optional<ToolCall> call;   // parsed tool_code
  bool parse_error = false;       // tool_code that failed to parse/validate
  int iteration = 0;
};

/// Canonical tagged rendering of one step, as it appears in the context.
std::string render_step(const Step& step);

enum class RunStatus { running, answered, budget_exhausted, max_iterations };

const char* run_status_name(RunStatus status);

struct Trajectory {
  std::string question_id;
  std::vector<Step> steps;
  TokenUsage usage;  // billed tokens: agent + verifier calls of this attempt
  int iterations = 0;
  RunStatus status = RunStatus::running;
  std::string final_answer;            // latest answer payload, "" if none
  int iteration_at_last_summary = 0;   // bookkeeping for the K rule
  std::optional<Plan> plan_mirror;     // parsed mirror of the model's checklist

  bool has_answer_step() const;
  int count(StepKind kind) const;
};

struct AgentConfig {
  double temperature_execute = 0.7;
  double temperature_select = 0.0;
  int max_new_tokens = 65536;
  int summarize_interval = 10;  // K: iterations between summary substitutions
  std::size_t browse_char_cap = kBrowseCharCap;
  int max_iterations = 100;     // runaway guard; budget exhaustion is the intended stop
  bool tracker_enabled = false;
  Mode mode = Mode::react;

  static AgentConfig for_mode(Mode mode) {
    AgentConfig c;
    c.mode = mode;
    c.tracker_enabled = mode != Mode::react;
    return c;
  }

  nlohmann::json to_json() const;
  static AgentConfig from_json(const nlohmann::json& j);
};

/// Splits model output into tagged steps. Text outside any tag attaches to
/// the nearest think step. A <tool_code> whose JSON body is malformed or
/// fails the tool schema comes back with parse_error set; the loop answers
/// it in-band and charges no budget.
std::vector<Step> parse_model_output(const std::string& text);

/// Schema check for parsed calls: search wants a non-empty string array
/// "query"; browse wants a non-empty string array "url" plus a string
/// "goal". Returns an explanation for the model on failure.
std::optional<std::string> validate_tool_call(const ToolCall& call);

/// Budget units a call will consume: one per array element.
std::int64_t tool_call_units(const ToolCall& call);

/// The compaction rule: steps older than the last summary are replaced by
/// that summary, and all tool responses except the most recent are dropped.
/// The full step list stays in the trajectory log.
std::vector<const Step*> compact_context(const Trajectory& trajectory, const AgentConfig& config);

/// Character length of the renderable context (compacted steps only).
std::size_t context_char_length(const Trajectory& trajectory, const AgentConfig& config);

/// Decision a hook returns when the model proposes an answer.
struct AnswerDecision {
  enum class Kind {
    finish,                // accept the answer; run ends
    inject_message,        // append `text` as a runtime message and keep going
    replace_with_summary,  // substitute older context with `text`, keep going
  };
  Kind kind = Kind::finish;
  std::string text;
};

/// Extension points for the scaling strategies (sequential forcing, BATS
/// verification). One trajectory runs single-threaded, so hooks need no
/// synchronization of their own.
class LoopHooks {
 public:
  virtual ~LoopHooks() = default;
  virtual AnswerDecision on_answer(Trajectory& trajectory, const std::string& answer) {
    (void)trajectory;
    (void)answer;
    return {};
  }
  virtual void on_iteration_end(Trajectory& trajectory, bool issued_tool_code) {
    (void)trajectory;
    (void)issued_tool_code;
  }
  /// Checked at iteration end; true makes the loop prompt for a final
  /// answer and stop (sequential forcing's five-refusals rule).
  virtual bool wants_final_answer() { return false; }
};

struct RunInput {
  std::string run_id;
  std::string question;
  std::string seed_context;  // pivot seeding: summary + guidance + budget block
};

/// Executes the iterate loop against the shared ledger: chat, parse,
/// reserve-then-dispatch tools, inject tool responses (and budget blocks in
/// tracker modes), compact context, stop on answer / exhaustion /
/// max_iterations. Tool-side failures are handled in-band; only LLM
/// transport failures propagate.
Trajectory run_react(const RunInput& input, BudgetLedger& ledger, const AgentConfig& config,
                     const ProviderSet& providers, EventLog* events = nullptr,
                     LoopHooks* hooks = nullptr);

/// One answer-only chat (tool calls ignored, nothing dispatched); re-asks
/// once, then records "None". Skipped when the trajectory already contains
/// an answer attempt.
void forced_final_answer(Trajectory& trajectory, const RunInput& input, const AgentConfig& config,
                         const ProviderSet& providers, EventLog* events = nullptr);

/// The renderable context as chat turns (used for requests and for the
/// verifier's trajectory view).
LlmRequest build_request(const Trajectory& trajectory, const RunInput& input,
                         const AgentConfig& config);
std::string render_context_text(const Trajectory& trajectory, const AgentConfig& config);

}  // namespace bats
