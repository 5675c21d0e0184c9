#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bats/budget.hpp"
#include "bats/events.hpp"
#include "bats/providers.hpp"

namespace bats {

enum class VerifyDecision { success, continue_current, pivot };

const char* decision_name(VerifyDecision d);  // "SUCCESS" | "CONTINUE" | "PIVOT"

/// Parsed verifier output. decision is exactly one of the three tokens and
/// trajectory_summary is non-empty whenever the decision is not SUCCESS.
struct VerifierVerdict {
  std::string verification;        // constraint-by-constraint findings
  VerifyDecision decision = VerifyDecision::continue_current;
  std::string justification;
  std::string trajectory_summary;
  nlohmann::json details = nlohmann::json::object();
  bool degraded = false;  // fallback after two unparseable replies
  std::string raw;        // verbatim reply, logged alongside the parsed form

  nlohmann::json to_json() const;
};

/// Outcome of one attempt, recorded when the attempt ends.
struct AttemptRecord {
  int index = 0;  // dense from 1
  std::string answer;
  VerifierVerdict verdict;
  BudgetSnapshot ledger_at_verdict;
  TokenUsage usage;  // attempt tokens including its verifier calls

  nlohmann::json to_json() const;
};

/// Parses the 5-field verdict JSON out of a reply (tolerating code fences
/// and prose around the object). Returns nullopt when the reply does not
/// contain a valid verdict.
std::optional<VerifierVerdict> parse_verdict(const std::string& reply);

struct VerifyOutcome {
  VerifierVerdict verdict;
  TokenUsage usage;  // billed into the attempt
};

/// One verifier exchange: strict parse, one re-ask on failure, then a
/// degraded CONTINUE whose summary is a tail excerpt of the raw reply.
VerifyOutcome verify(const std::string& question, const std::string& trajectory_text,
                     const std::string& answer, const BudgetSnapshot& snapshot, LlmClient& llm,
                     EventLog* events = nullptr, const std::string& run_id = {});

enum class NextAction { finish_attempt, resume_same, new_attempt };

const char* next_action_name(NextAction a);

struct AttemptState {
  bool early_stop = false;
  bool budget_remaining = false;  // some tool still has >= 1 unit
};

/// The decision machine: SUCCESS finishes (early-stop) or starts a new
/// sequence while budget remains (exhaust mode); CONTINUE resumes the same
/// trajectory; PIVOT abandons it for a fresh attempt.
NextAction apply_verdict(const AttemptState& state, const VerifierVerdict& verdict);

struct AnswerCandidate {
  int index = 0;
  std::string answer;
  std::string context;  // trajectory/verification text shown to the judge
  bool success = false;
};

std::vector<AnswerCandidate> candidates_from_attempts(const std::vector<AttemptRecord>& attempts);

struct SelectionResult {
  std::string answer;
  TokenUsage judge_usage;  // logged, not billed into the agent's cost
  bool used_judge = false;
};

/// Best-answer selection across candidates: a single candidate returns
/// directly; otherwise the judge picks a boxed letter at temperature 0.
/// Unreadable or "None" picks re-ask once, then fall back to the
/// highest-index SUCCESS candidate.
SelectionResult select_final(const std::vector<AnswerCandidate>& candidates, LlmClient& judge,
                             const std::string& question, EventLog* events = nullptr,
                             const std::string& run_id = {}, bool majority_prompt = false);

}  // namespace bats
