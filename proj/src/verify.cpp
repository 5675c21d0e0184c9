#include "bats/verify.hpp"

#include <algorithm>
#include <cctype>

#include "bats/prompts.hpp"

namespace bats {

const char* decision_name(VerifyDecision d) {
  switch (d) {
    case VerifyDecision::success: return "SUCCESS";
    case VerifyDecision::continue_current: return "CONTINUE";
    case VerifyDecision::pivot: return "PIVOT";
  }
  return "CONTINUE";
}

const char* next_action_name(NextAction a) {
  switch (a) {
    case NextAction::finish_attempt: return "finish_attempt";
    case NextAction::resume_same: return "resume_same";
    case NextAction::new_attempt: return "new_attempt";
  }
  return "finish_attempt";
}

nlohmann::json VerifierVerdict::to_json() const {
  return {{"verification", verification},
          {"decision", decision_name(decision)},
          {"justification", justification},
          {"trajectory_summary", trajectory_summary},
          {"details", details},
          {"degraded", degraded}};
}

nlohmann::json AttemptRecord::to_json() const {
  return {{"index", index},
          {"answer", answer},
          {"verdict", verdict.to_json()},
          {"ledger", ledger_at_verdict.to_json()},
          {"tokens", usage.to_json()}};
}

namespace {

// Extracts the first balanced JSON object from a reply, skipping prose and
// markdown fences around it.
std::optional<std::string> extract_json_object(const std::string& text) {
  auto start = text.find('{');
  while (start != std::string::npos) {
    int depth = 0;
    bool in_string = false, escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
      char c = text[i];
      if (in_string) {
        if (escaped) escaped = false;
        else if (c == '\\') escaped = true;
        else if (c == '"') in_string = false;
        continue;
      }
      if (c == '"') in_string = true;
      else if (c == '{') ++depth;
      else if (c == '}') {
        if (--depth == 0) return text.substr(start, i - start + 1);
      }
    }
    start = text.find('{', start + 1);
  }
  return std::nullopt;
}

std::string tail_excerpt(const std::string& text, std::size_t max_chars = 400) {
  if (text.empty()) return "(verifier reply was empty)";
  if (text.size() <= max_chars) return text;
  return "..." + text.substr(text.size() - max_chars);
}

}  // namespace

std::optional<VerifierVerdict> parse_verdict(const std::string& reply) {
  auto object_text = extract_json_object(reply);
  if (!object_text) return std::nullopt;
  nlohmann::json j = nlohmann::json::parse(*object_text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  if (!j.contains("decision") || !j.at("decision").is_string()) return std::nullopt;

  VerifierVerdict v;
  const std::string decision = j.at("decision").get<std::string>();
  if (decision == "SUCCESS") v.decision = VerifyDecision::success;
  else if (decision == "CONTINUE") v.decision = VerifyDecision::continue_current;
  else if (decision == "PIVOT") v.decision = VerifyDecision::pivot;
  else return std::nullopt;

  auto text_field = [&](const char* name) {
    return j.contains(name) && j.at(name).is_string() ? j.at(name).get<std::string>()
                                                      : std::string();
  };
  v.verification = text_field("verification");
  v.justification = text_field("justification");
  v.trajectory_summary = text_field("trajectory_summary");
  if (j.contains("details")) {
    if (j.at("details").is_object()) v.details = j.at("details");
    else if (j.at("details").is_string() && !j.at("details").get<std::string>().empty())
      v.details = {{"note", j.at("details").get<std::string>()}};
  }
  if (v.decision != VerifyDecision::success && v.trajectory_summary.empty()) return std::nullopt;
  v.raw = reply;
  return v;
}

VerifyOutcome verify(const std::string& question, const std::string& trajectory_text,
                     const std::string& answer, const BudgetSnapshot& snapshot, LlmClient& llm,
                     EventLog* events, const std::string& run_id) {
  VerifyOutcome outcome;
  LlmRequest req;
  req.system = prompts::verifier_system_prompt();
  req.temperature = 0.0;
  req.turns.push_back({"user", prompts::verifier_inputs(question, trajectory_text, answer,
                                                        render_budget_block(snapshot))});

  std::string last_reply;
  for (int attempt = 0; attempt < 2; ++attempt) {
    LlmResponse resp = llm.chat(req);
    outcome.usage += resp.usage;
    last_reply = resp.text;
    if (events)
      events->emit({{"kind", "chat"},
                    {"run", run_id},
                    {"role", "verifier"},
                    {"billed", true},
                    {"tokens", resp.usage.to_json()},
                    {"reply_digest", digest_hex(resp.text)}});
    if (auto verdict = parse_verdict(resp.text)) {
      outcome.verdict = std::move(*verdict);
      if (events)
        events->emit({{"kind", "verdict"},
                      {"run", run_id},
                      {"verdict", outcome.verdict.to_json()},
                      {"raw_digest", digest_hex(outcome.verdict.raw)}});
      return outcome;
    }
    req.turns.push_back({"assistant", resp.text});
    req.turns.push_back({"user",
                         "Your previous reply was not a single valid JSON object with the "
                         "required fields (verification, decision, justification, "
                         "trajectory_summary, details). Output only that JSON object now."});
  }

  // Degraded fallback: CONTINUE is the lower-variance action when the
  // verdict is unreadable.
  outcome.verdict.decision = VerifyDecision::continue_current;
  outcome.verdict.degraded = true;
  outcome.verdict.justification = "verifier reply unparseable twice; continuing by default";
  outcome.verdict.trajectory_summary = tail_excerpt(last_reply);
  outcome.verdict.raw = last_reply;
  if (events)
    events->emit({{"kind", "verdict"},
                  {"run", run_id},
                  {"verdict", outcome.verdict.to_json()},
                  {"degraded", true}});
  return outcome;
}

NextAction apply_verdict(const AttemptState& state, const VerifierVerdict& verdict) {
  switch (verdict.decision) {
    case VerifyDecision::success:
      if (state.early_stop) return NextAction::finish_attempt;
      return state.budget_remaining ? NextAction::new_attempt : NextAction::finish_attempt;
    case VerifyDecision::continue_current:
      return NextAction::resume_same;
    case VerifyDecision::pivot:
      return state.budget_remaining ? NextAction::new_attempt : NextAction::finish_attempt;
  }
  return NextAction::finish_attempt;
}

std::vector<AnswerCandidate> candidates_from_attempts(const std::vector<AttemptRecord>& attempts) {
  std::vector<AnswerCandidate> successes;
  std::vector<AnswerCandidate> all;
  for (const auto& a : attempts) {
    AnswerCandidate c;
    c.index = a.index;
    c.answer = a.answer;
    c.success = a.verdict.decision == VerifyDecision::success;
    c.context = a.verdict.trajectory_summary.empty()
                    ? a.verdict.verification
                    : a.verdict.trajectory_summary;
    if (!a.verdict.justification.empty()) c.context += "\nVerdict: " + a.verdict.justification;
    all.push_back(c);
    if (c.success) successes.push_back(c);
  }
  // Verified answers are the candidate pool; when none passed, every
  // attempt's final answer is on the table.
  return successes.empty() ? all : successes;
}

namespace {

std::string normalized(const std::string& s) {
  std::string out;
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return out;
  std::size_t e = s.find_last_not_of(" \t\r\n");
  for (std::size_t i = b; i <= e; ++i)
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(s[i])));
  return out;
}

std::optional<int> parse_boxed_letter(const std::string& reply, int option_count) {
  auto pos = reply.rfind("\\boxed{");
  if (pos == std::string::npos) return std::nullopt;
  pos += 7;
  while (pos < reply.size() && reply[pos] == ' ') ++pos;
  if (pos >= reply.size()) return std::nullopt;
  char c = static_cast<char>(std::toupper(static_cast<unsigned char>(reply[pos])));
  if (c < 'A' || c >= 'A' + option_count) return std::nullopt;
  return c - 'A';
}

const AnswerCandidate& fallback_candidate(const std::vector<AnswerCandidate>& candidates) {
  // Most-informed attempt: highest index among SUCCESS candidates, then
  // highest index with a non-"None" answer, then the last one.
  const AnswerCandidate* best = nullptr;
  for (const auto& c : candidates)
    if (c.success && (!best || c.index > best->index)) best = &c;
  if (best) return *best;
  for (const auto& c : candidates)
    if (normalized(c.answer) != "none" && (!best || c.index > best->index)) best = &c;
  return best ? *best : candidates.back();
}

}  // namespace

SelectionResult select_final(const std::vector<AnswerCandidate>& candidates, LlmClient& judge,
                             const std::string& question, EventLog* events,
                             const std::string& run_id, bool majority_prompt) {
  if (candidates.empty()) throw EmptyInputError("select_final: no candidates");
  SelectionResult result;
  if (candidates.size() == 1) {
    result.answer = candidates.front().answer;
    return result;
  }

  std::vector<std::pair<std::string, std::string>> options;
  for (const auto& c : candidates) options.emplace_back(c.answer, c.context);

  LlmRequest req;
  req.system =
      majority_prompt ? prompts::majority_vote_system_prompt() : prompts::best_of_n_system_prompt();
  req.temperature = 0.0;  // deterministic selection
  req.turns.push_back({"user", prompts::lettered_options(question, options)});

  result.used_judge = true;
  for (int attempt = 0; attempt < 2; ++attempt) {
    LlmResponse resp = judge.chat(req);
    result.judge_usage += resp.usage;
    if (events)
      events->emit({{"kind", "chat"},
                    {"run", run_id},
                    {"role", "judge"},
                    {"billed", false},
                    {"tokens", resp.usage.to_json()},
                    {"reply_digest", digest_hex(resp.text)}});
    auto pick = parse_boxed_letter(resp.text, static_cast<int>(candidates.size()));
    if (pick && normalized(candidates[*pick].answer) != "none") {
      result.answer = candidates[*pick].answer;
      return result;
    }
    req.turns.push_back({"assistant", resp.text});
    req.turns.push_back({"user", pick ? "You should never choose \"None\". Choose the best "
                                        "non-None option and output its letter inside a box."
                                      : "Output the letter of the best option inside a box, "
                                        "for example \\boxed{A}."});
  }
  result.answer = fallback_candidate(candidates).answer;
  return result;
}

}  // namespace bats
