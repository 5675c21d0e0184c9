#include "bats/scaling.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <thread>

#include "bats/plan.hpp"
#include "bats/prompts.hpp"

namespace bats {

const char* scaling_name(ScalingKind s) {
  switch (s) {
    case ScalingKind::none: return "none";
    case ScalingKind::sequential: return "sequential";
    case ScalingKind::parallel: return "parallel";
  }
  return "none";
}

ScalingKind scaling_from_name(const std::string& name) {
  if (name == "none") return ScalingKind::none;
  if (name == "sequential") return ScalingKind::sequential;
  if (name == "parallel") return ScalingKind::parallel;
  throw std::invalid_argument("unknown scaling: " + name);
}

const char* aggregation_name(Aggregation a) {
  switch (a) {
    case Aggregation::majority: return "majority";
    case Aggregation::best_of_n: return "best_of_n";
    case Aggregation::pass_at_n: return "pass_at_n";
  }
  return "majority";
}

Aggregation aggregation_from_name(const std::string& name) {
  if (name == "majority") return Aggregation::majority;
  if (name == "best_of_n") return Aggregation::best_of_n;
  if (name == "pass_at_n") return Aggregation::pass_at_n;
  throw std::invalid_argument("unknown aggregation: " + name);
}

void RunPolicy::validate() const {
  if (parallel_n < 1) throw std::invalid_argument("policy: parallel_n must be >= 1");
  if (mode == Mode::bats && scaling != ScalingKind::none)
    throw std::invalid_argument("policy: bats mode runs its own attempt schedule");
  if (budgets.limits.empty()) throw std::invalid_argument("policy: budgets missing");
}

std::int64_t RunPolicy::budget_level() const {
  std::int64_t level = 0;
  for (const auto& [tool, limit] : budgets.limits) level = std::max(level, limit);
  return level;
}

std::string RunPolicy::label() const {
  std::string out = mode_name(mode);
  if (scaling == ScalingKind::sequential) out += "+sequential";
  if (scaling == ScalingKind::parallel)
    out += "+parallel[" + std::string(aggregation_name(aggregation)) + "]";
  if (early_stop) out += "+early_stop";
  return out;
}

nlohmann::json RunPolicy::to_json() const {
  nlohmann::json budgets_json = nlohmann::json::object();
  for (const auto& [tool, limit] : budgets.limits) budgets_json[tool] = limit;
  return {{"mode", mode_name(mode)},
          {"scaling", scaling_name(scaling)},
          {"budgets", budgets_json},
          {"parallel_n", parallel_n},
          {"early_stop", early_stop},
          {"seeds", seeds},
          {"aggregation", aggregation_name(aggregation)}};
}

RunPolicy RunPolicy::from_json(const nlohmann::json& j) {
  RunPolicy p;
  p.mode = mode_from_name(j.value("mode", std::string("react")));
  p.scaling = scaling_from_name(j.value("scaling", std::string("none")));
  if (j.contains("budgets"))
    for (const auto& [tool, limit] : j.at("budgets").items())
      p.budgets.limits[tool] = limit.get<std::int64_t>();
  p.parallel_n = j.value("parallel_n", 1);
  p.early_stop = j.value("early_stop", false);
  if (j.contains("seeds")) p.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  p.aggregation = aggregation_from_name(j.value("aggregation", std::string("majority")));
  return p;
}

nlohmann::json RunRecord::to_json() const {
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [tool, n] : tool_counts) counts[tool] = n;
  nlohmann::json attempts_json = nlohmann::json::array();
  for (const auto& a : attempts) attempts_json.push_back(a.to_json());
  nlohmann::json j = {{"schema_version", 1},
                      {"id", question_id},
                      {"policy", policy.to_json()},
                      {"budget_level", policy.budget_level()},
                      {"answer", answer},
                      {"cost", cost.to_json()},
                      {"tool_counts", counts},
                      {"attempts", attempts_json},
                      {"status", run_status_name(status)},
                      {"over_budget", over_budget},
                      {"wall_ms", wall_ms},
                      {"seed", seed}};
  if (correct.has_value()) j["correct"] = *correct;
  if (!error.empty()) j["error"] = error;
  return j;
}

RunRecord RunRecord::from_json(const nlohmann::json& j) {
  RunRecord r;
  r.question_id = j.at("id").get<std::string>();
  r.policy = RunPolicy::from_json(j.at("policy"));
  r.answer = j.value("answer", std::string());
  if (j.contains("correct")) r.correct = j.at("correct").get<bool>();
  if (j.contains("cost")) r.cost = CostBreakdown::from_json(j.at("cost"));
  if (j.contains("tool_counts"))
    for (const auto& [tool, n] : j.at("tool_counts").items())
      r.tool_counts[tool] = n.get<std::int64_t>();
  const std::string status = j.value("status", std::string("answered"));
  if (status == "budget_exhausted") r.status = RunStatus::budget_exhausted;
  else if (status == "max_iterations") r.status = RunStatus::max_iterations;
  else r.status = RunStatus::answered;
  r.over_budget = j.value("over_budget", false);
  r.wall_ms = j.value("wall_ms", std::int64_t{0});
  r.seed = j.value("seed", std::uint64_t{0});
  r.error = j.value("error", std::string());
  return r;
}

AnswerDecision SequentialForcer::on_answer(Trajectory& trajectory, const std::string& answer) {
  (void)answer;
  if (stopped_ || ledger_.all_exhausted()) return {};  // finish
  bool any_left = false;
  for (const auto& t : ledger_.snapshot().tools)
    if (t.remaining > 0) any_left = true;
  if (!any_left) return {};
  ++forcings_;
  if (first_forcing_iteration_ == 0) first_forcing_iteration_ = trajectory.iterations;
  AnswerDecision d;
  d.kind = AnswerDecision::Kind::inject_message;
  d.text = prompts::kForcingMessage;
  return d;
}

void SequentialForcer::on_iteration_end(Trajectory& trajectory, bool issued_tool_code) {
  if (first_forcing_iteration_ == 0 || stopped_) return;
  // Only iterations after the first forcing count toward the refusal streak.
  if (trajectory.iterations <= first_forcing_iteration_) return;
  tool_free_streak_ = issued_tool_code ? 0 : tool_free_streak_ + 1;
  if (tool_free_streak_ >= refusal_limit_) stopped_ = true;
}

bool SequentialForcer::wants_final_answer() { return stopped_; }

namespace {

std::string normalized_answer(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  std::string out;
  for (std::size_t i = b; i <= e; ++i)
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(s[i])));
  return out;
}

std::string trimmed(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool ledger_over_budget(const BudgetLedger& ledger) {
  for (const auto& t : ledger.snapshot().tools)
    if (t.limit > 0 && t.used >= t.limit) return true;
  return false;
}

SingleRun run_single(const std::string& question, const std::string& run_id,
                     const RunPolicy& policy, const AgentConfig& config,
                     const ProviderSet& providers, const PricingTable& pricing,
                     EventLog* events) {
  BudgetLedger ledger(ToolSet::search_agent_default(), policy.budgets);
  if (events) {
    EventLog* sink = events;
    std::string id = run_id;
    ledger.set_event_sink([sink, id](nlohmann::json e) {
      e["run"] = id;
      sink->emit(std::move(e));
    });
  }
  RunInput input{run_id, question, ""};
  SingleRun out;
  if (policy.scaling == ScalingKind::sequential) {
    SequentialForcer forcer(ledger);
    out.trajectory = run_react(input, ledger, config, providers, events, &forcer);
  } else {
    out.trajectory = run_react(input, ledger, config, providers, events, nullptr);
  }
  out.tool_counts = ledger.used_counts();
  out.cost = unified_cost(out.trajectory.usage, out.tool_counts, pricing);
  out.over_budget = ledger_over_budget(ledger);
  return out;
}

}  // namespace

std::vector<SingleRun> parallel_runs(const std::string& question, const std::string& question_id,
                                     const RunPolicy& policy, const AgentConfig& config,
                                     const ProviderFactory& providers,
                                     const PricingTable& pricing, EventLog* events,
                                     int max_workers) {
  const int n = policy.parallel_n;
  std::vector<std::uint64_t> seeds = policy.seeds;
  while (static_cast<int>(seeds.size()) < n)
    seeds.push_back(seeds.empty() ? 1 : seeds.back() + 1);

  std::vector<SingleRun> runs(static_cast<std::size_t>(n));
  std::vector<EventLog> run_events(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      ProviderSet set = providers(seeds[static_cast<std::size_t>(i)]);
      const std::string run_id = question_id + "#" + std::to_string(i + 1);
      runs[static_cast<std::size_t>(i)] =
          run_single(question, run_id, policy, config, set,
                     pricing, events ? &run_events[static_cast<std::size_t>(i)] : nullptr);
    }
  };
  const int workers = std::max(1, std::min(max_workers, n));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  // Per-run buffers flush in seed order so logs replay identically no matter
  // how the workers interleaved.
  if (events)
    for (const auto& log : run_events) events->absorb(log);
  return runs;
}

std::string majority_vote_exact(const std::vector<std::string>& answers) {
  if (answers.empty()) throw EmptyInputError("majority_vote: no answers");
  std::vector<std::string> keys;
  std::vector<int> counts;
  std::vector<std::size_t> first_seen;
  for (std::size_t i = 0; i < answers.size(); ++i) {
    const std::string key = normalized_answer(answers[i]);
    auto it = std::find(keys.begin(), keys.end(), key);
    if (it == keys.end()) {
      keys.push_back(key);
      counts.push_back(1);
      first_seen.push_back(i);
    } else {
      ++counts[static_cast<std::size_t>(it - keys.begin())];
    }
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < keys.size(); ++k) {
    if (counts[k] > counts[best]) best = k;  // ties keep the earliest
  }
  return trimmed(answers[first_seen[best]]);
}

std::string majority_vote(const std::vector<std::string>& answers, LlmClient* judge,
                          const std::string& question, EventLog* events,
                          const std::string& run_id) {
  if (answers.empty()) throw EmptyInputError("majority_vote: no answers");
  if (!judge || answers.size() == 1) return majority_vote_exact(answers);
  std::vector<AnswerCandidate> candidates;
  for (std::size_t i = 0; i < answers.size(); ++i)
    candidates.push_back(AnswerCandidate{static_cast<int>(i + 1), answers[i], "", false});
  try {
    SelectionResult sel = select_final(candidates, *judge, question, events, run_id,
                                       /*majority_prompt=*/true);
    return sel.answer;
  } catch (const std::exception&) {
    return majority_vote_exact(answers);
  }
}

int pass_at_n(const std::vector<std::string>& answers,
              const std::function<bool(const std::string&)>& grade_answer) {
  for (const auto& a : answers)
    if (grade_answer(a)) return 1;
  return 0;
}

namespace {

std::string details_guidance(const nlohmann::json& details) {
  if (!details.is_object() || details.empty()) return {};
  std::string out;
  for (const auto& [key, value] : details.items()) {
    out += key;
    out += ": ";
    out += value.is_string() ? value.get<std::string>() : value.dump();
    out += "\n";
  }
  return out;
}

/// Verification wiring for one BATS attempt: every proposed answer goes to
/// the verifier; CONTINUE resumes (substituting a summary once K iterations
/// have elapsed since the last one), SUCCESS/PIVOT end the attempt.
class BatsHooks : public LoopHooks {
 public:
  BatsHooks(const std::string& question, BudgetLedger& ledger, const ProviderSet& providers,
            const AgentConfig& config, bool early_stop, EventLog* events, std::string run_id)
      : question_(question),
        ledger_(ledger),
        providers_(providers),
        config_(config),
        early_stop_(early_stop),
        events_(events),
        run_id_(std::move(run_id)) {}

  AnswerDecision on_answer(Trajectory& trajectory, const std::string& answer) override {
    snapshot_at_verdict_ = ledger_.snapshot();
    VerifyOutcome outcome =
        verify(question_, render_context_text(trajectory, config_), answer,
               snapshot_at_verdict_, providers_.verifier_llm(), events_, run_id_);
    trajectory.usage += outcome.usage;
    verdict_ = outcome.verdict;
    verified_answer_ = answer;
    has_verdict_ = true;

    AttemptState state{early_stop_, !ledger_.all_exhausted()};
    action_ = apply_verdict(state, verdict_);
    if (events_)
      events_->emit({{"kind", "verdict_action"},
                     {"run", run_id_},
                     {"decision", decision_name(verdict_.decision)},
                     {"action", next_action_name(action_)}});

    if (action_ != NextAction::resume_same) return {};  // attempt ends here

    const int since_summary = trajectory.iterations - trajectory.iteration_at_last_summary;
    AnswerDecision d;
    if (since_summary >= config_.summarize_interval) {
      d.kind = AnswerDecision::Kind::replace_with_summary;
      d.text = verdict_.trajectory_summary;
      const std::string guidance = details_guidance(verdict_.details);
      if (!guidance.empty()) d.text += "\n" + guidance;
    } else {
      d.kind = AnswerDecision::Kind::inject_message;
      d.text = "Your proposed answer did not pass verification. " + verdict_.justification +
               " Continue investigating with the remaining budget.";
    }
    return d;
  }

  bool has_verdict() const { return has_verdict_; }
  const VerifierVerdict& verdict() const { return verdict_; }
  const std::string& verified_answer() const { return verified_answer_; }
  NextAction action() const { return action_; }
  const BudgetSnapshot& snapshot_at_verdict() const { return snapshot_at_verdict_; }

 private:
  const std::string& question_;
  BudgetLedger& ledger_;
  const ProviderSet& providers_;
  const AgentConfig& config_;
  bool early_stop_;
  EventLog* events_;
  std::string run_id_;
  VerifierVerdict verdict_;
  std::string verified_answer_;
  BudgetSnapshot snapshot_at_verdict_;
  bool has_verdict_ = false;
  NextAction action_ = NextAction::finish_attempt;
};

std::string pivot_seed_context(const VerifierVerdict& verdict, const BudgetLedger& ledger) {
  std::string out = "Summary of the previous attempt:\n" + verdict.trajectory_summary + "\n";
  const std::string guidance = details_guidance(verdict.details);
  if (!guidance.empty()) out += guidance;
  out += "\nCurrent budget:\n" + render_budget_block(ledger.snapshot());
  return out;
}

}  // namespace

RunRecord bats_run(const std::string& question, const std::string& question_id,
                   const RunPolicy& policy, const AgentConfig& config,
                   const ProviderSet& providers, const PricingTable& pricing, EventLog* events) {
  const auto started = std::chrono::steady_clock::now();
  BudgetLedger ledger(ToolSet::search_agent_default(), policy.budgets);
  if (events) {
    EventLog* sink = events;
    std::string id = question_id;
    ledger.set_event_sink([sink, id](nlohmann::json e) {
      e["run"] = id;
      sink->emit(std::move(e));
    });
  }

  RunRecord record;
  record.question_id = question_id;
  record.policy = policy;

  TokenUsage total_usage;

  // Constraint decomposition happens once; later attempts inherit it.
  DecomposeResult decomposition = decompose_constraints(question, *providers.llm);
  total_usage += decomposition.usage;
  if (events) {
    events->emit({{"kind", "chat"},
                  {"run", question_id},
                  {"role", "decompose"},
                  {"billed", true},
                  {"tokens", decomposition.usage.to_json()}});
    events->emit({{"kind", "constraints"},
                  {"run", question_id},
                  {"exploration", decomposition.constraints.exploration},
                  {"verification", decomposition.constraints.verification},
                  {"degraded", decomposition.degraded}});
  }

  std::string seed_context;
  bool done = false;
  RunStatus last_status = RunStatus::answered;
  while (!done) {
    if (!record.attempts.empty() && ledger.all_exhausted()) break;  // nothing left to spend

    const int attempt_index = static_cast<int>(record.attempts.size()) + 1;
    const std::string attempt_id = question_id + "@" + std::to_string(attempt_index);
    const auto used_before = ledger.used_counts();

    BatsHooks hooks(question, ledger, providers, config, policy.early_stop, events,
                    attempt_id);
    RunInput input{attempt_id, question, seed_context};
    Trajectory traj = run_react(input, ledger, config, providers, events, &hooks);
    total_usage += traj.usage;
    last_status = traj.status;

    // Every attempt ends with a verdict. Attempts that terminated outside
    // the answer hook (budget exhaustion, iteration cap) or whose forced
    // final answer was never checked get a forced verification pass.
    VerifierVerdict verdict;
    BudgetSnapshot at_verdict = ledger.snapshot();
    NextAction action = NextAction::finish_attempt;
    if (hooks.has_verdict() && hooks.verified_answer() == traj.final_answer) {
      verdict = hooks.verdict();
      at_verdict = hooks.snapshot_at_verdict();
      action = hooks.action();
    } else {
      VerifyOutcome outcome =
          verify(question, render_context_text(traj, config),
                 traj.final_answer.empty() ? "None" : traj.final_answer, at_verdict,
                 providers.verifier_llm(), events, attempt_id);
      traj.usage += outcome.usage;
      total_usage += outcome.usage;
      verdict = outcome.verdict;
      action = NextAction::finish_attempt;
    }

    AttemptRecord attempt;
    attempt.index = attempt_index;
    attempt.answer = traj.final_answer.empty() ? "None" : traj.final_answer;
    attempt.verdict = verdict;
    attempt.ledger_at_verdict = at_verdict;
    attempt.usage = traj.usage;
    record.attempts.push_back(attempt);
    if (events)
      events->emit({{"kind", "attempt_end"},
                    {"run", question_id},
                    {"attempt", attempt.to_json()}});

    // Attempts that spent nothing and did not succeed would loop forever;
    // stop the run instead.
    const bool spent_nothing = ledger.used_counts() == used_before;
    const bool success = verdict.decision == VerifyDecision::success;
    if (policy.early_stop && success) break;
    if (traj.status != RunStatus::answered) break;  // exhausted or capped
    if (spent_nothing && !success) break;

    switch (action) {
      case NextAction::new_attempt:
        if (verdict.decision == VerifyDecision::pivot) {
          seed_context = pivot_seed_context(verdict, ledger);
          if (events)
            events->emit({{"kind", "pivot_seed"},
                          {"run", question_id},
                          {"attempt", attempt_index},
                          {"before_chars", render_context_text(traj, config).size()},
                          {"seed_chars", seed_context.size()}});
        } else {
          seed_context.clear();  // fresh sequence after a verified success
        }
        break;
      case NextAction::finish_attempt:
      case NextAction::resume_same:  // resume ended some other way; stop
        done = true;
        break;
    }
  }

  record.tool_counts = ledger.used_counts();
  record.cost = unified_cost(total_usage, record.tool_counts, pricing);
  record.status = last_status;
  record.over_budget = ledger_over_budget(ledger);
  record.seed = policy.seeds.empty() ? 0 : policy.seeds.front();

  std::vector<AnswerCandidate> candidates = candidates_from_attempts(record.attempts);
  SelectionResult selection =
      select_final(candidates, providers.judge_llm(), question, events, question_id);
  record.answer = selection.answer;

  record.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - started)
                       .count();
  return record;
}

RunRecord execute_question(const std::string& question, const std::string& question_id,
                           const RunPolicy& policy, const AgentConfig& config,
                           const ProviderFactory& providers, const PricingTable& pricing,
                           EventLog* events, int max_workers,
                           const std::function<bool(const std::string&)>& grade_answer) {
  policy.validate();
  const auto started = std::chrono::steady_clock::now();
  const std::uint64_t base_seed = policy.seeds.empty() ? 1 : policy.seeds.front();

  if (policy.mode == Mode::bats)
    return bats_run(question, question_id, policy, config, providers(base_seed), pricing, events);

  RunRecord record;
  record.question_id = question_id;
  record.policy = policy;
  record.seed = base_seed;

  if (policy.scaling == ScalingKind::parallel) {
    std::vector<SingleRun> runs =
        parallel_runs(question, question_id, policy, config, providers, pricing, events,
                      max_workers);
    CostBreakdown total;
    std::vector<std::string> answers;
    for (const auto& r : runs) {
      answers.push_back(r.trajectory.final_answer.empty() ? "None" : r.trajectory.final_answer);
      total.token_cost += r.cost.token_cost;
      for (const auto& [tool, c] : r.cost.tool_cost) {
        auto [it, inserted] = total.tool_cost.emplace(tool, c);
        if (!inserted) it->second += c;
      }
      total.total += r.cost.total;
      for (const auto& [tool, n] : r.tool_counts) record.tool_counts[tool] += n;
      record.over_budget = record.over_budget || r.over_budget;
    }
    record.cost = total;
    record.status = runs.back().trajectory.status;

    switch (policy.aggregation) {
      case Aggregation::majority: {
        ProviderSet judge_set = providers(base_seed);
        record.answer = majority_vote(answers, judge_set.judge ? judge_set.judge.get() : nullptr,
                                      question, events, question_id);
        break;
      }
      case Aggregation::best_of_n: {
        std::vector<AnswerCandidate> candidates;
        for (std::size_t i = 0; i < runs.size(); ++i) {
          AnswerCandidate c;
          c.index = static_cast<int>(i + 1);
          c.answer = answers[i];
          std::string context = render_context_text(runs[i].trajectory, config);
          if (context.size() > 2000) context = context.substr(context.size() - 2000);
          c.context = context;
          candidates.push_back(std::move(c));
        }
        ProviderSet judge_set = providers(base_seed);
        record.answer =
            select_final(candidates, judge_set.judge_llm(), question, events, question_id).answer;
        break;
      }
      case Aggregation::pass_at_n: {
        if (!grade_answer)
          throw std::invalid_argument("pass_at_n aggregation needs a grader");
        record.correct = pass_at_n(answers, grade_answer) == 1;
        std::string first_correct;
        for (const auto& a : answers)
          if (grade_answer(a)) { first_correct = a; break; }
        record.answer = first_correct.empty() ? answers.front() : first_correct;
        break;
      }
    }
    record.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - started)
                         .count();
    return record;
  }

  SingleRun run = run_single(question, question_id, policy, config, providers(base_seed),
                             pricing, events);
  record.answer = run.trajectory.final_answer.empty() ? "None" : run.trajectory.final_answer;
  record.cost = run.cost;
  record.tool_counts = run.tool_counts;
  record.status = run.trajectory.status;
  record.over_budget = run.over_budget;
  record.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - started)
                       .count();
  return record;
}

}  // namespace bats
