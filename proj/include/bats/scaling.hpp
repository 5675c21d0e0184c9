#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bats/agent.hpp"
#include "bats/cost.hpp"
#include "bats/verify.hpp"

namespace bats {

enum class ScalingKind { none, sequential, parallel };

const char* scaling_name(ScalingKind s);
ScalingKind scaling_from_name(const std::string& name);

/// How parallel runs aggregate their answers.
enum class Aggregation { majority, best_of_n, pass_at_n };

const char* aggregation_name(Aggregation a);
Aggregation aggregation_from_name(const std::string& name);

struct RunPolicy {
  Mode mode = Mode::react;
  ScalingKind scaling = ScalingKind::none;
  BudgetVector budgets;
  int parallel_n = 1;
  bool early_stop = false;
  std::vector<std::uint64_t> seeds;
  Aggregation aggregation = Aggregation::majority;

  void validate() const;
  /// Scalar group key for curve/report rows: the largest per-tool limit.
  std::int64_t budget_level() const;
  std::string label() const;

  nlohmann::json to_json() const;
  static RunPolicy from_json(const nlohmann::json& j);
};

/// The per-question observable: final answer, realized tool counts, exact
/// cost, and the attempt history.
struct RunRecord {
  std::string question_id;
  RunPolicy policy;
  std::string answer;
  std::optional<bool> correct;  // unset = ungraded
  CostBreakdown cost;
  std::map<std::string, std::int64_t> tool_counts;
  std::vector<AttemptRecord> attempts;
  RunStatus status = RunStatus::answered;
  bool over_budget = false;  // some tool hit its limit
  std::int64_t wall_ms = 0;
  std::uint64_t seed = 0;
  std::string error;  // provider failure note; answer is "None" then

  nlohmann::json to_json() const;
  static RunRecord from_json(const nlohmann::json& j);
};

/// Sequential-scaling hooks: whenever the model answers with budget left,
/// the forcing message goes in verbatim and the run continues. Forcing stops
/// after five consecutive tool-free iterations, after which the loop asks
/// for the final answer.
class SequentialForcer : public LoopHooks {
 public:
  explicit SequentialForcer(BudgetLedger& ledger, int refusal_limit = 5)
      : ledger_(ledger), refusal_limit_(refusal_limit) {}

  AnswerDecision on_answer(Trajectory& trajectory, const std::string& answer) override;
  void on_iteration_end(Trajectory& trajectory, bool issued_tool_code) override;
  bool wants_final_answer() override;

  int forcings_injected() const { return forcings_; }

 private:
  BudgetLedger& ledger_;
  int refusal_limit_;
  int forcings_ = 0;
  int first_forcing_iteration_ = 0;
  int tool_free_streak_ = 0;
  bool stopped_ = false;
};

struct SingleRun {
  Trajectory trajectory;
  std::map<std::string, std::int64_t> tool_counts;
  CostBreakdown cost;
  bool over_budget = false;
};

/// Builds the provider bundle for one run seed (parallel runs get fresh,
/// independently seeded providers).
using ProviderFactory = std::function<ProviderSet(std::uint64_t seed)>;

/// N independent fixed-budget runs, nothing shared: each gets a fresh
/// ledger and its own providers. Runs execute concurrently up to
/// max_workers; results and events come back in seed order.
std::vector<SingleRun> parallel_runs(const std::string& question,
                                     const std::string& question_id, const RunPolicy& policy,
                                     const AgentConfig& config, const ProviderFactory& providers,
                                     const PricingTable& pricing, EventLog* events = nullptr,
                                     int max_workers = 1);

/// Exact-mode majority vote: normalize (trim + casefold), count, ties break
/// to the earliest first occurrence. Returns the trimmed representative.
std::string majority_vote_exact(const std::vector<std::string>& answers);

/// Judge-mode majority vote over lettered options; falls back to exact mode
/// when the boxed letter cannot be parsed.
std::string majority_vote(const std::vector<std::string>& answers, LlmClient* judge,
                          const std::string& question, EventLog* events = nullptr,
                          const std::string& run_id = {});

/// 1 if any answer grades correct, else 0. Monotone in the answer list.
int pass_at_n(const std::vector<std::string>& answers,
              const std::function<bool(const std::string&)>& grade_answer);

/// The budget-exhausting multi-attempt run: one shared ledger, attempts
/// driven by the verification decision machine, final answer selected
/// across verified candidates. early_stop finishes at the first SUCCESS.
RunRecord bats_run(const std::string& question, const std::string& question_id,
                   const RunPolicy& policy, const AgentConfig& config,
                   const ProviderSet& providers, const PricingTable& pricing,
                   EventLog* events = nullptr);

/// Dispatches one question under the policy (single / sequential / parallel
/// / bats). The gold-answer grader is only consulted for pass@N aggregation.
RunRecord execute_question(const std::string& question, const std::string& question_id,
                           const RunPolicy& policy, const AgentConfig& config,
                           const ProviderFactory& providers, const PricingTable& pricing,
                           EventLog* events = nullptr, int max_workers = 1,
                           const std::function<bool(const std::string&)>& grade_answer = {});

}  // namespace bats
