// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exit code is the number of
// failed criteria. Criterion 12 (live smoke) only runs when
// BATS_LIVE_MANIFEST points at a manifest with http providers.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "bats/bench.hpp"
#include "bats/mock_llm.hpp"
#include "bats/scaling.hpp"
#include "bats/world.hpp"

using namespace bats;

namespace {

struct CheckFailure : std::runtime_error {
  explicit CheckFailure(const std::string& what) : std::runtime_error(what) {}
};

void require(bool condition, const std::string& what) {
  if (!condition) throw CheckFailure(what);
}

std::string search_code(const std::vector<std::string>& queries) {
  nlohmann::json call = {{"name", "search"}, {"arguments", {{"query", queries}}}};
  return "<tool_code>" + call.dump() + "</tool_code>";
}

std::string browse_code(const std::vector<std::string>& urls) {
  nlohmann::json call = {{"name", "browse"},
                         {"arguments", {{"url", urls}, {"goal", "inspect"}}}};
  return "<tool_code>" + call.dump() + "</tool_code>";
}

std::string verdict_json(const std::string& decision, const std::string& summary,
                         const std::string& details = "{}") {
  return std::string("{\"verification\": \"v\", \"decision\": \"") + decision +
         "\", \"justification\": \"j\", \"trajectory_summary\": \"" + summary +
         "\", \"details\": " + details + "}";
}

ProviderSet scripted_set(std::vector<ScriptedTurn> agent,
                         std::vector<ScriptedTurn> verifier = {},
                         std::vector<ScriptedTurn> judge = {}) {
  ProviderSet set;
  set.llm = std::make_shared<ScriptedLlm>(std::move(agent));
  if (!verifier.empty()) set.verifier = std::make_shared<ScriptedLlm>(std::move(verifier));
  if (!judge.empty()) set.judge = std::make_shared<ScriptedLlm>(std::move(judge));
  auto world = std::make_shared<EmptySearchWorld>();
  set.search = world;
  set.browse = world;
  return set;
}

BudgetVector uniform_budgets(std::int64_t limit) {
  return BudgetVector::uniform(ToolSet::search_agent_default(), limit);
}

// ---------------------------------------------------------------------------
// criterion 1: budget safety under fuzzed scripted policies

void criterion_budget_safety() {
  const auto started = std::chrono::steady_clock::now();
  std::mt19937_64 master(20240817);
  for (int run = 0; run < 1000; ++run) {
    std::uniform_int_distribution<std::int64_t> limit_dist(1, 100);
    BudgetVector budgets;
    budgets.limits["search"] = limit_dist(master);
    budgets.limits["browse"] = limit_dist(master);
    BudgetLedger ledger(ToolSet::search_agent_default(), budgets);

    // Every observable instant: reservation events carry post-state.
    const std::int64_t search_limit = budgets.limits["search"];
    const std::int64_t browse_limit = budgets.limits["browse"];
    std::int64_t last_search = 0, last_browse = 0;
    ledger.set_event_sink([&](nlohmann::json e) {
      const std::int64_t used = e.at("used_after").get<std::int64_t>();
      const bool searchy = e.at("tool") == "search";
      const std::int64_t limit = searchy ? search_limit : browse_limit;
      std::int64_t& last = searchy ? last_search : last_browse;
      require(used <= limit, "used exceeded limit inside a run");
      require(used >= last, "usage went backwards");
      last = used;
    });

    auto rng = std::make_shared<std::mt19937_64>(master());
    auto policy = std::make_shared<CallbackLlm>([rng](const LlmRequest&) -> std::string {
      std::uniform_int_distribution<int> action(0, 9);
      std::uniform_int_distribution<int> batch(1, 8);
      const int a = action(*rng);
      if (a < 5) {
        std::vector<std::string> queries;
        for (int i = 0; i < batch(*rng); ++i) queries.push_back("q" + std::to_string((*rng)()));
        return "<think>poke</think>\n" + search_code(queries);
      }
      if (a < 8) {
        std::vector<std::string> urls;
        for (int i = 0; i < batch(*rng); ++i)
          urls.push_back("http://x/" + std::to_string((*rng)()));
        return "<think>peek</think>\n" + browse_code(urls);
      }
      if (a == 8) return "<think>mull</think>";
      return "<answer>guess</answer>";
    });

    ProviderSet providers;
    providers.llm = policy;
    auto world = std::make_shared<EmptySearchWorld>();
    providers.search = world;
    providers.browse = world;

    AgentConfig config =
        AgentConfig::for_mode(run % 2 ? Mode::react_tracker : Mode::react);
    config.max_iterations = 20;
    Trajectory traj = run_react({"fuzz", "fuzz question", ""}, ledger, config, providers);
    require(ledger.used("search") <= search_limit, "final search usage exceeded limit");
    require(ledger.used("browse") <= browse_limit, "final browse usage exceeded limit");
    (void)traj;
  }
  const auto elapsed =
      std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() - started);
  require(elapsed.count() < 60, "fuzz exceeded the one-minute budget");
}

// ---------------------------------------------------------------------------
// the deterministic mock battery shared by criteria 2 and 11

struct BatteryRun {
  std::string name;
  RunRecord record;
  std::vector<nlohmann::json> events;
  std::string event_text;
  PricingTable pricing;
};

PricingTable battery_pricing() {
  PricingTable p = PricingTable::default_tools();
  p.input_rate = Money(200, 1000000);
  p.output_rate = Money(600, 1000000);
  p.cache_hit_rate = Money(100, 1000000);
  return p;
}

std::vector<BatteryRun> run_mock_battery() {
  std::vector<BatteryRun> out;
  const PricingTable pricing = battery_pricing();

  {  // plain react, scripted
    BatteryRun b{"react_scripted", {}, {}, {}, pricing};
    EventLog events;
    RunPolicy policy;
    policy.mode = Mode::react;
    policy.budgets = uniform_budgets(10);
    AgentConfig config = AgentConfig::for_mode(Mode::react);
    ProviderFactory factory = [](std::uint64_t) {
      return scripted_set({{search_code({"a", "b"}), {}, {}},
                           {browse_code({"http://x"}), {}, {}},
                           {"<answer>done</answer>", {}, {}}});
    };
    b.record = execute_question("q", "battery-react", policy, config, factory, pricing, &events);
    b.events = events.entries();
    b.event_text = events.text();
    out.push_back(std::move(b));
  }
  {  // tracker mode over a synthetic world
    BatteryRun b{"tracker_world", {}, {}, {}, pricing};
    EventLog events;
    auto world = std::make_shared<SyntheticWorld>(
        SyntheticWorld::build({101, 4, 3, HopMode::search_only}));
    RunPolicy policy;
    policy.mode = Mode::react_tracker;
    policy.budgets = uniform_budgets(6);
    AgentConfig config = AgentConfig::for_mode(Mode::react_tracker);
    ProviderFactory factory = [world](std::uint64_t) {
      ProviderSet set;
      set.llm = make_world_solver_llm(world, SolverStyle::budget_aware);
      set.search = world;
      set.browse = world;
      return set;
    };
    b.record =
        execute_question(world->question(), "battery-world", policy, config, factory, pricing,
                         &events);
    b.events = events.entries();
    b.event_text = events.text();
    out.push_back(std::move(b));
  }
  {  // sequential forcing
    BatteryRun b{"sequential", {}, {}, {}, pricing};
    EventLog events;
    RunPolicy policy;
    policy.mode = Mode::react;
    policy.scaling = ScalingKind::sequential;
    policy.budgets.limits["search"] = 2;
    policy.budgets.limits["browse"] = 0;
    AgentConfig config = AgentConfig::for_mode(Mode::react);
    ProviderFactory factory = [](std::uint64_t) {
      return scripted_set({{"<answer>X</answer>", {}, {}},
                           {search_code({"a"}), {}, {}},
                           {"<answer>Y</answer>", {}, {}},
                           {search_code({"b"}), {}, {}},
                           {"<answer>Z</answer>", {}, {}}});
    };
    b.record = execute_question("q", "battery-seq", policy, config, factory, pricing, &events);
    b.events = events.entries();
    b.event_text = events.text();
    out.push_back(std::move(b));
  }
  {  // parallel majority over world solvers
    BatteryRun b{"parallel", {}, {}, {}, pricing};
    EventLog events;
    auto world = std::make_shared<SyntheticWorld>(
        SyntheticWorld::build({202, 2, 3, HopMode::search_only}));
    RunPolicy policy;
    policy.mode = Mode::react_tracker;
    policy.scaling = ScalingKind::parallel;
    policy.parallel_n = 3;
    policy.seeds = {1, 2, 3};
    policy.budgets = uniform_budgets(4);
    AgentConfig config = AgentConfig::for_mode(Mode::react_tracker);
    ProviderFactory factory = [world](std::uint64_t) {
      ProviderSet set;
      set.llm = make_world_solver_llm(world, SolverStyle::budget_aware);
      set.search = world;
      set.browse = world;
      return set;
    };
    b.record = execute_question(world->question(), "battery-par", policy, config, factory,
                                pricing, &events, /*max_workers=*/2);
    b.events = events.entries();
    b.event_text = events.text();
    out.push_back(std::move(b));
  }
  {  // bats early stop with CONTINUE/PIVOT/SUCCESS verdicts
    BatteryRun b{"bats", {}, {}, {}, pricing};
    EventLog events;
    RunPolicy policy;
    policy.mode = Mode::bats;
    policy.early_stop = true;
    policy.budgets = uniform_budgets(10);
    AgentConfig config = AgentConfig::for_mode(Mode::bats);
    config.summarize_interval = 1;
    ProviderFactory factory = [](std::uint64_t) {
      return scripted_set(
          {{"Exploration:\n- e\nVerification:\n- v", {}, {}},
           {search_code({"a"}), {}, {}},
           {"<answer>A1</answer>", {}, {}},
           {search_code({"b"}), {}, {}},
           {"<answer>A2</answer>", {}, {}},
           {search_code({"c"}), {}, {}},
           {"<answer>A3</answer>", {}, {}}},
          {{verdict_json("CONTINUE", "keep going"), {}, {}},
           {verdict_json("PIVOT", "switch",
                         "{\"Useful information\": \"u\", \"Strategic Recommendations\": \"r\"}"),
            {}, {}},
           {verdict_json("SUCCESS", ""), {}, {}}});
    };
    b.record = execute_question("q", "battery-bats", policy, config, factory, pricing, &events);
    b.events = events.entries();
    b.event_text = events.text();
    out.push_back(std::move(b));
  }
  {  // budget exhaustion with a forced final answer
    BatteryRun b{"exhaustion", {}, {}, {}, pricing};
    EventLog events;
    RunPolicy policy;
    policy.mode = Mode::react_tracker;
    policy.budgets.limits["search"] = 2;
    policy.budgets.limits["browse"] = 0;
    AgentConfig config = AgentConfig::for_mode(Mode::react_tracker);
    ProviderFactory factory = [](std::uint64_t) {
      return scripted_set({{search_code({"a"}), {}, {}},
                           {search_code({"b"}), {}, {}},
                           {search_code({"c"}), {}, {}},
                           {"<answer>forced</answer>", {}, {}}});
    };
    b.record = execute_question("q", "battery-exhaust", policy, config, factory, pricing,
                                &events);
    b.events = events.entries();
    b.event_text = events.text();
    out.push_back(std::move(b));
  }
  return out;
}

void criterion_cost_reconciliation() {
  for (const auto& run : run_mock_battery()) {
    CostBreakdown from_events = cost_from_events(run.events, run.pricing);
    require(from_events.total == run.record.cost.total,
            run.name + ": event-log cost " + from_events.total.to_string() +
                " != online total " + run.record.cost.total.to_string());
    require(from_events.token_cost == run.record.cost.token_cost,
            run.name + ": token cost mismatch");
  }
}

// ---------------------------------------------------------------------------
// criterion 3: tool-price conformance on a real run

void criterion_tool_prices() {
  RunPolicy policy;
  policy.mode = Mode::react;
  policy.budgets = uniform_budgets(20);
  AgentConfig config = AgentConfig::for_mode(Mode::react);
  ProviderFactory factory = [](std::uint64_t) {
    return scripted_set({{search_code({"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"}),
                          {}, {}},
                         {browse_code({"http://one", "http://two"}), {}, {}},
                         {"<answer>done</answer>", {}, {}}});
  };
  PricingTable pricing = PricingTable::default_tools();  // $0.001 per call, zero token rates
  RunRecord record = execute_question("q", "prices", policy, config, factory, pricing);
  require(record.tool_counts.at("search") == 10, "expected exactly 10 searches");
  require(record.tool_counts.at("browse") == 2, "expected exactly 2 browses");
  Money tool_total = record.cost.tool_cost.at("search") + record.cost.tool_cost.at("browse");
  // arithmetic oracle: 12 calls at 1/10 minor unit = 12/10 minor units = $0.012
  require(tool_total == Money(12, 10), "tool cost is not exactly $0.012");
  require(record.cost.total == Money(12, 10), "total includes unexpected token cost");
}

// ---------------------------------------------------------------------------
// criterion 4: regime thresholds

void criterion_regimes() {
  require(classify_regime(100, 100) == Regime::high, "1.00 should be HIGH");
  require(classify_regime(70, 100) == Regime::high, "0.70 should be HIGH");
  require(classify_regime(69, 100) == Regime::medium, "0.69 should be MEDIUM");
  require(classify_regime(30, 100) == Regime::medium, "0.30 should be MEDIUM");
  require(classify_regime(29, 100) == Regime::low, "0.29 should be LOW");
  require(classify_regime(10, 100) == Regime::low, "0.10 should be LOW");
  require(classify_regime(9, 100) == Regime::critical, "0.09 should be CRITICAL");
  require(classify_regime(0, 100) == Regime::critical, "0.00 should be CRITICAL");
}

// ---------------------------------------------------------------------------
// criterion 5: tracker protocol on a 20-iteration run, byte-exact blocks

void criterion_tracker_protocol() {
  std::vector<ScriptedTurn> turns;
  for (int i = 1; i <= 20; ++i) turns.push_back({search_code({"q" + std::to_string(i)}), {}, {}});
  turns.push_back({"<answer>done</answer>", {}, {}});
  auto providers = scripted_set(turns);
  BudgetVector budgets = uniform_budgets(25);
  BudgetLedger ledger(ToolSet::search_agent_default(), budgets);
  AgentConfig config = AgentConfig::for_mode(Mode::react_tracker);
  Trajectory traj = run_react({"q", "x", ""}, ledger, config, providers);

  int responses = 0, blocks = 0;
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    if (traj.steps[i].kind == StepKind::tool_response) {
      ++responses;
      require(i + 1 < traj.steps.size() &&
                  traj.steps[i + 1].kind == StepKind::budget_block,
              "tool response not followed by a budget block");
      const std::string expected =
          "<budget>\n"
          "Query Budget Used: " + std::to_string(responses) +
          ", Query Budget Remaining: " + std::to_string(25 - responses) + "\n" +
          "URL Budget Used: 0, URL Budget Remaining: 25\n"
          "Make the best use of the available resources.\n"
          "</budget>";
      require(traj.steps[i + 1].text == expected,
              "budget block not byte-exact at response " + std::to_string(responses));
    }
    if (traj.steps[i].kind == StepKind::budget_block) ++blocks;
  }
  require(responses == 20, "expected 20 tool responses");
  require(blocks == 20, "expected 20 budget blocks");
}

// ---------------------------------------------------------------------------
// criterion 6: synthetic scaling curve with a depth-8 world

void criterion_synthetic_curve() {
  const auto started = std::chrono::steady_clock::now();
  auto world =
      std::make_shared<SyntheticWorld>(SyntheticWorld::build({7, 8, 3, HopMode::search_only}));
  AgentConfig config = AgentConfig::for_mode(Mode::react_tracker);

  auto run_with = [&](SolverStyle style, std::int64_t budget) {
    RunPolicy policy;
    policy.mode = Mode::react_tracker;
    policy.budgets = uniform_budgets(budget);
    ProviderFactory factory = [world, style](std::uint64_t) {
      ProviderSet set;
      set.llm = make_world_solver_llm(world, style, /*blind_stop=*/3);
      set.search = world;
      set.browse = world;
      return set;
    };
    RunRecord record =
        execute_question(world->question(), "curve", policy, config, factory,
                         PricingTable::default_tools());
    return grade_exact(record.answer, world->gold()) ? 1 : 0;
  };

  std::vector<CurveSample> aware_samples, blind_samples;
  for (std::int64_t budget : {4, 7, 8, 12}) {
    const int aware = run_with(SolverStyle::budget_aware, budget);
    const int blind = run_with(SolverStyle::budget_blind, budget);
    aware_samples.push_back({budget, aware == 1, Money(0), {}});
    blind_samples.push_back({budget, blind == 1, Money(0), {}});
    if (budget < 8)
      require(aware == 0, "budget " + std::to_string(budget) + " should not solve depth 8");
    else
      require(aware == 1, "budget " + std::to_string(budget) + " should solve depth 8");
  }
  // The budget-blind policy stops early and plateaus below the aware one.
  auto aware_curve = aggregate_curve(aware_samples);
  auto blind_curve = aggregate_curve(blind_samples);
  for (std::size_t i = 0; i < aware_curve.size(); ++i) {
    if (aware_curve[i].budget_level >= 8)
      require(blind_curve[i].accuracy < aware_curve[i].accuracy,
              "blind policy should plateau below the aware one at budget >= 8");
  }
  const auto elapsed =
      std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() - started);
  require(elapsed.count() < 60, "synthetic curve exceeded the one-minute budget");
}

// ---------------------------------------------------------------------------
// criterion 7: sequential forcing stops after five tool-free iterations

void criterion_sequential_forcing() {
  std::vector<ScriptedTurn> turns;
  for (int i = 1; i <= 8; ++i)
    turns.push_back({"<answer>A" + std::to_string(i) + "</answer>", {}, {}});
  auto providers = scripted_set(turns);
  auto scripted = std::dynamic_pointer_cast<ScriptedLlm>(providers.llm);
  BudgetVector budgets = uniform_budgets(10);
  BudgetLedger ledger(ToolSet::search_agent_default(), budgets);
  SequentialForcer forcer(ledger);
  AgentConfig config = AgentConfig::for_mode(Mode::react);
  Trajectory traj = run_react({"q", "x", ""}, ledger, config, providers, nullptr, &forcer);

  // Forcings went out while the refusal streak built (answer at it1, then
  // five tool-free iterations it2..it6); after that, none.
  require(forcer.forcings_injected() == 6, "expected forcing on iterations 1..6 only");
  require(scripted->calls() == 6, "agent should not be consulted after forcing stops");
  require(traj.final_answer == "A6", "latest answer should stand");
  int forcing_steps = 0;
  for (const auto& s : traj.steps)
    if (s.kind == StepKind::forcing_message) {
      ++forcing_steps;
      require(s.text == prompts::kForcingMessage, "forcing message must be verbatim");
    }
  require(forcing_steps == 6, "forcing steps in trajectory should be 6");
}

// ---------------------------------------------------------------------------
// criterion 8: the verification decision machine

void criterion_verification_machine() {
  {  // early-stop: CONTINUE, PIVOT, SUCCESS -> 2 attempts, 1 candidate
    RunPolicy policy;
    policy.mode = Mode::bats;
    policy.early_stop = true;
    policy.budgets = uniform_budgets(10);
    AgentConfig config = AgentConfig::for_mode(Mode::bats);
    config.summarize_interval = 1;
    EventLog events;
    RunRecord record = bats_run(
        "q", "vm1", policy, config,
        scripted_set(
            {{"Exploration:\n- e\nVerification:\n- v", {}, {}},
             {search_code({"a"}), {}, {}},
             {"<answer>A1</answer>", {}, {}},
             {search_code({"b"}), {}, {}},
             {"<answer>A2</answer>", {}, {}},
             {search_code({"c"}), {}, {}},
             {"<answer>A3</answer>", {}, {}}},
            {{verdict_json("CONTINUE", "narrowing"), {}, {}},
             {verdict_json("PIVOT", "new direction"), {}, {}},
             {verdict_json("SUCCESS", ""), {}, {}}}),
        PricingTable::default_tools(), &events);
    require(record.attempts.size() == 2, "expected exactly 2 attempts");
    int successes = 0;
    for (const auto& a : record.attempts)
      if (a.verdict.decision == VerifyDecision::success) ++successes;
    require(successes == 1, "expected exactly 1 SUCCESS candidate");
    int substitutions = 0;
    for (const auto& e : events.entries()) {
      if (e.value("kind", "") == "summary_substitution") {
        ++substitutions;
        require(e.at("after_chars").get<std::size_t>() <
                    e.at("before_chars").get<std::size_t>(),
                "summary substitution did not shrink the context");
      }
      if (e.value("kind", "") == "pivot_seed")
        require(e.at("seed_chars").get<std::size_t>() <
                    e.at("before_chars").get<std::size_t>(),
                "pivot seed did not shrink the context");
    }
    require(substitutions == 1, "expected one summary substitution");
  }
  {  // exhaust mode: PIVOT, SUCCESS with leftover budget -> a third attempt
    RunPolicy policy;
    policy.mode = Mode::bats;
    policy.early_stop = false;
    policy.budgets.limits["search"] = 3;
    policy.budgets.limits["browse"] = 0;
    AgentConfig config = AgentConfig::for_mode(Mode::bats);
    RunRecord record = bats_run(
        "q", "vm2", policy, config,
        scripted_set({{"Exploration:\n- e\nVerification:\n- v", {}, {}},
                      {search_code({"a"}), {}, {}},
                      {"<answer>A1</answer>", {}, {}},
                      {search_code({"b"}), {}, {}},
                      {"<answer>A2</answer>", {}, {}},
                      {search_code({"c"}), {}, {}},
                      {"<answer>A3</answer>", {}, {}}},
                     {{verdict_json("PIVOT", "other angle"), {}, {}},
                      {verdict_json("SUCCESS", ""), {}, {}},
                      {verdict_json("SUCCESS", ""), {}, {}}},
                     {{"\\boxed{A}", {}, {}}}),
        PricingTable::default_tools());
    require(record.attempts.size() == 3,
            "exhaust mode with leftover budget should start a third attempt");
  }
}

// ---------------------------------------------------------------------------
// criterion 9: context bounds

void criterion_context_bounds() {
  // Browse content never exceeds 150,000 characters.
  PageContent big = PageContent::make("u", std::string(200000, 'x'));
  require(big.text.size() == 150000 && big.truncated, "page cap violated");
  PageContent fits = PageContent::make("u", std::string(150000, 'x'));
  require(!fits.truncated, "exact-size page must not be marked truncated");

  // A 12-iteration run with K=10: after the verification event the
  // renderable context holds exactly one tool response and one summary.
  std::vector<ScriptedTurn> turns;
  for (int i = 1; i <= 11; ++i) turns.push_back({search_code({"q" + std::to_string(i)}), {}, {}});
  turns.push_back({"<answer>A</answer>", {}, {}});   // iteration 12: verification fires
  turns.push_back({search_code({"q13"}), {}, {}});   // one more tool call
  turns.push_back({"<answer>B</answer>", {}, {}});
  auto providers = scripted_set(
      turns, {{verdict_json("CONTINUE", "compact summary"), {}, {}},
              {verdict_json("SUCCESS", ""), {}, {}}});

  class VerifyingHooks : public LoopHooks {
   public:
    VerifyingHooks(ProviderSet& providers, BudgetLedger& ledger, AgentConfig& config)
        : providers_(providers), ledger_(ledger), config_(config) {}
    AnswerDecision on_answer(Trajectory& traj, const std::string& answer) override {
      VerifyOutcome outcome = verify("q", render_context_text(traj, config_), answer,
                                     ledger_.snapshot(), providers_.verifier_llm());
      traj.usage += outcome.usage;
      if (outcome.verdict.decision != VerifyDecision::continue_current) return {};
      AnswerDecision d;
      const int since = traj.iterations - traj.iteration_at_last_summary;
      if (since >= config_.summarize_interval) {
        d.kind = AnswerDecision::Kind::replace_with_summary;
        d.text = outcome.verdict.trajectory_summary;
      } else {
        d.kind = AnswerDecision::Kind::inject_message;
        d.text = "verifier: continue";
      }
      return d;
    }
   private:
    ProviderSet& providers_;
    BudgetLedger& ledger_;
    AgentConfig& config_;
  };

  BudgetVector budgets = uniform_budgets(20);
  BudgetLedger ledger(ToolSet::search_agent_default(), budgets);
  AgentConfig config = AgentConfig::for_mode(Mode::bats);
  config.summarize_interval = 10;
  VerifyingHooks hooks(providers, ledger, config);
  Trajectory traj = run_react({"q", "x", ""}, ledger, config, providers, nullptr, &hooks);

  require(traj.iterations >= 12, "run should reach 12 iterations");
  auto view = compact_context(traj, config);
  int responses = 0, summaries = 0;
  for (const Step* s : view) {
    if (s->kind == StepKind::tool_response) ++responses;
    if (s->kind == StepKind::summary) ++summaries;
  }
  require(responses == 1, "renderable context must hold exactly one tool response, got " +
                              std::to_string(responses));
  require(summaries == 1, "renderable context must hold exactly one summary, got " +
                              std::to_string(summaries));
}

// ---------------------------------------------------------------------------
// criterion 10: aggregation oracles, exhaustive to length 8 over 3 symbols

void criterion_aggregation_oracles() {
  const std::vector<std::string> alphabet{"A", "B", "C"};
  const std::string gold = "A";
  long lists_checked = 0;
  for (int len = 1; len <= 8; ++len) {
    std::vector<int> idx(static_cast<std::size_t>(len), 0);
    while (true) {
      std::vector<std::string> answers;
      answers.reserve(static_cast<std::size_t>(len));
      for (int i : idx) answers.push_back(alphabet[static_cast<std::size_t>(i)]);

      // brute-force frequency count with earliest-first tie break
      std::string best;
      int best_count = -1;
      std::size_t best_first = answers.size();
      for (const auto& sym : alphabet) {
        int count = 0;
        std::size_t first = answers.size();
        for (std::size_t i = 0; i < answers.size(); ++i)
          if (answers[i] == sym) {
            ++count;
            if (first == answers.size()) first = i;
          }
        if (count > 0 && (count > best_count ||
                          (count == best_count && first < best_first))) {
          best = sym;
          best_count = count;
          best_first = first;
        }
      }
      require(majority_vote_exact(answers) == best, "majority vote diverged from brute force");

      // pass@N equals OR over per-answer correctness
      bool any = false;
      for (const auto& a : answers) any = any || (a == gold);
      require(pass_at_n(answers, [&](const std::string& a) { return a == gold; }) ==
                  (any ? 1 : 0),
              "pass@N diverged from OR");
      ++lists_checked;

      int pos = len - 1;
      while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == 3) {
        idx[static_cast<std::size_t>(pos)] = 0;
        --pos;
      }
      if (pos < 0) break;
    }
  }
  require(lists_checked == 3 + 9 + 27 + 81 + 243 + 729 + 2187 + 6561,
          "enumeration incomplete");
}

// ---------------------------------------------------------------------------
// criterion 11: replay determinism

void criterion_replay_determinism() {
  std::string first, second;
  for (const auto& run : run_mock_battery()) first += run.event_text;
  for (const auto& run : run_mock_battery()) second += run.event_text;
  require(!first.empty(), "battery produced no events");
  require(first == second, "two executions produced different event logs");
}

// ---------------------------------------------------------------------------
// criterion 12: optional live smoke

bool criterion_live_smoke(std::string* note) {
  const char* manifest_path = std::getenv("BATS_LIVE_MANIFEST");
  if (!manifest_path || !*manifest_path) {
    *note = "set BATS_LIVE_MANIFEST to a manifest with http providers to enable";
    return false;
  }
  RunManifest manifest = RunManifest::load(manifest_path);
  std::vector<QAItem> items = load_dataset(manifest.dataset_path);
  require(!items.empty(), "live manifest dataset is empty");
  if (items.size() > 3) items.resize(3);
  manifest.policy.budgets = uniform_budgets(10);

  for (const auto& item : items) {
    EventLog events(EventLog::TimeMode::logical);
    ProviderFactory factory = make_provider_factory(manifest.providers, item);
    RunRecord record = execute_question(item.question, item.id, manifest.policy, manifest.agent,
                                        factory, manifest.pricing, &events);
    require(record.tool_counts["search"] <= 10, item.id + ": search budget violated");
    require(record.tool_counts["browse"] <= 10, item.id + ": browse budget violated");
    require(!record.answer.empty(), item.id + ": empty answer");
    CostBreakdown from_events = cost_from_events(events.entries(), manifest.pricing);
    require(from_events.total == record.cost.total, item.id + ": cost reconciliation failed");
  }
  return true;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<void()> body;
  };
  const std::vector<Criterion> criteria{
      {1, "budget safety over 1000 fuzzed runs", criterion_budget_safety},
      {2, "cost reconciliation against event logs", criterion_cost_reconciliation},
      {3, "tool-price conformance (10 searches + 2 browses = $0.012)", criterion_tool_prices},
      {4, "regime thresholds", criterion_regimes},
      {5, "tracker protocol, byte-exact blocks over 20 iterations", criterion_tracker_protocol},
      {6, "synthetic depth-8 scaling curve", criterion_synthetic_curve},
      {7, "sequential forcing stops after five refusals", criterion_sequential_forcing},
      {8, "verification decision machine", criterion_verification_machine},
      {9, "context bounds (page cap, K=10 compaction)", criterion_context_bounds},
      {10, "aggregation oracles, exhaustive to length 8", criterion_aggregation_oracles},
      {11, "replay determinism", criterion_replay_determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    try {
      c.body();
      std::cout << "[PASS] criterion " << c.id << ": " << c.name << "\n";
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "[FAIL] criterion " << c.id << ": " << c.name << " — " << e.what() << "\n";
    }
  }

  std::string note;
  try {
    if (criterion_live_smoke(&note)) {
      std::cout << "[PASS] criterion 12: live smoke\n";
    } else {
      std::cout << "[SKIP] criterion 12: live smoke (" << note << ")\n";
    }
  } catch (const std::exception& e) {
    ++failures;
    std::cout << "[FAIL] criterion 12: live smoke — " << e.what() << "\n";
  }

  return failures;
}
