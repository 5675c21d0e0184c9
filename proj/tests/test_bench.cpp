#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "bats/bench.hpp"
#include "bats/mock_llm.hpp"

using namespace bats;

namespace {

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) {
    path = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

RunManifest world_manifest(const TempDir& dir, int depth, std::int64_t budget, int count,
                           const std::string& style = "aware") {
  RunManifest m;
  m.dataset_path = "auto";
  m.auto_count = count;
  m.output_dir = dir.file("out");
  m.policy.mode = Mode::react_tracker;
  m.policy.budgets.limits["search"] = budget;
  m.policy.budgets.limits["browse"] = budget;
  m.agent = AgentConfig::for_mode(Mode::react_tracker);
  m.pricing = PricingTable::default_tools();
  m.providers = {{"type", "mock_world"}, {"seed", 100}, {"depth", depth},
                 {"branching", 3},       {"policy", style}};
  return m;
}

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("load_dataset: three valid lines") {
  TempDir dir("bats_ds1");
  write_file(dir.file("d.jsonl"),
             R"({"id": "a", "question": "qa", "gold": "ga"})"
             "\n"
             R"({"id": "b", "question": "qb", "gold": "gb", "metadata": {"k": 1}})"
             "\n"
             R"({"id": "c", "question": "qc", "gold": "gc"})"
             "\n");
  auto items = load_dataset(dir.file("d.jsonl"));
  REQUIRE(items.size() == 3);
  CHECK(items[0].id == "a");
  CHECK(items[1].metadata.at("k") == 1);
}

TEST_CASE("load_dataset: duplicate id names its line") {
  TempDir dir("bats_ds2");
  write_file(dir.file("d.jsonl"),
             R"({"id": "a", "question": "q", "gold": "g"})"
             "\n"
             R"({"id": "a", "question": "q2", "gold": "g2"})"
             "\n");
  try {
    load_dataset(dir.file("d.jsonl"));
    FAIL("expected DuplicateIdError");
  } catch (const DuplicateIdError& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("load_dataset: malformed line names its line") {
  TempDir dir("bats_ds3");
  write_file(dir.file("d.jsonl"),
             R"({"id": "a", "question": "q", "gold": "g"})"
             "\n{borken\n");
  try {
    load_dataset(dir.file("d.jsonl"));
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("grade: exact mode normalizes") {
  CHECK(grade_exact("Paris", "paris"));
  CHECK(grade_exact("  paris  ", "Paris"));
  CHECK(!grade_exact("None", "paris"));
  CHECK(!grade_exact("", "paris"));
}

TEST_CASE("grade: judge replies parse to flags") {
  ScriptedLlm yes(std::vector<ScriptedTurn>{{"correct: yes", {}, {}}});
  CHECK(*grade("q", "p", "g", &yes).correct == true);
  ScriptedLlm no(std::vector<ScriptedTurn>{{"correct: no", {}, {}}});
  CHECK(*grade("q", "p", "g", &no).correct == false);
  ScriptedLlm incorrect(std::vector<ScriptedTurn>{{"the prediction is incorrect", {}, {}}});
  CHECK(*grade("q", "p", "g", &incorrect).correct == false);
  ScriptedLlm unreadable({{"???", {}, {}}, {"???", {}, {}}});
  CHECK(!grade("q", "p", "g", &unreadable).correct.has_value());  // deferred
}

TEST_CASE("grade: a dead judge defers grading") {
  CallbackLlm dead([](const LlmRequest&) -> std::string {
    throw ProviderUnavailable("judge endpoint down");
  });
  CHECK_THROWS_AS(grade("q", "p", "g", &dead), JudgeUnavailable);
}

TEST_CASE("run_benchmark: five mock-world items, all solved and graded") {
  TempDir dir("bats_bench1");
  RunManifest manifest = world_manifest(dir, /*depth=*/2, /*budget=*/5, /*count=*/5);
  BenchResult result = run_benchmark(manifest);
  CHECK(result.total == 5);
  CHECK(result.executed == 5);
  auto records = load_records({result.records_path});
  REQUIRE(records.size() == 5);
  for (const auto& r : records) {
    REQUIRE(r.correct.has_value());
    CHECK(*r.correct);
    CHECK(r.tool_counts.at("search") == 2);
  }
  CHECK(std::filesystem::exists(result.events_path));
}

TEST_CASE("run_benchmark: resume skips completed ids and is idempotent") {
  TempDir dir("bats_bench2");
  RunManifest manifest = world_manifest(dir, 2, 5, 3);
  BenchResult first = run_benchmark(manifest);
  CHECK(first.executed == 3);
  const std::string before = read_file(first.records_path);

  // Simulate an interrupted run: drop the last record, resume completes it.
  auto lines = before;
  auto cut = lines.rfind('\n', lines.size() - 2);
  write_file(first.records_path, lines.substr(0, cut + 1));
  RunManifest resume = manifest;
  resume.resume = true;
  BenchResult second = run_benchmark(resume);
  CHECK(second.skipped == 2);
  CHECK(second.executed == 1);
  auto records = load_records({second.records_path});
  CHECK(records.size() == 3);

  // A third run over the completed file changes nothing.
  const std::string settled = read_file(first.records_path);
  BenchResult third = run_benchmark(resume);
  CHECK(third.executed == 0);
  CHECK(third.skipped == 3);
  CHECK(read_file(first.records_path) == settled);
}

TEST_CASE("run_benchmark: a failing provider is recorded and the run continues") {
  TempDir dir("bats_bench3");
  write_file(dir.file("d.jsonl"),
             R"({"id": "a", "question": "qa", "gold": "ga"})"
             "\n"
             R"({"id": "b", "question": "qb", "gold": "gb"})"
             "\n");
  RunManifest manifest;
  manifest.dataset_path = dir.file("d.jsonl");
  manifest.output_dir = dir.file("out");
  manifest.policy.mode = Mode::react;
  manifest.policy.budgets = BudgetVector::uniform(ToolSet::search_agent_default(), 3);
  manifest.agent = AgentConfig::for_mode(Mode::react);
  manifest.pricing = PricingTable::default_tools();
  // scripted provider with an empty transcript: every chat throws
  TempDir fixtures("bats_bench3_fix");
  write_file(fixtures.file("agent.jsonl"), "");
  manifest.providers = {{"type", "scripted"}, {"agent_transcript", fixtures.file("agent.jsonl")}};
  BenchResult result = run_benchmark(manifest);
  CHECK(result.executed == 2);
  auto records = load_records({result.records_path});
  REQUIRE(records.size() == 2);
  for (const auto& r : records) {
    CHECK(!r.error.empty());
    CHECK(r.answer == "None");
  }
}

TEST_CASE("manifest validation fails fast") {
  RunManifest m;
  m.dataset_path = "/nonexistent/file.jsonl";
  m.policy.budgets = BudgetVector::uniform(ToolSet::search_agent_default(), 1);
  m.providers = {{"type", "mock_world"}};
  CHECK_THROWS_AS(m.validate(), ManifestError);
  m.dataset_path = "auto";
  m.providers = {{"type", "nonsense"}};
  CHECK_THROWS_AS(m.validate(), ManifestError);
  m.providers = nlohmann::json();
  CHECK_THROWS_AS(m.validate(), ManifestError);
}

TEST_CASE("report: dominance marks the pareto column") {
  RunRecord low, high;
  low.question_id = "a";
  low.policy.mode = Mode::react;
  low.policy.budgets.limits["search"] = 10;
  low.policy.budgets.limits["browse"] = 10;
  low.correct = false;  // accuracy 0.10 comes from mixing below
  low.cost.total = Money(5);
  high = low;
  high.question_id = "b";
  high.policy.mode = Mode::react_tracker;
  high.cost.total = Money(4);
  high.correct = true;

  // react: acc 0, cost 5; react_tracker: acc 1, cost 4 -> only tracker is
  // pareto-optimal.
  auto rows = build_report({low, high});
  REQUIRE(rows.size() == 2);
  const ReportRow* react_row = &rows[0];
  const ReportRow* tracker_row = &rows[1];
  if (react_row->policy_label != "react") std::swap(react_row, tracker_row);
  CHECK(!react_row->pareto);
  CHECK(tracker_row->pareto);
}

TEST_CASE("report: single row and exact ties are pareto-marked") {
  RunRecord only;
  only.question_id = "a";
  only.policy.mode = Mode::react;
  only.policy.budgets.limits["search"] = 10;
  only.correct = true;
  only.cost.total = Money(3);
  auto rows = build_report({only});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].pareto);

  RunRecord twin = only;
  twin.question_id = "b";
  twin.policy.mode = Mode::react_tracker;  // same accuracy, same cost
  auto tied = build_report({only, twin});
  REQUIRE(tied.size() == 2);
  CHECK(tied[0].pareto);
  CHECK(tied[1].pareto);  // no strict dominance either way
}

TEST_CASE("report: csv header and values") {
  RunRecord r;
  r.question_id = "a";
  r.policy.mode = Mode::react;
  r.policy.budgets.limits["search"] = 10;
  r.policy.budgets.limits["browse"] = 10;
  r.correct = true;
  r.cost.total = Money(7, 2);
  r.tool_counts["search"] = 4;
  r.tool_counts["browse"] = 1;
  r.over_budget = true;
  auto csv = report_to_csv(build_report({r}));
  CHECK(csv.rfind("policy,budget,accuracy,mean_cost_minor_units,mean_search,mean_browse,"
                  "over_budget_frac,pareto\n",
                  0) == 0);
  CHECK(csv.find("react,10,1.000000,3.500000,4.000000,1.000000,1.000000,1") !=
        std::string::npos);
}

TEST_CASE("report: accuracy is the exact mean of correctness flags") {
  std::vector<RunRecord> records;
  for (int i = 0; i < 3; ++i) {
    RunRecord r;
    r.question_id = "q" + std::to_string(i);
    r.policy.mode = Mode::react;
    r.policy.budgets.limits["search"] = 10;
    r.correct = i == 0;  // 1 of 3
    r.cost.total = Money(i);
    records.push_back(r);
  }
  auto rows = build_report(records);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].accuracy == Rational(1, 3));
  CHECK(rows[0].mean_cost == Money(1));  // (0+1+2)/3
}

TEST_CASE("report: empty input is an error") {
  CHECK_THROWS_AS(build_report({}), EmptyInputError);
}

TEST_CASE("grade subcommand backend: ungraded records get graded in place") {
  TempDir dir("bats_grade1");
  write_file(dir.file("d.jsonl"), R"({"id": "a", "question": "q", "gold": "right"})"
                                  "\n");
  // one ungraded record whose answer matches gold
  RunRecord r;
  r.question_id = "a";
  r.policy.mode = Mode::react;
  r.policy.budgets.limits["search"] = 1;
  r.answer = "right";
  write_file(dir.file("records.jsonl"), r.to_json().dump() + "\n");

  int n = grade_records_file(dir.file("records.jsonl"), nullptr, false, dir.file("d.jsonl"));
  CHECK(n == 1);
  auto records = load_records({dir.file("records.jsonl")});
  REQUIRE(records.size() == 1);
  CHECK(records[0].correct.has_value());
  CHECK(*records[0].correct);
}

TEST_CASE("records reconcile against the combined events file, including sub-runs") {
  TempDir dir("bats_recon");
  RunManifest manifest = world_manifest(dir, /*depth=*/2, /*budget=*/5, /*count=*/3);
  manifest.policy.scaling = ScalingKind::parallel;
  manifest.policy.parallel_n = 3;
  manifest.workers = 2;
  BenchResult result = run_benchmark(manifest);
  auto records = load_records({result.records_path});
  auto events = load_events(result.events_path);
  REQUIRE(records.size() == 3);
  for (const auto& r : records) {
    auto mine = events_for_record(events, r.question_id);
    CHECK(!mine.empty());
    CostBreakdown recomputed = cost_from_events(mine, manifest.pricing);
    CHECK(recomputed.total == r.cost.total);
    CHECK(recomputed.token_cost == r.cost.token_cost);
  }
  // id prefixes do not bleed into each other
  CHECK(events_for_record(events, "world-1").empty());
}

TEST_CASE("manifest json parsing picks up policy, pricing, and agent settings") {
  nlohmann::json j = {
      {"dataset", "auto"},
      {"auto_count", 2},
      {"output_dir", "x"},
      {"workers", 2},
      {"policy",
       {{"mode", "bats"}, {"budgets", {{"search", 7}, {"browse", 3}}}, {"early_stop", true}}},
      {"agent", {{"mode", "bats"}, {"summarize_interval", 4}}},
      {"pricing",
       {{"token_rates", {{"input", "1/5000"}, {"output", "3/5000"}, {"cache_hit", "1/10000"}}},
        {"tool_prices", {{"search", "0.1"}, {"browse", "0.1"}}}}},
      {"providers", {{"type", "mock_world"}, {"seed", 1}, {"depth", 2}}},
  };
  RunManifest m = RunManifest::from_json(j);
  CHECK(m.policy.mode == Mode::bats);
  CHECK(m.policy.early_stop);
  CHECK(m.policy.budgets.limits.at("search") == 7);
  CHECK(m.agent.summarize_interval == 4);
  CHECK(m.agent.tracker_enabled);
  CHECK(m.pricing.input_rate == Money(1, 5000));
  CHECK(m.pricing.tool_prices.at("search") == Money(1, 10));
  m.validate();
}

}  // TEST_SUITE
