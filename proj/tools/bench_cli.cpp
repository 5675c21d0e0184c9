// bench_cli: run budget-constrained agent benchmarks, grade records, and
// emit scaling-curve / Pareto reports.
//
//   bench_cli run manifest.json [--mode bats] [--budget-search 10] ...
//   bench_cli run --mock-world 1,8 --budget-search 10 --budget-browse 10
//   bench_cli grade out/records.jsonl --dataset data.jsonl
//   bench_cli report out/records.jsonl --out report.csv
//   bench_cli world --seed 1 --depth 8 --out world.jsonl

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bats/bench.hpp"
#include "bats/world.hpp"

namespace {

struct RunFlags {
  std::string manifest_path;
  std::string mode;
  std::int64_t budget_search = -1;
  std::int64_t budget_browse = -1;
  int parallel = 0;
  bool sequential = false;
  bool early_stop = false;
  std::string mock_world;  // "SEED,DEPTH"
  bool resume = false;
  std::string output_dir;
  int workers = 0;
  int count = 0;
};

bats::RunManifest manifest_from_flags(const RunFlags& flags) {
  bats::RunManifest manifest;
  if (!flags.manifest_path.empty()) {
    manifest = bats::RunManifest::load(flags.manifest_path);
  } else if (flags.mock_world.empty()) {
    throw bats::ManifestError("run needs a manifest path or --mock-world SEED,DEPTH");
  } else {
    manifest.dataset_path = "auto";
    manifest.policy.mode = bats::Mode::react_tracker;
    manifest.policy.budgets = bats::BudgetVector::uniform(
        bats::ToolSet::search_agent_default(), 10);
    manifest.pricing = bats::PricingTable::default_tools();
  }

  if (!flags.mock_world.empty()) {
    auto comma = flags.mock_world.find(',');
    if (comma == std::string::npos)
      throw bats::ManifestError("--mock-world wants SEED,DEPTH");
    manifest.providers = {{"type", "mock_world"},
                          {"seed", std::stoull(flags.mock_world.substr(0, comma))},
                          {"depth", std::stoi(flags.mock_world.substr(comma + 1))},
                          {"branching", 3},
                          {"policy", "aware"}};
    manifest.dataset_path = "auto";
  }
  if (!flags.mode.empty()) manifest.policy.mode = bats::mode_from_name(flags.mode);
  if (flags.budget_search >= 0) manifest.policy.budgets.limits["search"] = flags.budget_search;
  if (flags.budget_browse >= 0) manifest.policy.budgets.limits["browse"] = flags.budget_browse;
  if (manifest.policy.budgets.limits.empty())
    manifest.policy.budgets =
        bats::BudgetVector::uniform(bats::ToolSet::search_agent_default(), 10);
  if (flags.parallel > 0) {
    manifest.policy.parallel_n = flags.parallel;
    manifest.policy.scaling =
        flags.parallel > 1 ? bats::ScalingKind::parallel : bats::ScalingKind::none;
  }
  if (flags.sequential) manifest.policy.scaling = bats::ScalingKind::sequential;
  if (flags.early_stop) manifest.policy.early_stop = true;
  if (flags.resume) manifest.resume = true;
  if (!flags.output_dir.empty()) manifest.output_dir = flags.output_dir;
  if (flags.workers > 0) manifest.workers = flags.workers;
  if (flags.count > 0) manifest.auto_count = flags.count;

  manifest.agent.mode = manifest.policy.mode;
  manifest.agent.tracker_enabled = manifest.policy.mode != bats::Mode::react;
  return manifest;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"budget-constrained agent benchmark harness"};
  app.require_subcommand(1);

  RunFlags flags;
  auto* run = app.add_subcommand("run", "execute a benchmark run");
  run->add_option("manifest", flags.manifest_path, "run manifest JSON path");
  run->add_option("--mode", flags.mode, "react | react_tracker | bats");
  run->add_option("--budget-search", flags.budget_search, "per-question search budget");
  run->add_option("--budget-browse", flags.budget_browse, "per-question browse budget");
  run->add_option("--parallel", flags.parallel, "independent runs per question");
  run->add_flag("--sequential", flags.sequential, "sequential scaling (budget forcing)");
  run->add_flag("--early-stop", flags.early_stop, "stop at the first verified answer");
  run->add_option("--mock-world", flags.mock_world, "SEED,DEPTH synthetic world providers");
  run->add_flag("--resume", flags.resume, "skip items already in the records file");
  run->add_option("--out", flags.output_dir, "output directory");
  run->add_option("--workers", flags.workers, "concurrent questions");
  run->add_option("--count", flags.count, "auto-dataset size (mock worlds)");

  std::string grade_records_path, grade_dataset;
  bool grade_judge = false, grade_all = false;
  std::string grade_manifest;
  auto* grade_cmd = app.add_subcommand("grade", "grade (or re-grade) a records file");
  grade_cmd->add_option("records", grade_records_path, "records JSONL path")->required();
  grade_cmd->add_option("--dataset", grade_dataset, "dataset JSONL with gold answers");
  grade_cmd->add_flag("--judge", grade_judge, "LLM-judge grading (default: exact match)");
  grade_cmd->add_option("--manifest", grade_manifest, "manifest with judge provider config");
  grade_cmd->add_flag("--all", grade_all, "re-grade graded records too");

  std::vector<std::string> report_paths;
  std::string report_out = "report.csv";
  auto* report_cmd = app.add_subcommand("report", "emit the scaling-curve / Pareto CSV");
  report_cmd->add_option("records", report_paths, "records JSONL path(s)")->required();
  report_cmd->add_option("--out", report_out, "output CSV path");

  std::uint64_t world_seed = 1;
  int world_depth = 4, world_branching = 3;
  std::string world_out = "world.jsonl", world_mode = "search_only";
  auto* world_cmd = app.add_subcommand("world", "generate a synthetic world fixture");
  world_cmd->add_option("--seed", world_seed, "world seed");
  world_cmd->add_option("--depth", world_depth, "tool calls required to solve");
  world_cmd->add_option("--branching", world_branching, "results per chain query");
  world_cmd->add_option("--mode", world_mode, "search_only | alternating");
  world_cmd->add_option("--out", world_out, "output JSONL path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      bats::RunManifest manifest = manifest_from_flags(flags);
      bats::BenchResult result = bats::run_benchmark(manifest);
      std::cout << "records: " << result.records_path << "\nevents: " << result.events_path
                << "\n";
      return 0;
    }
    if (grade_cmd->parsed()) {
      std::shared_ptr<bats::LlmClient> judge;
      if (grade_judge) {
        if (grade_manifest.empty())
          throw bats::ManifestError("--judge needs --manifest for the judge provider");
        bats::RunManifest manifest = bats::RunManifest::load(grade_manifest);
        bats::QAItem dummy;
        auto factory = bats::make_provider_factory(manifest.providers, dummy);
        judge = factory(1).judge;
        if (!judge) throw bats::ManifestError("manifest providers have no judge LLM");
      }
      int regraded = bats::grade_records_file(grade_records_path, judge.get(), grade_all,
                                              grade_dataset);
      std::cout << "graded " << regraded << " record(s)\n";
      return 0;
    }
    if (report_cmd->parsed()) {
      auto records = bats::load_records(report_paths);
      auto rows = bats::build_report(records);
      bats::write_report_csv(rows, report_out);
      std::cout << bats::report_to_csv(rows);
      std::cout << "wrote " << report_out << "\n";
      return 0;
    }
    if (world_cmd->parsed()) {
      bats::WorldParams params;
      params.seed = world_seed;
      params.depth = world_depth;
      params.branching = world_branching;
      params.mode = world_mode == "alternating" ? bats::HopMode::alternating
                                                : bats::HopMode::search_only;
      bats::SyntheticWorld world = bats::SyntheticWorld::build(params);
      world.save_jsonl(world_out);
      std::cout << "question: " << world.question() << "\ngold: " << world.gold()
                << "\nwrote " << world_out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
