#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bats/scaling.hpp"

namespace bats {

struct FormatError : std::runtime_error {
  int line;
  FormatError(int line_number, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_number) + ": " + what),
        line(line_number) {}
};

struct DuplicateIdError : std::runtime_error {
  int line;
  DuplicateIdError(int line_number, const std::string& id)
      : std::runtime_error("line " + std::to_string(line_number) + ": duplicate id '" + id + "'"),
        line(line_number) {}
};

struct ManifestError : std::runtime_error {
  explicit ManifestError(const std::string& what) : std::runtime_error(what) {}
};

struct JudgeUnavailable : std::runtime_error {
  explicit JudgeUnavailable(const std::string& what) : std::runtime_error(what) {}
};

struct QAItem {
  std::string id;
  std::string question;
  std::string gold;
  nlohmann::json metadata = nlohmann::json::object();
};

/// Line-delimited JSON with fields id/question/gold (metadata optional).
/// Duplicate ids and malformed lines are rejected with their line number.
std::vector<QAItem> load_dataset(const std::string& path);

/// Normalized (trim + casefold) string equality; the CI default.
bool grade_exact(const std::string& prediction, const std::string& gold);

struct GradeOutcome {
  std::optional<bool> correct;  // unset when grading was deferred
};

/// Judge-mode grading sends (question, prediction, gold) to the judge at
/// temperature 0 and parses the correct/incorrect token; a null judge means
/// exact mode. JudgeUnavailable defers grading (record stays ungraded).
GradeOutcome grade(const std::string& question, const std::string& prediction,
                   const std::string& gold, LlmClient* judge, EventLog* events = nullptr,
                   const std::string& run_id = {});

/// Everything one benchmark run needs, loaded from a JSON manifest.
/// Credentials never appear in the manifest, only env-var names.
struct RunManifest {
  std::string dataset_path;  // "auto" generates items from mock worlds
  int auto_count = 1;        // items to generate when dataset is "auto"
  std::string output_dir = "bench_out";
  bool resume = false;
  int workers = 1;
  RunPolicy policy;
  AgentConfig agent;
  PricingTable pricing;
  nlohmann::json providers;  // provider section, see make_provider_factory
  bool judge_grading = false;

  static RunManifest load(const std::string& path);
  static RunManifest from_json(const nlohmann::json& j);
  void validate() const;
};

/// Builds the per-seed provider factory for one dataset item from the
/// manifest's provider section. Supported types: "mock_world" (synthetic
/// world + scripted solver), "scripted" (transcript replay), "http" (live
/// endpoints).
ProviderFactory make_provider_factory(const nlohmann::json& provider_config, const QAItem& item);

/// Generates the auto dataset for mock_world manifests: one item per world,
/// seeds counting up from the configured seed.
std::vector<QAItem> make_world_dataset(const nlohmann::json& provider_config, int count);

struct BenchResult {
  std::string records_path;
  std::string events_path;
  int total = 0;
  int executed = 0;
  int skipped = 0;
};

/// Runs every dataset item under the manifest policy, appending one
/// RunRecord JSONL line per item as it completes. Resume skips ids already
/// present in the records file. Items run concurrently up to the worker
/// bound; records and events flush in dataset order.
BenchResult run_benchmark(const RunManifest& manifest);

struct ReportRow {
  std::string policy_label;
  std::int64_t budget = 0;
  Rational accuracy;
  Rational mean_cost;  // minor units
  Rational mean_search;
  Rational mean_browse;
  Rational over_budget_frac;
  bool pareto = false;
};

std::vector<RunRecord> load_records(const std::vector<std::string>& paths);

/// Filters one record's events out of a combined events file. Run ids are
/// the question id itself or the id extended with an '@attempt' or '#run'
/// suffix, so "q1" never captures "q10" events.
std::vector<nlohmann::json> events_for_record(const std::vector<nlohmann::json>& events,
                                              const std::string& question_id);

std::vector<nlohmann::json> load_events(const std::string& path);

/// One row per (policy, budget level); Pareto marks rows not dominated on
/// (accuracy up, cost down) by any other row. Ungraded records are skipped.
std::vector<ReportRow> build_report(const std::vector<RunRecord>& records);

std::string report_to_csv(const std::vector<ReportRow>& rows);
void write_report_csv(const std::vector<ReportRow>& rows, const std::string& path);

/// Re-grades records in place (ungraded ones, or all when regrade_all).
int grade_records_file(const std::string& records_path, LlmClient* judge, bool regrade_all,
                       const std::string& question_lookup_dataset = {});

}  // namespace bats
