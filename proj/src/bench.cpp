#include "bats/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "bats/live_providers.hpp"
#include "bats/mock_llm.hpp"
#include "bats/prompts.hpp"
#include "bats/world.hpp"

namespace bats {

std::vector<QAItem> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);
  std::vector<QAItem> items;
  std::set<std::string> ids;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw FormatError(line_number, "not a JSON object");
    if (!j.contains("id") || !j.at("id").is_string())
      throw FormatError(line_number, "missing string field 'id'");
    if (!j.contains("question") || !j.at("question").is_string())
      throw FormatError(line_number, "missing string field 'question'");
    if (!j.contains("gold") || !j.at("gold").is_string())
      throw FormatError(line_number, "missing string field 'gold'");
    QAItem item;
    item.id = j.at("id").get<std::string>();
    item.question = j.at("question").get<std::string>();
    item.gold = j.at("gold").get<std::string>();
    if (item.id.empty()) throw FormatError(line_number, "empty id");
    if (item.question.empty() || item.gold.empty())
      throw FormatError(line_number, "question and gold must be non-empty");
    if (!ids.insert(item.id).second) throw DuplicateIdError(line_number, item.id);
    if (j.contains("metadata")) item.metadata = j.at("metadata");
    items.push_back(std::move(item));
  }
  return items;
}

namespace {

std::string normalized(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  std::string out;
  for (std::size_t i = b; i <= e; ++i)
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(s[i])));
  return out;
}

}  // namespace

bool grade_exact(const std::string& prediction, const std::string& gold) {
  return !normalized(gold).empty() && normalized(prediction) == normalized(gold);
}

GradeOutcome grade(const std::string& question, const std::string& prediction,
                   const std::string& gold, LlmClient* judge, EventLog* events,
                   const std::string& run_id) {
  GradeOutcome out;
  if (!judge) {
    out.correct = grade_exact(prediction, gold);
    return out;
  }
  LlmRequest req;
  req.system = prompts::grade_system_prompt();
  req.temperature = 0.0;
  req.turns.push_back({"user", prompts::grade_inputs(question, prediction, gold)});
  try {
    for (int attempt = 0; attempt < 2; ++attempt) {
      LlmResponse resp = judge->chat(req);
      if (events)
        events->emit({{"kind", "chat"},
                      {"run", run_id},
                      {"role", "grader"},
                      {"billed", false},
                      {"tokens", resp.usage.to_json()},
                      {"reply_digest", digest_hex(resp.text)}});
      std::string lower;
      for (char c : resp.text)
        lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (lower.find("incorrect") != std::string::npos ||
          lower.find("correct: no") != std::string::npos) {
        out.correct = false;
        return out;
      }
      if (lower.find("correct") != std::string::npos) {
        out.correct = true;
        return out;
      }
      req.turns.push_back({"assistant", resp.text});
      req.turns.push_back({"user", "Reply with exactly \"correct: yes\" or \"correct: no\"."});
    }
  } catch (const ProviderUnavailable& e) {
    throw JudgeUnavailable(e.what());
  }
  return out;  // unreadable twice: deferred
}

RunManifest RunManifest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ManifestError("cannot open manifest: " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ManifestError("manifest is not valid JSON: " + path);
  RunManifest m = from_json(j);
  // Relative paths resolve against the manifest's directory.
  auto base = std::filesystem::path(path).parent_path();
  auto resolve = [&](std::string& p) {
    if (!p.empty() && p != "auto" && std::filesystem::path(p).is_relative())
      p = (base / p).string();
  };
  resolve(m.dataset_path);
  resolve(m.output_dir);
  m.validate();
  return m;
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  RunManifest m;
  m.dataset_path = j.value("dataset", std::string("auto"));
  m.auto_count = j.value("auto_count", 1);
  m.output_dir = j.value("output_dir", std::string("bench_out"));
  m.resume = j.value("resume", false);
  m.workers = j.value("workers", 1);
  if (j.contains("policy")) m.policy = RunPolicy::from_json(j.at("policy"));
  if (j.contains("agent")) {
    m.agent = AgentConfig::from_json(j.at("agent"));
  } else {
    m.agent = AgentConfig::for_mode(m.policy.mode);
  }
  m.agent.mode = m.policy.mode;
  m.agent.tracker_enabled = m.policy.mode != Mode::react;
  m.pricing = j.contains("pricing") ? PricingTable::from_json(j.at("pricing"))
                                    : PricingTable::default_tools();
  if (j.contains("providers")) m.providers = j.at("providers");
  if (j.contains("grading")) m.judge_grading = j.at("grading").value("mode", "exact") == "judge";
  return m;
}

void RunManifest::validate() const {
  if (dataset_path != "auto" && !std::filesystem::exists(dataset_path))
    throw ManifestError("dataset does not exist: " + dataset_path);
  if (workers < 1) throw ManifestError("workers must be >= 1");
  if (providers.is_null()) throw ManifestError("manifest has no providers section");
  const std::string type = providers.value("type", std::string());
  if (type != "mock_world" && type != "scripted" && type != "http")
    throw ManifestError("unknown provider type: '" + type + "'");
  if (dataset_path == "auto" && type != "mock_world")
    throw ManifestError("dataset 'auto' needs mock_world providers");
  policy.validate();
  pricing.validate();
}

namespace {

ProviderSet make_world_providers(const nlohmann::json& config, const QAItem& item,
                                 std::uint64_t seed) {
  WorldParams params;
  params.seed = item.metadata.value("world_seed", config.value("seed", std::uint64_t{1}));
  params.depth = item.metadata.value("depth", config.value("depth", 4));
  params.branching = item.metadata.value("branching", config.value("branching", 3));
  const std::string mode =
      item.metadata.value("world_mode", config.value("mode", std::string("search_only")));
  params.mode = mode == "alternating" ? HopMode::alternating : HopMode::search_only;

  auto world = std::make_shared<SyntheticWorld>(SyntheticWorld::build(params));
  const std::string style =
      item.metadata.value("policy", config.value("policy", std::string("aware")));
  const int blind_stop = config.value("blind_stop", 3);
  (void)seed;  // the world and solver are already deterministic in the item

  ProviderSet set;
  set.llm = make_world_solver_llm(
      world, style == "blind" ? SolverStyle::budget_blind : SolverStyle::budget_aware,
      blind_stop);
  // The solver also answers the verifier and selection protocols, so bats
  // mode runs fully offline. Aggregation/grading stay in exact mode (no
  // dedicated judge).
  set.verifier = set.llm;
  set.search = world;
  set.browse = world;
  return set;
}

ProviderSet make_scripted_providers(const nlohmann::json& config) {
  ProviderSet set;
  const bool strict = config.value("strict", false);
  auto load = [&](const char* key) -> std::shared_ptr<LlmClient> {
    if (!config.contains(key)) return nullptr;
    return std::make_shared<ScriptedLlm>(
        ScriptedLlm::load_jsonl(config.at(key).get<std::string>(), strict));
  };
  set.llm = load("agent_transcript");
  if (!set.llm) throw ManifestError("scripted providers need agent_transcript");
  set.verifier = load("verifier_transcript");
  set.judge = load("judge_transcript");
  if (config.contains("world")) {
    auto world = std::make_shared<SyntheticWorld>(
        SyntheticWorld::load_jsonl(config.at("world").get<std::string>()));
    set.search = world;
    set.browse = world;
  } else {
    auto empty = std::make_shared<EmptySearchWorld>();
    set.search = empty;
    set.browse = empty;
  }
  return set;
}

}  // namespace

ProviderFactory make_provider_factory(const nlohmann::json& provider_config, const QAItem& item) {
  const std::string type = provider_config.value("type", std::string());
  if (type == "mock_world") {
    nlohmann::json config = provider_config;
    QAItem item_copy = item;
    return [config, item_copy](std::uint64_t seed) {
      return make_world_providers(config, item_copy, seed);
    };
  }
  if (type == "scripted") {
    nlohmann::json config = provider_config;
    return [config](std::uint64_t) { return make_scripted_providers(config); };
  }
  if (type == "http") {
    nlohmann::json config = provider_config;
    return [config](std::uint64_t) { return make_http_providers(config); };
  }
  throw ManifestError("unknown provider type: '" + type + "'");
}

std::vector<QAItem> make_world_dataset(const nlohmann::json& provider_config, int count) {
  std::vector<QAItem> items;
  const std::uint64_t base_seed = provider_config.value("seed", std::uint64_t{1});
  for (int i = 0; i < count; ++i) {
    WorldParams params;
    params.seed = base_seed + static_cast<std::uint64_t>(i);
    params.depth = provider_config.value("depth", 4);
    params.branching = provider_config.value("branching", 3);
    params.mode = provider_config.value("mode", std::string("search_only")) == "alternating"
                      ? HopMode::alternating
                      : HopMode::search_only;
    SyntheticWorld world = SyntheticWorld::build(params);
    QAItem item;
    item.id = "world-" + std::to_string(params.seed) + "-d" + std::to_string(params.depth);
    item.question = world.question();
    item.gold = world.gold();
    item.metadata = {{"world_seed", params.seed},
                     {"depth", params.depth},
                     {"branching", params.branching},
                     {"world_mode", params.mode == HopMode::alternating ? "alternating"
                                                                        : "search_only"}};
    if (provider_config.contains("policy")) item.metadata["policy"] = provider_config.at("policy");
    items.push_back(std::move(item));
  }
  return items;
}

namespace {

std::set<std::string> completed_ids(const std::string& records_path) {
  std::set<std::string> ids;
  std::ifstream in(records_path);
  if (!in) return ids;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (!j.is_discarded() && j.contains("id")) ids.insert(j.at("id").get<std::string>());
  }
  return ids;
}

struct ItemResult {
  RunRecord record;
  EventLog events;
  bool skipped = false;
  bool done = false;
};

}  // namespace

BenchResult run_benchmark(const RunManifest& manifest) {
  manifest.validate();
  std::filesystem::create_directories(manifest.output_dir);
  BenchResult result;
  result.records_path = (std::filesystem::path(manifest.output_dir) / "records.jsonl").string();
  result.events_path = (std::filesystem::path(manifest.output_dir) / "events.jsonl").string();

  std::vector<QAItem> items = manifest.dataset_path == "auto"
                                  ? make_world_dataset(manifest.providers, manifest.auto_count)
                                  : load_dataset(manifest.dataset_path);
  result.total = static_cast<int>(items.size());

  std::set<std::string> skip;
  if (manifest.resume) skip = completed_ids(result.records_path);
  if (!manifest.resume) {
    std::filesystem::remove(result.records_path);
    std::filesystem::remove(result.events_path);
  }

  const int n = static_cast<int>(items.size());
  std::vector<ItemResult> results(static_cast<std::size_t>(n));
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<int> next{0};

  auto process = [&](int i) {
    const QAItem& item = items[static_cast<std::size_t>(i)];
    ItemResult& slot = results[static_cast<std::size_t>(i)];
    if (skip.count(item.id)) {
      slot.skipped = true;
      return;
    }
    ProviderFactory factory = make_provider_factory(manifest.providers, item);
    auto exact_grader = [&item](const std::string& answer) {
      return grade_exact(answer, item.gold);
    };
    try {
      slot.record =
          execute_question(item.question, item.id, manifest.policy, manifest.agent, factory,
                           manifest.pricing, &slot.events, manifest.workers, exact_grader);
    } catch (const std::exception& e) {
      // Per-item provider failure: the record notes it and the run goes on.
      slot.record.question_id = item.id;
      slot.record.policy = manifest.policy;
      slot.record.answer = "None";
      slot.record.error = e.what();
    }
    if (!slot.record.correct.has_value()) {
      LlmClient* judge = nullptr;
      ProviderSet judge_set;
      if (manifest.judge_grading) {
        judge_set = factory(1);
        judge = judge_set.judge ? judge_set.judge.get() : nullptr;
      }
      try {
        GradeOutcome outcome =
            grade(item.question, slot.record.answer, item.gold, judge, &slot.events, item.id);
        slot.record.correct = outcome.correct;
      } catch (const JudgeUnavailable&) {
        // grading deferred; the `grade` subcommand can finish it later
      }
    }
  };

  auto worker = [&]() {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      process(i);
      {
        std::lock_guard<std::mutex> lock(mu);
        results[static_cast<std::size_t>(i)].done = true;
      }
      cv.notify_all();
    }
  };

  const int workers = std::max(1, std::min(manifest.workers, std::max(1, n)));
  std::vector<std::thread> pool;
  for (int i = 0; i < workers; ++i) pool.emplace_back(worker);

  // Single writer appends records and events in dataset order.
  std::ofstream records(result.records_path, std::ios::app);
  std::ofstream events(result.events_path, std::ios::app);
  EventLog ordered_events;
  for (int i = 0; i < n; ++i) {
    {
      std::unique_lock<std::mutex> lock(mu);
      cv.wait(lock, [&] { return results[static_cast<std::size_t>(i)].done; });
    }
    ItemResult& slot = results[static_cast<std::size_t>(i)];
    if (slot.skipped) {
      ++result.skipped;
      continue;
    }
    ordered_events.absorb(slot.events);
    records << slot.record.to_json().dump() << "\n";
    records.flush();
    ++result.executed;
  }
  for (auto& t : pool) t.join();
  events << ordered_events.text();
  events.flush();

  int graded = 0, correct = 0;
  Money cost_sum;
  for (const auto& r : results) {
    if (r.skipped || !r.done) continue;
    if (r.record.correct.has_value()) {
      ++graded;
      if (*r.record.correct) ++correct;
    }
    cost_sum += r.record.cost.total;
  }
  std::cout << "ran " << result.executed << "/" << result.total << " items (" << result.skipped
            << " resumed), graded " << graded << ", correct " << correct
            << ", total cost (minor units) " << cost_sum.to_decimal(4) << "\n";
  return result;
}

std::vector<RunRecord> load_records(const std::vector<std::string>& paths) {
  std::vector<RunRecord> records;
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open records: " + path);
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
      ++line_number;
      if (line.empty()) continue;
      nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded()) throw FormatError(line_number, "bad records line in " + path);
      records.push_back(RunRecord::from_json(j));
    }
  }
  return records;
}

std::vector<nlohmann::json> events_for_record(const std::vector<nlohmann::json>& events,
                                              const std::string& question_id) {
  std::vector<nlohmann::json> out;
  for (const auto& e : events) {
    const std::string run = e.value("run", std::string());
    if (run == question_id ||
        (run.size() > question_id.size() && run.rfind(question_id, 0) == 0 &&
         (run[question_id.size()] == '@' || run[question_id.size()] == '#')))
      out.push_back(e);
  }
  return out;
}

std::vector<nlohmann::json> load_events(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open events: " + path);
  std::vector<nlohmann::json> events;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    events.push_back(nlohmann::json::parse(line));
  }
  return events;
}

std::vector<ReportRow> build_report(const std::vector<RunRecord>& records) {
  if (records.empty()) throw EmptyInputError("report: no records");
  struct Group {
    std::vector<const RunRecord*> rows;
  };
  std::map<std::pair<std::string, std::int64_t>, Group> groups;
  int ungraded = 0;
  for (const auto& r : records) {
    if (!r.correct.has_value()) {
      ++ungraded;
      continue;
    }
    groups[{r.policy.label(), r.policy.budget_level()}].rows.push_back(&r);
  }
  if (ungraded > 0)
    std::cerr << "report: skipping " << ungraded << " ungraded record(s)\n";
  if (groups.empty()) throw EmptyInputError("report: no graded records");

  std::vector<ReportRow> rows;
  for (const auto& [key, group] : groups) {
    ReportRow row;
    row.policy_label = key.first;
    row.budget = key.second;
    const std::int64_t n = static_cast<std::int64_t>(group.rows.size());
    std::int64_t correct = 0, over = 0, search_sum = 0, browse_sum = 0;
    Money cost_sum;
    for (const auto* r : group.rows) {
      correct += *r->correct ? 1 : 0;
      over += r->over_budget ? 1 : 0;
      cost_sum += r->cost.total;
      if (r->tool_counts.count("search")) search_sum += r->tool_counts.at("search");
      if (r->tool_counts.count("browse")) browse_sum += r->tool_counts.at("browse");
    }
    row.accuracy = Rational(correct, n);
    row.mean_cost = cost_sum / Rational(n);
    row.mean_search = Rational(search_sum, n);
    row.mean_browse = Rational(browse_sum, n);
    row.over_budget_frac = Rational(over, n);
    rows.push_back(std::move(row));
  }

  // Pareto: dominated means some other row has >= accuracy and <= cost with
  // at least one strict inequality.
  for (auto& row : rows) {
    row.pareto = true;
    for (const auto& other : rows) {
      if (&other == &row) continue;
      const bool weakly_better =
          other.accuracy >= row.accuracy && other.mean_cost <= row.mean_cost;
      const bool strictly =
          other.accuracy > row.accuracy || other.mean_cost < row.mean_cost;
      if (weakly_better && strictly) {
        row.pareto = false;
        break;
      }
    }
  }
  return rows;
}

std::string report_to_csv(const std::vector<ReportRow>& rows) {
  std::string out =
      "policy,budget,accuracy,mean_cost_minor_units,mean_search,mean_browse,over_budget_frac,"
      "pareto\n";
  for (const auto& row : rows) {
    out += row.policy_label + "," + std::to_string(row.budget) + "," +
           row.accuracy.to_decimal(6) + "," + row.mean_cost.to_decimal(6) + "," +
           row.mean_search.to_decimal(6) + "," + row.mean_browse.to_decimal(6) + "," +
           row.over_budget_frac.to_decimal(6) + "," + (row.pareto ? "1" : "0") + "\n";
  }
  return out;
}

void write_report_csv(const std::vector<ReportRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << report_to_csv(rows);
}

int grade_records_file(const std::string& records_path, LlmClient* judge, bool regrade_all,
                       const std::string& question_lookup_dataset) {
  std::map<std::string, QAItem> lookup;
  if (!question_lookup_dataset.empty())
    for (auto& item : load_dataset(question_lookup_dataset)) lookup.emplace(item.id, item);

  std::ifstream in(records_path);
  if (!in) throw std::runtime_error("cannot open records: " + records_path);
  std::vector<nlohmann::json> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    lines.push_back(nlohmann::json::parse(line));
  }
  in.close();

  int regraded = 0;
  for (auto& j : lines) {
    if (!regrade_all && j.contains("correct")) continue;
    const std::string id = j.at("id").get<std::string>();
    auto it = lookup.find(id);
    std::string question = it != lookup.end() ? it->second.question : std::string();
    std::string gold = it != lookup.end() ? it->second.gold
                                          : j.value("gold", std::string());
    if (gold.empty()) continue;  // no gold available; stays ungraded
    GradeOutcome outcome = grade(question, j.value("answer", std::string()), gold, judge);
    if (outcome.correct.has_value()) {
      j["correct"] = *outcome.correct;
      ++regraded;
    }
  }

  const std::string tmp = records_path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write records: " + tmp);
    for (const auto& j : lines) out << j.dump() << "\n";
  }
  std::filesystem::rename(tmp, records_path);
  return regraded;
}

}  // namespace bats
