#include "bats/agent.hpp"

#include <algorithm>

namespace bats {

const char* step_kind_name(StepKind kind) {
  switch (kind) {
    case StepKind::think: return "think";
    case StepKind::tool_code: return "tool_code";
    case StepKind::tool_response: return "tool_response";
    case StepKind::budget_block: return "budget_block";
    case StepKind::answer: return "answer";
    case StepKind::forcing_message: return "forcing_message";
    case StepKind::plan_block: return "plan_block";
    case StepKind::summary: return "summary";
  }
  return "unknown";
}

const char* run_status_name(RunStatus status) {
  switch (status) {
    case RunStatus::running: return "running";
    case RunStatus::answered: return "answered";
    case RunStatus::budget_exhausted: return "budget_exhausted";
    case RunStatus::max_iterations: return "max_iterations";
  }
  return "unknown";
}

std::string render_step(const Step& step) {
  switch (step.kind) {
    case StepKind::think: return "<think>\n" + step.text + "\n</think>";
    case StepKind::tool_code:
      return "<tool_code>\n" +
             (step.call ? nlohmann::json{{"name", step.call->name},
                                         {"arguments", step.call->arguments}}
                              .dump()
                        : step.text) +
             "\n</tool_code>";
    case StepKind::tool_response: return "<tool_response>\n" + step.text + "\n</tool_response>";
    case StepKind::budget_block: return step.text;  // already a full <budget> block
    case StepKind::answer: return "<answer>" + step.text + "</answer>";
    case StepKind::forcing_message: return step.text;
    case StepKind::plan_block: return "<plan>\n" + step.text + "\n</plan>";
    case StepKind::summary: return "<summary>\n" + step.text + "\n</summary>";
  }
  return step.text;
}

bool Trajectory::has_answer_step() const {
  return std::any_of(steps.begin(), steps.end(),
                     [](const Step& s) { return s.kind == StepKind::answer; });
}

int Trajectory::count(StepKind kind) const {
  return static_cast<int>(
      std::count_if(steps.begin(), steps.end(), [&](const Step& s) { return s.kind == kind; }));
}

nlohmann::json AgentConfig::to_json() const {
  return {{"temperature_execute", temperature_execute},
          {"temperature_select", temperature_select},
          {"max_new_tokens", max_new_tokens},
          {"summarize_interval", summarize_interval},
          {"browse_char_cap", browse_char_cap},
          {"max_iterations", max_iterations},
          {"tracker_enabled", tracker_enabled},
          {"mode", mode_name(mode)}};
}

AgentConfig AgentConfig::from_json(const nlohmann::json& j) {
  AgentConfig c;
  c.mode = mode_from_name(j.value("mode", std::string("react")));
  c.tracker_enabled = c.mode != Mode::react;
  c.temperature_execute = j.value("temperature_execute", c.temperature_execute);
  c.temperature_select = j.value("temperature_select", c.temperature_select);
  c.max_new_tokens = j.value("max_new_tokens", c.max_new_tokens);
  c.summarize_interval = j.value("summarize_interval", c.summarize_interval);
  c.browse_char_cap = j.value("browse_char_cap", c.browse_char_cap);
  c.max_iterations = j.value("max_iterations", c.max_iterations);
  if (j.contains("tracker_enabled")) c.tracker_enabled = j.at("tracker_enabled").get<bool>();
  if (c.summarize_interval < 1) throw std::invalid_argument("summarize_interval must be >= 1");
  if (c.browse_char_cap == 0 || c.max_iterations < 1 || c.max_new_tokens < 1)
    throw std::invalid_argument("AgentConfig: caps must be positive");
  return c;
}

namespace {

std::string trim_copy(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string strip_code_fence(std::string body) {
  body = trim_copy(body);
  if (body.rfind("```", 0) == 0) {
    auto nl = body.find('\n');
    body = nl == std::string::npos ? std::string() : body.substr(nl + 1);
    auto close = body.rfind("```");
    if (close != std::string::npos) body = body.substr(0, close);
    body = trim_copy(body);
  }
  return body;
}

struct TagHit {
  std::size_t pos = std::string::npos;
  StepKind kind = StepKind::think;
  const char* open = nullptr;
  const char* close = nullptr;
};

TagHit next_tag(const std::string& text, std::size_t from) {
  static const struct {
    const char* open;
    const char* close;
    StepKind kind;
  } kTags[] = {
      {"<think>", "</think>", StepKind::think},
      {"<tool_code>", "</tool_code>", StepKind::tool_code},
      {"<answer>", "</answer>", StepKind::answer},
      {"<plan>", "</plan>", StepKind::plan_block},
  };
  TagHit best;
  for (const auto& tag : kTags) {
    auto pos = text.find(tag.open, from);
    if (pos != std::string::npos && pos < best.pos) {
      best.pos = pos;
      best.kind = tag.kind;
      best.open = tag.open;
      best.close = tag.close;
    }
  }
  return best;
}

Step make_tool_code_step(const std::string& body) {
  Step step;
  step.kind = StepKind::tool_code;
  step.text = strip_code_fence(body);
  nlohmann::json parsed = nlohmann::json::parse(step.text, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("name") ||
      !parsed.at("name").is_string()) {
    step.parse_error = true;
    return step;
  }
  ToolCall call;
  call.name = parsed.at("name").get<std::string>();
  call.arguments = parsed.value("arguments", nlohmann::json::object());
  if (!call.arguments.is_object()) {
    step.parse_error = true;
    return step;
  }
  if (validate_tool_call(call)) {
    step.parse_error = true;
    return step;
  }
  step.call = std::move(call);
  return step;
}

}  // namespace

std::vector<Step> parse_model_output(const std::string& text) {
  std::vector<Step> steps;
  std::string pending;  // untagged text looking for the nearest think step

  auto flush_pending_as_think = [&]() {
    std::string t = trim_copy(pending);
    pending.clear();
    if (t.empty()) return;
    Step s;
    s.kind = StepKind::think;
    s.text = std::move(t);
    steps.push_back(std::move(s));
  };

  std::size_t pos = 0;
  while (pos < text.size()) {
    TagHit hit = next_tag(text, pos);
    if (hit.pos == std::string::npos) {
      pending += text.substr(pos);
      break;
    }
    pending += text.substr(pos, hit.pos - pos);
    std::size_t body_start = hit.pos + std::string(hit.open).size();
    std::size_t close = text.find(hit.close, body_start);
    std::string body = close == std::string::npos
                           ? text.substr(body_start)
                           : text.substr(body_start, close - body_start);
    pos = close == std::string::npos ? text.size() : close + std::string(hit.close).size();

    if (hit.kind == StepKind::think) {
      Step s;
      s.kind = StepKind::think;
      std::string lead = trim_copy(pending);
      pending.clear();
      s.text = lead.empty() ? trim_copy(body) : lead + "\n" + trim_copy(body);
      steps.push_back(std::move(s));
      continue;
    }
    flush_pending_as_think();
    if (hit.kind == StepKind::tool_code) {
      steps.push_back(make_tool_code_step(body));
    } else {
      Step s;
      s.kind = hit.kind;
      s.text = trim_copy(body);
      steps.push_back(std::move(s));
    }
  }
  // Trailing untagged text attaches to the last think step when there is
  // one; otherwise it becomes its own think step.
  if (!trim_copy(pending).empty()) {
    if (!steps.empty() && steps.back().kind == StepKind::think) {
      steps.back().text += "\n" + trim_copy(pending);
    } else {
      flush_pending_as_think();
    }
  }
  return steps;
}

std::optional<std::string> validate_tool_call(const ToolCall& call) {
  auto array_of_strings = [](const nlohmann::json& v) {
    if (!v.is_array() || v.empty()) return false;
    for (const auto& e : v)
      if (!e.is_string() || e.get<std::string>().empty()) return false;
    return true;
  };
  if (call.name == "search") {
    if (!call.arguments.contains("query") || !array_of_strings(call.arguments.at("query")))
      return "search requires a non-empty string array 'query'";
    return std::nullopt;
  }
  if (call.name == "browse") {
    if (!call.arguments.contains("url") || !array_of_strings(call.arguments.at("url")))
      return "browse requires a non-empty string array 'url'";
    if (!call.arguments.contains("goal") || !call.arguments.at("goal").is_string())
      return "browse requires a string 'goal'";
    return std::nullopt;
  }
  return "unknown tool '" + call.name + "'; available tools: search, browse";
}

std::int64_t tool_call_units(const ToolCall& call) {
  const char* field = call.name == "browse" ? "url" : "query";
  if (!call.arguments.contains(field) || !call.arguments.at(field).is_array()) return 0;
  return static_cast<std::int64_t>(call.arguments.at(field).size());
}

std::vector<const Step*> compact_context(const Trajectory& trajectory,
                                         const AgentConfig& /*config*/) {
  const auto& steps = trajectory.steps;
  std::size_t start = 0;
  for (std::size_t i = 0; i < steps.size(); ++i)
    if (steps[i].kind == StepKind::summary) start = i;

  std::size_t last_response = steps.size();
  for (std::size_t i = start; i < steps.size(); ++i)
    if (steps[i].kind == StepKind::tool_response) last_response = i;

  std::vector<const Step*> out;
  for (std::size_t i = start; i < steps.size(); ++i) {
    if (steps[i].kind == StepKind::tool_response && i != last_response) continue;
    out.push_back(&steps[i]);
  }
  return out;
}

std::size_t context_char_length(const Trajectory& trajectory, const AgentConfig& config) {
  std::size_t n = 0;
  for (const Step* s : compact_context(trajectory, config)) n += render_step(*s).size();
  return n;
}

LlmRequest build_request(const Trajectory& trajectory, const RunInput& input,
                         const AgentConfig& config) {
  LlmRequest req;
  req.system = prompts::agent_system_prompt(config.mode, ToolSet::search_agent_default());
  req.temperature = config.temperature_execute;
  req.max_new_tokens = config.max_new_tokens;

  std::string first = "Question: " + input.question;
  if (!input.seed_context.empty())
    first += "\n\nContext from previous attempts:\n" + input.seed_context;
  req.turns.push_back({"user", std::move(first)});

  auto is_model_step = [](StepKind k) {
    return k == StepKind::think || k == StepKind::tool_code || k == StepKind::answer ||
           k == StepKind::plan_block;
  };
  std::string cur_text;
  std::string cur_role;
  auto flush = [&]() {
    if (!cur_text.empty()) req.turns.push_back({cur_role, cur_text});
    cur_text.clear();
  };
  for (const Step* s : compact_context(trajectory, config)) {
    std::string role = is_model_step(s->kind) ? "assistant" : "user";
    if (role != cur_role) {
      flush();
      cur_role = role;
    }
    if (!cur_text.empty()) cur_text += "\n";
    cur_text += render_step(*s);
  }
  flush();
  return req;
}

std::string render_context_text(const Trajectory& trajectory, const AgentConfig& config) {
  std::string out;
  for (const Step* s : compact_context(trajectory, config)) {
    out += render_step(*s);
    out += "\n";
  }
  return out;
}

namespace {

std::string render_search_response(const std::vector<std::string>& queries,
                                   const std::vector<std::vector<SearchResult>>& per_query) {
  std::string out;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (i) out += "\n";
    out += "Results for query \"" + queries[i] + "\":\n";
    if (i >= per_query.size() || per_query[i].empty()) {
      out += "No results.\n";
      continue;
    }
    int rank = 1;
    for (const auto& r : per_query[i]) {
      out += std::to_string(rank++) + ". " + r.title + "\n   " + r.snippet + "\n   URL: " +
             r.url + "\n";
    }
  }
  return out;
}

std::string render_browse_response(const std::vector<PageContent>& pages) {
  std::string out;
  for (std::size_t i = 0; i < pages.size(); ++i) {
    if (i) out += "\n";
    out += "Content of " + pages[i].url + (pages[i].truncated ? " (truncated)" : "") + ":\n" +
           pages[i].text + "\n";
  }
  return out;
}

// Answer-only exchange shared by the budget-exhaustion path and the
// sequential-forcing stop: one chat, tool calls ignored, one re-ask, then
// "None".
void forced_answer_exchange(Trajectory& traj, const RunInput& input, const AgentConfig& config,
                            const ProviderSet& providers, EventLog* events) {
  auto emit = [&](nlohmann::json e) {
    if (events) events->emit(std::move(e));
  };
  auto append = [&](Step s) {
    s.iteration = traj.iterations;
    emit({{"kind", "step"},
          {"run", input.run_id},
          {"it", traj.iterations},
          {"step", step_kind_name(s.kind)},
          {"digest", digest_hex(render_step(s))}});
    traj.steps.push_back(std::move(s));
  };

  Step prompt;
  prompt.kind = StepKind::forcing_message;
  prompt.text = prompts::final_answer_prompt();
  append(std::move(prompt));

  for (int attempt = 0; attempt < 2; ++attempt) {
    ++traj.iterations;
    LlmRequest req = build_request(traj, input, config);
    LlmResponse resp = providers.llm->chat(req);
    traj.usage += resp.usage;
    emit({{"kind", "chat"},
          {"run", input.run_id},
          {"it", traj.iterations},
          {"role", "forced_answer"},
          {"billed", true},
          {"tokens", resp.usage.to_json()},
          {"reply_digest", digest_hex(resp.text)}});
    bool answered = false;
    for (Step& step : parse_model_output(resp.text)) {
      // Tool calls are ignored here: nothing is dispatched, no budget moves.
      if (step.kind == StepKind::answer) {
        traj.final_answer = step.text;
        answered = true;
      }
      append(std::move(step));
      if (answered) break;
    }
    if (answered) return;
    if (attempt == 0) {
      Step again;
      again.kind = StepKind::forcing_message;
      again.text = "Reply with only your final answer inside <answer> and </answer> tags.";
      append(std::move(again));
    }
  }
  Step none;
  none.kind = StepKind::answer;
  none.text = "None";
  append(std::move(none));
  traj.final_answer = "None";
}

class LoopRunner {
 public:
  LoopRunner(const RunInput& input, BudgetLedger& ledger, const AgentConfig& config,
             const ProviderSet& providers, EventLog* events, LoopHooks* hooks)
      : input_(input),
        ledger_(ledger),
        config_(config),
        providers_(providers),
        events_(events),
        hooks_(hooks) {}

  Trajectory run() {
    Trajectory traj;
    traj.question_id = input_.run_id;
    emit({{"kind", "run_start"},
          {"run", input_.run_id},
          {"mode", mode_name(config_.mode)},
          {"ledger", ledger_.snapshot().to_json()}});

    while (traj.status == RunStatus::running) {
      if (traj.iterations >= config_.max_iterations) {
        traj.status = RunStatus::max_iterations;
        break;
      }
      LlmResponse resp = chat_agent(traj);
      process_output(traj, resp.text);
      if (traj.status == RunStatus::running && hooks_) {
        hooks_->on_iteration_end(traj, issued_tool_this_iteration_);
        if (traj.status == RunStatus::running && hooks_->wants_final_answer()) {
          conclude(traj);
          traj.status = RunStatus::answered;
        }
      }
    }
    if (traj.status == RunStatus::budget_exhausted)
      forced_final_answer(traj, input_, config_, providers_, events_);
    emit({{"kind", "run_end"},
          {"run", input_.run_id},
          {"status", run_status_name(traj.status)},
          {"iterations", traj.iterations},
          {"tokens", traj.usage.to_json()},
          {"ledger", ledger_.snapshot().to_json()}});
    return traj;
  }

 private:
  void emit(nlohmann::json e) {
    if (events_) events_->emit(std::move(e));
  }

  LlmResponse chat_agent(Trajectory& traj) {
    ++traj.iterations;
    LlmRequest req = build_request(traj, input_, config_);
    LlmResponse resp = providers_.llm->chat(req);
    traj.usage += resp.usage;
    emit({{"kind", "chat"},
          {"run", input_.run_id},
          {"it", traj.iterations},
          {"role", "agent"},
          {"billed", true},
          {"tokens", resp.usage.to_json()},
          {"request_digest", digest_hex(flatten_request_text(req))},
          {"reply_digest", digest_hex(resp.text)}});
    return resp;
  }

  static std::string flatten_request_text(const LlmRequest& req) {
    std::string flat = req.system;
    for (const auto& t : req.turns) flat += "\n" + t.role + ":" + t.text;
    return flat;
  }

  void append(Trajectory& traj, Step step) {
    step.iteration = traj.iterations;
    emit({{"kind", "step"},
          {"run", input_.run_id},
          {"it", traj.iterations},
          {"step", step_kind_name(step.kind)},
          {"digest", digest_hex(render_step(step))},
          {"ledger", ledger_.snapshot().to_json()}});
    traj.steps.push_back(std::move(step));
  }

  void append_message(Trajectory& traj, StepKind kind, std::string text) {
    Step s;
    s.kind = kind;
    s.text = std::move(text);
    append(traj, std::move(s));
  }

  void append_tracker_block(Trajectory& traj) {
    if (!config_.tracker_enabled) return;
    append_message(traj, StepKind::budget_block, render_budget_block(ledger_.snapshot()));
  }

  void update_plan_mirror(Trajectory& traj, const Step& step) {
    if (config_.mode != Mode::bats) return;
    try {
      Plan update = parse_plan_block(step.text);
      Plan previous = traj.plan_mirror ? *traj.plan_mirror : Plan{};
      PlanMerge merged = merge_plan_update(previous, update);
      traj.plan_mirror = merged.plan;
      nlohmann::json e = {{"kind", "plan"},
                          {"run", input_.run_id},
                          {"it", traj.iterations},
                          {"plan", merged.plan.to_json()}};
      if (!merged.repairs.empty()) e["repairs"] = merged.repairs;
      emit(std::move(e));
      // Self-reported resource logs may disagree with the ledger; that is a
      // plan-quality diagnostic, never a correction.
      PlanResources totals = merged.plan.resource_totals();
      if (totals.logged) {
        auto used = ledger_.used_counts();
        const std::int64_t used_search = used.count("search") ? used.at("search") : 0;
        const std::int64_t used_browse = used.count("browse") ? used.at("browse") : 0;
        if (totals.query_count > used_search || totals.url_count > used_browse)
          emit({{"kind", "plan_diagnostic"},
                {"run", input_.run_id},
                {"it", traj.iterations},
                {"note", "plan resource log exceeds ledger totals"},
                {"plan_query", totals.query_count},
                {"plan_url", totals.url_count},
                {"used_search", used_search},
                {"used_browse", used_browse}});
      }
    } catch (const NoPlanFoundError&) {
      emit({{"kind", "plan_diagnostic"},
            {"run", input_.run_id},
            {"it", traj.iterations},
            {"note", "plan block had no parseable checklist lines"}});
    }
  }

  void dispatch_tool(Trajectory& traj, const ToolCall& call) {
    issued_tool_this_iteration_ = true;
    std::string response_text;
    if (call.name == "search") {
      std::vector<std::string> queries;
      for (const auto& q : call.arguments.at("query")) queries.push_back(q.get<std::string>());
      try {
        response_text = render_search_response(queries, providers_.search->search(queries));
      } catch (const ProviderUnavailable& e) {
        response_text = std::string("Error: search provider unavailable: ") + e.what();
      }
    } else {
      std::vector<std::string> urls;
      for (const auto& u : call.arguments.at("url")) urls.push_back(u.get<std::string>());
      const std::string goal = call.arguments.at("goal").get<std::string>();
      std::vector<PageContent> pages;
      try {
        pages = providers_.browse->browse(urls, goal);
      } catch (const ProviderUnavailable& e) {
        for (const auto& u : urls)
          pages.push_back(PageContent::make(u, std::string("Error: fetch failed: ") + e.what()));
      }
      for (auto& p : pages)
        if (p.text.size() > config_.browse_char_cap) {
          p.text.resize(config_.browse_char_cap);
          p.truncated = true;
        }
      response_text = render_browse_response(pages);
    }
    append_message(traj, StepKind::tool_response, std::move(response_text));
    append_tracker_block(traj);
  }

  // Returns false when step processing must stop (terminal state reached).
  bool handle_tool_code(Trajectory& traj, Step step) {
    if (step.parse_error) {
      std::string reason = "the tool_code body was not a valid JSON call";
      nlohmann::json parsed = nlohmann::json::parse(step.text, nullptr, false);
      if (!parsed.is_discarded() && parsed.is_object() && parsed.contains("name") &&
          parsed.at("name").is_string()) {
        ToolCall probe{parsed.at("name").get<std::string>(),
                       parsed.value("arguments", nlohmann::json::object())};
        if (auto err = validate_tool_call(probe)) reason = *err;
      }
      append(traj, std::move(step));
      append_message(traj, StepKind::tool_response,
                     "Your tool_code could not be processed: " + reason +
                         ". No budget was consumed; fix the call and try again.");
      append_tracker_block(traj);
      return true;
    }

    const ToolCall call = *step.call;
    const std::int64_t units = tool_call_units(call);
    append(traj, std::move(step));
    ReserveResult res = ledger_.reserve(call.name, units);
    if (res.ok()) {
      dispatch_tool(traj, call);
      return true;
    }
    const ToolSpec& spec = ledger_.tools().at(call.name);
    if (*res.error == ReserveError::batch_exceeds_remaining) {
      append_message(traj, StepKind::tool_response,
                     "Your batch of " + std::to_string(units) + " " + call.name +
                         " units exceeds the remaining " + std::to_string(res.remaining_after) +
                         " in the " + spec.display_name +
                         " budget; nothing was dispatched. Re-issue a smaller batch.");
      append_tracker_block(traj);
      return true;
    }
    append_message(traj, StepKind::tool_response,
                   "The " + spec.display_name + " budget is exhausted; no further " + call.name +
                       " calls are possible.");
    append_tracker_block(traj);
    traj.status = RunStatus::budget_exhausted;
    return false;
  }

  bool handle_answer(Trajectory& traj, Step step) {
    const std::string answer = step.text;
    traj.final_answer = answer;
    append(traj, std::move(step));
    AnswerDecision decision = hooks_ ? hooks_->on_answer(traj, answer) : AnswerDecision{};
    switch (decision.kind) {
      case AnswerDecision::Kind::finish:
        traj.status = RunStatus::answered;
        return false;
      case AnswerDecision::Kind::inject_message:
        append_message(traj, StepKind::forcing_message, decision.text);
        return true;
      case AnswerDecision::Kind::replace_with_summary: {
        const std::size_t before = context_char_length(traj, config_);
        append_message(traj, StepKind::summary, decision.text);
        traj.iteration_at_last_summary = traj.iterations;
        emit({{"kind", "summary_substitution"},
              {"run", input_.run_id},
              {"it", traj.iterations},
              {"before_chars", before},
              {"after_chars", context_char_length(traj, config_)}});
        return true;
      }
    }
    return true;
  }

  void process_output(Trajectory& traj, const std::string& text) {
    issued_tool_this_iteration_ = false;
    for (Step& step : parse_model_output(text)) {
      bool keep_going = true;
      switch (step.kind) {
        case StepKind::tool_code:
          keep_going = handle_tool_code(traj, std::move(step));
          break;
        case StepKind::answer:
          keep_going = handle_answer(traj, std::move(step));
          break;
        case StepKind::plan_block: {
          Step copy = step;
          append(traj, std::move(step));
          update_plan_mirror(traj, copy);
          break;
        }
        default:
          append(traj, std::move(step));
          break;
      }
      if (!keep_going) break;
    }
  }

  // Answer-only closing prompt once sequential forcing stops. When the
  // trajectory already holds an answer attempt, the latest one stands.
  void conclude(Trajectory& traj) {
    if (traj.has_answer_step()) return;
    forced_answer_exchange(traj, input_, config_, providers_, events_);
  }

  const RunInput& input_;
  BudgetLedger& ledger_;
  const AgentConfig& config_;
  const ProviderSet& providers_;
  EventLog* events_;
  LoopHooks* hooks_;
  bool issued_tool_this_iteration_ = false;
};

}  // namespace

Trajectory run_react(const RunInput& input, BudgetLedger& ledger, const AgentConfig& config,
                     const ProviderSet& providers, EventLog* events, LoopHooks* hooks) {
  return LoopRunner(input, ledger, config, providers, events, hooks).run();
}

void forced_final_answer(Trajectory& trajectory, const RunInput& input, const AgentConfig& config,
                         const ProviderSet& providers, EventLog* events) {
  // Skipped when an answer attempt already exists in the context.
  if (trajectory.has_answer_step()) {
    if (trajectory.final_answer.empty()) trajectory.final_answer = "None";
    return;
  }
  forced_answer_exchange(trajectory, input, config, providers, events);
}

}  // namespace bats
