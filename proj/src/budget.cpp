#include "bats/budget.hpp"

#include <algorithm>

namespace bats {

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::high: return "HIGH";
    case Regime::medium: return "MEDIUM";
    case Regime::low: return "LOW";
    case Regime::critical: return "CRITICAL";
  }
  return "UNKNOWN";
}

Regime classify_regime(std::int64_t remaining, std::int64_t limit) {
  if (limit <= 0) throw std::invalid_argument("classify_regime: limit must be positive");
  if (remaining < 0 || remaining > limit)
    throw std::invalid_argument("classify_regime: remaining out of range");
  // f = remaining/limit compared against 0.70 / 0.30 / 0.10 exactly.
  if (remaining * 10 >= limit * 7) return Regime::high;
  if (remaining * 10 >= limit * 3) return Regime::medium;
  if (remaining * 10 >= limit) return Regime::low;
  return Regime::critical;
}

void ToolSet::add(ToolSpec spec) {
  for (const auto& t : tools_)
    if (t.name == spec.name) throw std::invalid_argument("ToolSet: duplicate tool " + spec.name);
  tools_.push_back(std::move(spec));
}

const ToolSpec& ToolSet::at(const std::string& name) const {
  for (const auto& t : tools_)
    if (t.name == name) return t;
  throw std::out_of_range("ToolSet: unknown tool " + name);
}

bool ToolSet::contains(const std::string& name) const {
  return std::any_of(tools_.begin(), tools_.end(),
                     [&](const ToolSpec& t) { return t.name == name; });
}

std::map<std::string, Money> ToolSet::prices() const {
  std::map<std::string, Money> out;
  for (const auto& t : tools_) out.emplace(t.name, t.price_per_call);
  return out;
}

ToolSet ToolSet::search_agent_default() {
  ToolSet set;
  set.add(ToolSpec("search", "Query", "one query string", Money(1, 10)));
  set.add(ToolSpec("browse", "URL", "one URL", Money(1, 10)));
  return set;
}

BudgetVector BudgetVector::uniform(const ToolSet& tools, std::int64_t limit) {
  BudgetVector v;
  for (const auto& t : tools.tools()) v.limits[t.name] = limit;
  return v;
}

const ToolBudgetView& BudgetSnapshot::at(const std::string& name) const {
  for (const auto& t : tools)
    if (t.name == name) return t;
  throw std::out_of_range("BudgetSnapshot: unknown tool " + name);
}

nlohmann::json BudgetSnapshot::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& t : tools)
    j[t.name] = {{"limit", t.limit},
                 {"used", t.used},
                 {"remaining", t.remaining},
                 {"regime", regime_name(t.regime)}};
  return j;
}

BudgetLedger::BudgetLedger(ToolSet tools, BudgetVector budgets)
    : tools_(std::move(tools)), budgets_(std::move(budgets)) {
  for (const auto& [name, limit] : budgets_.limits) {
    if (!tools_.contains(name))
      throw std::invalid_argument("BudgetLedger: budget for unregistered tool " + name);
    if (limit < 0) throw std::invalid_argument("BudgetLedger: negative limit for " + name);
  }
  for (const auto& t : tools_.tools()) {
    if (!budgets_.limits.count(t.name))
      throw std::invalid_argument("BudgetLedger: no budget for tool " + t.name);
    used_[t.name] = 0;
  }
}

ReserveResult BudgetLedger::reserve(const std::string& tool, std::int64_t n) {
  if (!tools_.contains(tool)) throw std::out_of_range("BudgetLedger: unknown tool " + tool);
  if (n < 1) throw std::invalid_argument("BudgetLedger: reservation size must be >= 1");

  ReserveResult result;
  nlohmann::json event;
  {
    std::lock_guard<std::mutex> lock(mu_);
    const std::int64_t limit = budgets_.limits.at(tool);
    const std::int64_t rem = limit - used_[tool];
    const std::uint64_t seq = next_sequence_++;
    if (rem == 0) {
      result.error = ReserveError::budget_exhausted;
    } else if (rem < n) {
      result.error = ReserveError::batch_exceeds_remaining;
    } else {
      used_[tool] += n;
      result.reservation = Reservation{tool, n, seq};
    }
    result.remaining_after = limit - used_[tool];
    if (sink_) {
      event = {{"kind", "reserve"},
               {"seq", seq},
               {"tool", tool},
               {"n", n},
               {"granted", result.ok()},
               {"used_after", used_[tool]},
               {"remaining_after", result.remaining_after}};
      if (result.error)
        event["denied"] = *result.error == ReserveError::budget_exhausted
                              ? "budget_exhausted"
                              : "batch_exceeds_remaining";
    }
  }
  if (sink_ && !event.is_null()) sink_(std::move(event));
  return result;
}

BudgetSnapshot BudgetLedger::snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  return snapshot_locked();
}

BudgetSnapshot BudgetLedger::snapshot_locked() const {
  BudgetSnapshot snap;
  for (const auto& t : tools_.tools()) {
    ToolBudgetView v;
    v.name = t.name;
    v.display_name = t.display_name;
    v.limit = budgets_.limits.at(t.name);
    v.used = used_.at(t.name);
    v.remaining = v.limit - v.used;
    v.regime = v.limit == 0 ? Regime::critical : classify_regime(v.remaining, v.limit);
    snap.tools.push_back(std::move(v));
  }
  return snap;
}

std::int64_t BudgetLedger::used(const std::string& tool) const {
  std::lock_guard<std::mutex> lock(mu_);
  return used_.at(tool);
}

std::int64_t BudgetLedger::remaining(const std::string& tool) const {
  std::lock_guard<std::mutex> lock(mu_);
  return budgets_.limits.at(tool) - used_.at(tool);
}

std::int64_t BudgetLedger::limit(const std::string& tool) const {
  return budgets_.limits.at(tool);
}

bool BudgetLedger::any_exhausted() const {
  std::lock_guard<std::mutex> lock(mu_);
  for (const auto& [name, limit] : budgets_.limits)
    if (used_.at(name) >= limit) return true;
  return false;
}

bool BudgetLedger::all_exhausted() const {
  std::lock_guard<std::mutex> lock(mu_);
  for (const auto& [name, limit] : budgets_.limits)
    if (used_.at(name) < limit) return false;
  return true;
}

std::map<std::string, std::int64_t> BudgetLedger::used_counts() const {
  std::lock_guard<std::mutex> lock(mu_);
  return used_;
}

void BudgetLedger::set_event_sink(EventSink sink) {
  std::lock_guard<std::mutex> lock(mu_);
  sink_ = std::move(sink);
}

std::string render_budget_block(const BudgetSnapshot& snapshot) {
  std::string out = "<budget>\n";
  for (const auto& t : snapshot.tools) {
    out += t.display_name + " Budget Used: " + std::to_string(t.used) + ", " + t.display_name +
           " Budget Remaining: " + std::to_string(t.remaining) + "\n";
  }
  out += "Make the best use of the available resources.\n</budget>";
  return out;
}

}  // namespace bats
