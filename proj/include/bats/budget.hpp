#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bats/money.hpp"

namespace bats {

/// Remaining-budget tier. Thresholds on the fraction remaining/limit:
/// [0.70, 1] HIGH, [0.30, 0.70) MEDIUM, [0.10, 0.30) LOW, [0, 0.10) CRITICAL.
enum class Regime { high, medium, low, critical };

const char* regime_name(Regime r);

/// Pure step function of remaining/limit, evaluated in exact integer
/// arithmetic (no floating point at the boundaries).
Regime classify_regime(std::int64_t remaining, std::int64_t limit);

struct ToolSpec {
  std::string name;              // registry key ("search", "browse")
  std::string display_name;      // name used in the budget block ("Query", "URL")
  std::string unit_description;  // what one unit means (one query string, one URL)
  Money price_per_call;

  ToolSpec(std::string n, std::string display, std::string unit, Money price)
      : name(std::move(n)),
        display_name(std::move(display)),
        unit_description(std::move(unit)),
        price_per_call(std::move(price)) {
    if (price_per_call < Money(0)) throw std::invalid_argument("ToolSpec: negative price");
  }
};

/// Ordered tool registry. Names must be unique; registration order is the
/// rendering order of the budget block.
class ToolSet {
 public:
  void add(ToolSpec spec);
  const ToolSpec& at(const std::string& name) const;
  bool contains(const std::string& name) const;
  const std::vector<ToolSpec>& tools() const { return tools_; }
  std::map<std::string, Money> prices() const;

  /// The search-agent pair: search units are query strings, browse units are
  /// URLs, both priced at $0.001 (1/10 minor unit) per call.
  static ToolSet search_agent_default();

 private:
  std::vector<ToolSpec> tools_;
};

/// Per-tool hard limits b_i, immutable for the lifetime of one question run.
struct BudgetVector {
  std::map<std::string, std::int64_t> limits;

  static BudgetVector uniform(const ToolSet& tools, std::int64_t limit);
};

struct ToolBudgetView {
  std::string name;
  std::string display_name;
  std::int64_t limit = 0;
  std::int64_t used = 0;
  std::int64_t remaining = 0;
  Regime regime = Regime::high;
};

/// Consistent point-in-time view: used + remaining == limit for every tool.
struct BudgetSnapshot {
  std::vector<ToolBudgetView> tools;  // in registration order

  const ToolBudgetView& at(const std::string& name) const;
  nlohmann::json to_json() const;
};

struct Reservation {
  std::string tool;
  std::int64_t units = 0;
  std::uint64_t sequence = 0;
};

enum class ReserveError {
  budget_exhausted,         // remaining == 0
  batch_exceeds_remaining,  // 0 < remaining < n; nothing reserved
};

struct ReserveResult {
  std::optional<Reservation> reservation;
  std::optional<ReserveError> error;
  std::int64_t remaining_after = 0;

  bool ok() const { return reservation.has_value(); }
};

/// Shared, mutex-protected per-question ledger. reserve() is an atomic
/// check-then-increment; a granted reservation is never refunded, so the
/// used[t] <= limit[t] invariant holds at every observable instant.
class BudgetLedger {
 public:
  using EventSink = std::function<void(nlohmann::json)>;

  BudgetLedger(ToolSet tools, BudgetVector budgets);

  /// All-or-nothing batch reservation of n units. A denied call leaves the
  /// ledger untouched.
  ReserveResult reserve(const std::string& tool, std::int64_t n);

  BudgetSnapshot snapshot() const;

  std::int64_t used(const std::string& tool) const;
  std::int64_t remaining(const std::string& tool) const;
  std::int64_t limit(const std::string& tool) const;

  /// True once some tool has zero remaining units.
  bool any_exhausted() const;
  /// True when every tool has zero remaining units.
  bool all_exhausted() const;

  std::map<std::string, std::int64_t> used_counts() const;
  const ToolSet& tools() const { return tools_; }
  const BudgetVector& budgets() const { return budgets_; }

  /// Reservation grant/deny events go to the sink as JSON records.
  void set_event_sink(EventSink sink);

 private:
  BudgetSnapshot snapshot_locked() const;

  ToolSet tools_;
  BudgetVector budgets_;
  mutable std::mutex mu_;
  std::map<std::string, std::int64_t> used_;
  std::uint64_t next_sequence_ = 1;
  EventSink sink_;
};

/// Renders the tracker block injected after each tool response:
///   <budget>
///   Query Budget Used: 2, Query Budget Remaining: 8
///   URL Budget Used: 0, URL Budget Remaining: 10
///   Make the best use of the available resources.
///   </budget>
std::string render_budget_block(const BudgetSnapshot& snapshot);

}  // namespace bats
