#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bats/money.hpp"

namespace bats {

struct UnpricedToolError : std::runtime_error {
  explicit UnpricedToolError(const std::string& tool)
      : std::runtime_error("no price configured for tool: " + tool) {}
};

struct EmptyInputError : std::runtime_error {
  explicit EmptyInputError(const std::string& what) : std::runtime_error(what) {}
};

/// Token counts for one exchange or one whole run. cache_hit tokens are a
/// subset of input tokens.
struct TokenUsage {
  std::int64_t input = 0;
  std::int64_t output = 0;
  std::int64_t cache_hit = 0;

  TokenUsage& operator+=(const TokenUsage& o) {
    input += o.input;
    output += o.output;
    cache_hit += o.cache_hit;
    return *this;
  }
  bool operator==(const TokenUsage& o) const = default;

  void validate() const {
    if (input < 0 || output < 0 || cache_hit < 0)
      throw std::invalid_argument("TokenUsage: negative count");
    if (cache_hit > input)
      throw std::invalid_argument("TokenUsage: cache_hit exceeds input");
  }

  nlohmann::json to_json() const {
    return {{"input", input}, {"output", output}, {"cache_hit", cache_hit}};
  }
  static TokenUsage from_json(const nlohmann::json& j) {
    TokenUsage u;
    u.input = j.value("input", std::int64_t{0});
    u.output = j.value("output", std::int64_t{0});
    u.cache_hit = j.value("cache_hit", std::int64_t{0});
    return u;
  }
};

/// Per-token and per-call rates in currency minor units, exact rationals.
/// Cached input tokens bill at the cache rate instead of the input rate.
struct PricingTable {
  Money input_rate;      // per input token
  Money output_rate;     // per output token
  Money cache_hit_rate;  // per cache-hit token
  std::map<std::string, Money> tool_prices;  // per call
  std::string currency = "USD-cents";

  void validate() const {
    if (input_rate < Money(0) || output_rate < Money(0) || cache_hit_rate < Money(0))
      throw std::invalid_argument("PricingTable: negative token rate");
    if (cache_hit_rate > input_rate)
      throw std::invalid_argument("PricingTable: cache_hit rate exceeds input rate");
    for (const auto& [tool, price] : tool_prices)
      if (price < Money(0)) throw std::invalid_argument("PricingTable: negative price for " + tool);
  }

  /// Search-agent tool prices ($0.001 per search and per browse call).
  /// Token rates stay zero; live configs must supply them explicitly.
  static PricingTable default_tools();

  nlohmann::json to_json() const;
  static PricingTable from_json(const nlohmann::json& j);
};

/// (input - cache_hit) * input_rate + cache_hit * cache_rate + output * output_rate.
Money token_cost(const TokenUsage& usage, const PricingTable& pricing);

struct CostBreakdown {
  Money token_cost;
  std::map<std::string, Money> tool_cost;
  Money total;  // token_cost + sum(tool_cost), exactly

  nlohmann::json to_json() const;
  static CostBreakdown from_json(const nlohmann::json& j);
};

/// The unified post-hoc cost of one run: token cost plus per-call tool
/// prices. Throws UnpricedToolError if a used tool has no price.
CostBreakdown unified_cost(const TokenUsage& usage,
                           const std::map<std::string, std::int64_t>& tool_counts,
                           const PricingTable& pricing);

/// Recomputes the unified cost of a run from its event log: sums the billed
/// token deltas of chat events and the granted reservations. Must equal the
/// online total exactly for every run.
CostBreakdown cost_from_events(const std::vector<nlohmann::json>& events,
                               const PricingTable& pricing);

/// One record's contribution to a scaling curve.
struct CurveSample {
  std::int64_t budget_level = 0;
  bool correct = false;
  Money total_cost;
  std::map<std::string, std::int64_t> tool_counts;
};

struct CurveRow {
  std::int64_t budget_level = 0;
  std::int64_t n = 0;
  Rational accuracy;   // exact mean of correctness flags
  Rational mean_cost;  // exact mean of total costs, minor units
  std::map<std::string, Rational> mean_tool_counts;
};

/// Groups samples by budget level; one row per level, ascending.
std::vector<CurveRow> aggregate_curve(const std::vector<CurveSample>& samples);

}  // namespace bats
