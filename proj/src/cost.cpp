#include "bats/cost.hpp"

#include <algorithm>

namespace bats {

PricingTable PricingTable::default_tools() {
  PricingTable p;
  p.tool_prices.emplace("search", Money(1, 10));
  p.tool_prices.emplace("browse", Money(1, 10));
  return p;
}

nlohmann::json PricingTable::to_json() const {
  nlohmann::json tools = nlohmann::json::object();
  for (const auto& [name, price] : tool_prices) tools[name] = price.to_string();
  return {{"currency", currency},
          {"token_rates",
           {{"input", input_rate.to_string()},
            {"output", output_rate.to_string()},
            {"cache_hit", cache_hit_rate.to_string()}}},
          {"tool_prices", tools}};
}

PricingTable PricingTable::from_json(const nlohmann::json& j) {
  auto rate = [](const nlohmann::json& v, const char* what) {
    auto r = Rational::parse(v.get<std::string>());
    if (!r) throw std::invalid_argument(std::string("PricingTable: bad rate for ") + what);
    return *r;
  };
  PricingTable p;
  p.currency = j.value("currency", std::string("USD-cents"));
  if (j.contains("token_rates")) {
    const auto& tr = j.at("token_rates");
    if (tr.contains("input")) p.input_rate = rate(tr.at("input"), "input");
    if (tr.contains("output")) p.output_rate = rate(tr.at("output"), "output");
    if (tr.contains("cache_hit")) p.cache_hit_rate = rate(tr.at("cache_hit"), "cache_hit");
  }
  if (j.contains("tool_prices"))
    for (const auto& [name, v] : j.at("tool_prices").items())
      p.tool_prices.emplace(name, rate(v, name.c_str()));
  p.validate();
  return p;
}

Money token_cost(const TokenUsage& usage, const PricingTable& pricing) {
  usage.validate();
  return Money(usage.input - usage.cache_hit) * pricing.input_rate +
         Money(usage.cache_hit) * pricing.cache_hit_rate +
         Money(usage.output) * pricing.output_rate;
}

nlohmann::json CostBreakdown::to_json() const {
  nlohmann::json tools = nlohmann::json::object();
  for (const auto& [name, cost] : tool_cost) tools[name] = cost.to_string();
  return {{"token_cost", token_cost.to_string()},
          {"tool_cost", tools},
          {"total", total.to_string()}};
}

CostBreakdown CostBreakdown::from_json(const nlohmann::json& j) {
  auto money = [](const nlohmann::json& v) {
    auto r = Rational::parse(v.get<std::string>());
    if (!r) throw std::invalid_argument("CostBreakdown: bad money value");
    return *r;
  };
  CostBreakdown c;
  c.token_cost = money(j.at("token_cost"));
  for (const auto& [name, v] : j.at("tool_cost").items()) c.tool_cost.emplace(name, money(v));
  c.total = money(j.at("total"));
  return c;
}

CostBreakdown unified_cost(const TokenUsage& usage,
                           const std::map<std::string, std::int64_t>& tool_counts,
                           const PricingTable& pricing) {
  CostBreakdown out;
  out.token_cost = token_cost(usage, pricing);
  out.total = out.token_cost;
  for (const auto& [tool, count] : tool_counts) {
    if (count < 0) throw std::invalid_argument("unified_cost: negative count for " + tool);
    auto it = pricing.tool_prices.find(tool);
    if (it == pricing.tool_prices.end()) throw UnpricedToolError(tool);
    Money cost = it->second * Money(count);
    out.tool_cost.emplace(tool, cost);
    out.total += cost;
  }
  return out;
}

CostBreakdown cost_from_events(const std::vector<nlohmann::json>& events,
                               const PricingTable& pricing) {
  TokenUsage usage;
  std::map<std::string, std::int64_t> counts;
  for (const auto& e : events) {
    const std::string kind = e.value("kind", std::string());
    if (kind == "chat" && e.value("billed", false)) {
      usage += TokenUsage::from_json(e.at("tokens"));
    } else if (kind == "reserve" && e.value("granted", false)) {
      counts[e.at("tool").get<std::string>()] += e.at("n").get<std::int64_t>();
    }
  }
  return unified_cost(usage, counts, pricing);
}

std::vector<CurveRow> aggregate_curve(const std::vector<CurveSample>& samples) {
  if (samples.empty()) throw EmptyInputError("aggregate_curve: no samples");
  std::map<std::int64_t, std::vector<const CurveSample*>> groups;
  for (const auto& s : samples) groups[s.budget_level].push_back(&s);

  std::vector<CurveRow> rows;
  for (const auto& [level, group] : groups) {
    CurveRow row;
    row.budget_level = level;
    row.n = static_cast<std::int64_t>(group.size());
    std::int64_t correct = 0;
    Money cost_sum;
    std::map<std::string, std::int64_t> count_sums;
    for (const auto* s : group) {
      correct += s->correct ? 1 : 0;
      cost_sum += s->total_cost;
      for (const auto& [tool, c] : s->tool_counts) count_sums[tool] += c;
    }
    row.accuracy = Rational(correct, row.n);
    row.mean_cost = cost_sum / Rational(row.n);
    for (const auto& [tool, sum] : count_sums)
      row.mean_tool_counts.emplace(tool, Rational(sum, row.n));
    rows.push_back(std::move(row));
  }
  return rows;  // std::map iteration gives ascending budget levels
}

}  // namespace bats
