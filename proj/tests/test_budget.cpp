#include <doctest.h>

#include <atomic>
#include <random>
#include <thread>

#include "bats/budget.hpp"

using namespace bats;

namespace {

BudgetLedger make_ledger(std::int64_t search_limit, std::int64_t browse_limit) {
  BudgetVector budgets;
  budgets.limits["search"] = search_limit;
  budgets.limits["browse"] = browse_limit;
  return BudgetLedger(ToolSet::search_agent_default(), budgets);
}

}  // namespace

TEST_SUITE("budget_ledger") {

TEST_CASE("reserve fills the boundary exactly") {
  auto ledger = make_ledger(10, 10);
  auto r9 = ledger.reserve("search", 9);
  REQUIRE(r9.ok());
  auto r1 = ledger.reserve("search", 1);
  REQUIRE(r1.ok());
  CHECK(ledger.used("search") == 10);
  CHECK(ledger.remaining("search") == 0);
}

TEST_CASE("reserve on an exhausted tool reports BudgetExhausted") {
  auto ledger = make_ledger(10, 10);
  REQUIRE(ledger.reserve("search", 10).ok());
  auto denied = ledger.reserve("search", 1);
  CHECK(!denied.ok());
  CHECK(*denied.error == ReserveError::budget_exhausted);
  CHECK(ledger.used("search") == 10);
}

TEST_CASE("batch larger than remaining is all-or-nothing") {
  auto ledger = make_ledger(10, 10);
  REQUIRE(ledger.reserve("search", 8).ok());
  auto denied = ledger.reserve("search", 5);
  CHECK(!denied.ok());
  CHECK(*denied.error == ReserveError::batch_exceeds_remaining);
  CHECK(ledger.used("search") == 8);  // untouched
}

TEST_CASE("reserve validates inputs") {
  auto ledger = make_ledger(5, 5);
  CHECK_THROWS_AS(ledger.reserve("wiki", 1), std::out_of_range);
  CHECK_THROWS_AS(ledger.reserve("search", 0), std::invalid_argument);
}

TEST_CASE("snapshot is a consistent point-in-time view") {
  auto ledger = make_ledger(10, 10);
  REQUIRE(ledger.reserve("search", 3).ok());
  auto snap = ledger.snapshot();
  CHECK(snap.at("search").used == 3);
  CHECK(snap.at("search").remaining == 7);
  CHECK(snap.at("browse").used == 0);
  for (const auto& t : snap.tools) CHECK(t.used + t.remaining == t.limit);
}

TEST_CASE("fresh ledger snapshot equals limits with zero usage") {
  auto ledger = make_ledger(100, 100);
  auto snap = ledger.snapshot();
  for (const auto& t : snap.tools) {
    CHECK(t.used == 0);
    CHECK(t.remaining == t.limit);
    CHECK(t.regime == Regime::high);
  }
}

TEST_CASE("regime thresholds match the tier table") {
  // remaining/limit in {1.0, .70, .69, .30, .29, .10, .09, 0}
  CHECK(classify_regime(100, 100) == Regime::high);
  CHECK(classify_regime(70, 100) == Regime::high);
  CHECK(classify_regime(69, 100) == Regime::medium);
  CHECK(classify_regime(30, 100) == Regime::medium);
  CHECK(classify_regime(29, 100) == Regime::low);
  CHECK(classify_regime(10, 100) == Regime::low);
  CHECK(classify_regime(9, 100) == Regime::critical);
  CHECK(classify_regime(0, 100) == Regime::critical);
}

TEST_CASE("regime endpoints hold for every limit") {
  for (std::int64_t limit = 1; limit <= 200; ++limit) {
    CHECK(classify_regime(limit, limit) == Regime::high);
    CHECK(classify_regime(0, limit) == Regime::critical);
  }
}

TEST_CASE("regime function agrees with an exact-fraction oracle") {
  for (std::int64_t limit = 1; limit <= 60; ++limit) {
    for (std::int64_t rem = 0; rem <= limit; ++rem) {
      // Oracle over exact tenths: f >= 7/10, 3/10, 1/10.
      Regime expected;
      if (rem * 10 >= limit * 7) expected = Regime::high;
      else if (rem * 10 >= limit * 3) expected = Regime::medium;
      else if (rem * 10 >= limit * 1) expected = Regime::low;
      else expected = Regime::critical;
      CHECK(classify_regime(rem, limit) == expected);
    }
  }
}

TEST_CASE("budget block renders the exact tracker format") {
  auto ledger = make_ledger(10, 10);
  REQUIRE(ledger.reserve("search", 2).ok());
  const std::string block = render_budget_block(ledger.snapshot());
  CHECK(block ==
        "<budget>\n"
        "Query Budget Used: 2, Query Budget Remaining: 8\n"
        "URL Budget Used: 0, URL Budget Remaining: 10\n"
        "Make the best use of the available resources.\n"
        "</budget>");
}

TEST_CASE("budget block on fresh and exhausted ledgers") {
  auto fresh = make_ledger(100, 100);
  const std::string fresh_block = render_budget_block(fresh.snapshot());
  CHECK(fresh_block.find("Query Budget Used: 0, Query Budget Remaining: 100") !=
        std::string::npos);
  CHECK(fresh_block.find("URL Budget Used: 0, URL Budget Remaining: 100") != std::string::npos);

  auto spent = make_ledger(3, 2);
  REQUIRE(spent.reserve("search", 3).ok());
  REQUIRE(spent.reserve("browse", 2).ok());
  const std::string block = render_budget_block(spent.snapshot());
  CHECK(block.find("Query Budget Remaining: 0") != std::string::npos);
  CHECK(block.find("URL Budget Remaining: 0") != std::string::npos);
}

TEST_CASE("two concurrent reserves on one remaining unit: exactly one wins") {
  // Small-scale interleaving check, repeated to shake out orderings.
  for (int round = 0; round < 200; ++round) {
    auto ledger = make_ledger(10, 10);
    REQUIRE(ledger.reserve("search", 9).ok());
    std::atomic<int> granted{0};
    auto contender = [&] {
      if (ledger.reserve("search", 1).ok()) granted.fetch_add(1);
    };
    std::thread a(contender), b(contender);
    a.join();
    b.join();
    CHECK(granted.load() == 1);
    CHECK(ledger.used("search") == 10);
  }
}

TEST_CASE("concurrent stress: linearizable, all-or-nothing, never over limit") {
  auto ledger = make_ledger(97, 41);
  std::atomic<std::int64_t> granted_search{0}, granted_browse{0};
  auto hammer = [&](unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> size(1, 7);
    std::uniform_int_distribution<int> which(0, 1);
    for (int i = 0; i < 400; ++i) {
      const bool searchy = which(rng) == 0;
      const std::int64_t n = size(rng);
      auto res = ledger.reserve(searchy ? "search" : "browse", n);
      if (res.ok()) (searchy ? granted_search : granted_browse).fetch_add(n);
      auto snap = ledger.snapshot();
      for (const auto& t : snap.tools) {
        CHECK(t.used <= t.limit);
        CHECK(t.used + t.remaining == t.limit);
      }
    }
  };
  std::vector<std::thread> threads;
  for (unsigned i = 0; i < 8; ++i) threads.emplace_back(hammer, 1000 + i);
  for (auto& t : threads) t.join();
  CHECK(ledger.used("search") == granted_search.load());
  CHECK(ledger.used("browse") == granted_browse.load());
  CHECK(ledger.used("search") <= 97);
  CHECK(ledger.used("browse") <= 41);
}

TEST_CASE("ledger emits reservation events with sequence numbers") {
  auto ledger = make_ledger(2, 2);
  std::vector<nlohmann::json> events;
  ledger.set_event_sink([&](nlohmann::json e) { events.push_back(std::move(e)); });
  REQUIRE(ledger.reserve("search", 2).ok());
  CHECK(!ledger.reserve("search", 1).ok());
  REQUIRE(events.size() == 2);
  CHECK(events[0].at("granted") == true);
  CHECK(events[0].at("seq") == 1);
  CHECK(events[1].at("granted") == false);
  CHECK(events[1].at("denied") == "budget_exhausted");
  CHECK(events[1].at("seq") == 2);
}

TEST_CASE("ledger rejects unknown tools and negative limits at construction") {
  BudgetVector bad;
  bad.limits["wiki"] = 3;
  CHECK_THROWS_AS(BudgetLedger(ToolSet::search_agent_default(), bad), std::invalid_argument);
  BudgetVector negative;
  negative.limits["search"] = -1;
  negative.limits["browse"] = 1;
  CHECK_THROWS_AS(BudgetLedger(ToolSet::search_agent_default(), negative),
                  std::invalid_argument);
}

}  // TEST_SUITE
