#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bats/providers.hpp"

namespace bats {

/// How chain hops advance in a synthetic world.
///  search_only: each search reveals the next record key (d searches total).
///  alternating: a search reveals a URL, browsing it reveals the next key
///               (d must be even; d/2 searches + d/2 browses).
enum class HopMode { search_only, alternating };

struct WorldParams {
  std::uint64_t seed = 1;
  int depth = 1;       // tool calls provably required to reach the answer
  int branching = 3;   // results per chain query (1 chain card + b-1 distractors)
  HopMode mode = HopMode::search_only;
};

struct WorldCard {
  int id = 0;            // ranking tie-break: lower id wins
  std::string key;       // the record key this card is indexed under
  std::string title;
  std::string snippet;
  std::string url;
  std::string detail;    // page content served by browse
};

/// A deterministic knowledge-graph search world. Facts form a chain of
/// records keyed by opaque tokens; the question names the first key and the
/// gold answer is the secret code of the final record. By construction the
/// answer is reachable in exactly `depth` tool calls and in no fewer, which
/// build() re-checks with an exhaustive search over shorter call sequences.
class SyntheticWorld : public SearchClient, public BrowseClient {
 public:
  static SyntheticWorld build(const WorldParams& params);

  const WorldParams& params() const { return params_; }
  const std::string& question() const { return question_; }
  const std::string& gold() const { return gold_; }
  const std::vector<WorldCard>& cards() const { return cards_; }

  /// Token-overlap ranked lookup, deterministic in (seed, query). Stopwords
  /// (the generic template words) never score; only record tokens do.
  std::vector<std::vector<SearchResult>> search(
      const std::vector<std::string>& queries) override;

  /// Resolves world:// URLs to detail pages; unknown URLs produce an
  /// in-band error page rather than a thrown error.
  std::vector<PageContent> browse(const std::vector<std::string>& urls,
                                  const std::string& goal) override;

  /// Exhaustive knowledge-closure search: the fewest tool calls (search or
  /// browse) that reveal the gold answer, starting from the question text
  /// alone, or nullopt if it is unreachable within max_calls.
  std::optional<int> min_calls_to_solve(int max_calls) const;

  /// The intended call sequence ("search k" / "browse u"), length == depth.
  std::vector<std::string> scripted_solution() const;

  void save_jsonl(const std::string& path) const;
  static SyntheticWorld load_jsonl(const std::string& path);

 private:
  SyntheticWorld() = default;
  std::vector<const WorldCard*> ranked_matches(const std::string& query) const;
  std::set<std::string> atoms_in(const std::string& text) const;

  WorldParams params_;
  std::string question_;
  std::string gold_;
  std::vector<WorldCard> cards_;
  std::vector<std::string> chain_keys_;  // hop order
  std::vector<std::string> atoms_;       // every key, url and the gold token
};

/// Scripted solving behavior for synthetic worlds, exposed as an LLM.
enum class SolverStyle {
  budget_aware,  // follows the chain while the budget block shows units left
  budget_blind,  // concludes prematurely after `blind_stop` calls
};

std::shared_ptr<LlmClient> make_world_solver_llm(std::shared_ptr<const SyntheticWorld> world,
                                                 SolverStyle style, int blind_stop = 3);

}  // namespace bats
