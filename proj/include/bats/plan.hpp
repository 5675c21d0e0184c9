#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bats/cost.hpp"
#include "bats/providers.hpp"

namespace bats {

struct NoPlanFoundError : std::runtime_error {
  NoPlanFoundError() : std::runtime_error("no plan checklist found in text") {}
};

/// Question clues split into candidate-expanding and property-checking types.
/// The lists are disjoint; a clue found in both sections stays in exploration.
struct ConstraintSet {
  std::vector<std::string> exploration;
  std::vector<std::string> verification;

  bool empty() const { return exploration.empty() && verification.empty(); }
};

enum class PlanStatus { pending, done, failed, partial };

char plan_marker(PlanStatus status);                      // ' ' 'x' '!' '~'
std::optional<PlanStatus> plan_status_from(char marker);

struct PlanResources {
  std::int64_t query_count = 0;
  std::int64_t url_count = 0;
  bool logged = false;  // whether the line carried a "(Query=#, URL=#)" log
};

struct PlanNode {
  std::string id;  // dotted numeric path like "1.2"; empty for opaque lines
  std::string description;
  PlanStatus status = PlanStatus::pending;
  PlanResources resources;
  std::vector<PlanNode> children;
};

/// Append-only checklist mirror. Node ids present in revision r exist in
/// every later revision; merge repairs deletions instead of rejecting them.
struct Plan {
  std::vector<PlanNode> roots;
  int revision = 0;

  bool empty() const { return roots.empty(); }
  std::size_t node_count() const;
  const PlanNode* find(const std::string& id) const;
  /// Sum of logged resource counts over the whole tree.
  PlanResources resource_totals() const;

  nlohmann::json to_json() const;
};

/// Parses checklist lines of the form
///   - [x] 1.1 find candidate list (Query=4, URL=1)
/// into a tree keyed by the dotted ids. Lines without a status marker are
/// preserved as opaque pending descriptions. Throws NoPlanFoundError when no
/// checklist line is present at all.
Plan parse_plan_block(const std::string& text);

std::string render_plan(const Plan& plan);

struct PlanMerge {
  Plan plan;
  std::vector<std::string> repairs;  // nodes the update dropped and we restored
};

/// Every node of `older` survives; nodes present in both take the update's
/// status/resources/description; new nodes are appended in textual order.
PlanMerge merge_plan_update(const Plan& older, const Plan& update);

/// Parses an "Exploration:" / "Verification:" bulleted reply. Returns
/// nullopt when neither section is present (a parse failure).
std::optional<ConstraintSet> parse_constraint_reply(const std::string& text);

struct DecomposeResult {
  ConstraintSet constraints;
  TokenUsage usage;
  bool degraded = false;  // both parse attempts failed; constraints empty
};

/// One LLM call (retried once on a malformed reply) that splits the question
/// into exploration and verification clues.
DecomposeResult decompose_constraints(const std::string& question, LlmClient& llm);

}  // namespace bats
