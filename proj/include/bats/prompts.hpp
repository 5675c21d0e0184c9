#pragma once

#include <string>
#include <vector>

#include "bats/budget.hpp"

namespace bats {

enum class Mode { react, react_tracker, bats };

const char* mode_name(Mode mode);
Mode mode_from_name(const std::string& name);

namespace prompts {

/// Appended verbatim whenever the agent answers with budget left
/// (sequential scaling).
inline constexpr const char* kForcingMessage =
    "Wait, you still have remaining tool budget, use more search and browse tools to explore "
    "different information sources before concluding.";

/// Closing sentence of every budget block.
inline constexpr const char* kBudgetClosingSentence =
    "Make the best use of the available resources.";

/// The agent system prompt for the given mode. Tracker modes embed the
/// budget policy guideline (regime tiers); bats additionally embeds the
/// constraint-decomposition and checklist-planning instructions.
std::string agent_system_prompt(Mode mode, const ToolSet& tools);

/// Verifier role prompt (system) and the filled "Given Inputs" user turn.
std::string verifier_system_prompt();
std::string verifier_inputs(const std::string& question, const std::string& trajectory_text,
                            const std::string& answer, const std::string& budget_block);

std::string constraint_decomposition_system();

/// Judge prompts for answer selection across candidates. Both expect the
/// chosen option letter inside \boxed{}.
std::string best_of_n_system_prompt();
std::string majority_vote_system_prompt();
std::string lettered_options(const std::string& question,
                             const std::vector<std::pair<std::string, std::string>>& options);

/// The answer-only prompt used when the budget is gone (or sequential
/// forcing has stopped) and the run must conclude.
std::string final_answer_prompt();

/// Grading prompt: (question, prediction, gold) -> "correct: yes|no".
std::string grade_system_prompt();
std::string grade_inputs(const std::string& question, const std::string& prediction,
                         const std::string& gold);

}  // namespace prompts

}  // namespace bats
