#include "bats/prompts.hpp"

#include <stdexcept>

namespace bats {

const char* mode_name(Mode mode) {
  switch (mode) {
    case Mode::react: return "react";
    case Mode::react_tracker: return "react_tracker";
    case Mode::bats: return "bats";
  }
  return "react";
}

Mode mode_from_name(const std::string& name) {
  if (name == "react") return Mode::react;
  if (name == "react_tracker") return Mode::react_tracker;
  if (name == "bats") return Mode::bats;
  throw std::invalid_argument("unknown mode: " + name);
}

namespace prompts {

namespace {

const char* kToolSchemas = R"({
  "name": "search",
  "description": "Performs batched web searches: supply an array 'query'; the tool retrieves the top 10 results for each query in one call.",
  "parameters": {
    "type": "object",
    "properties": {
      "query": {
        "type": "array",
        "items": {"type": "string"},
        "description": "Array of query strings. Include multiple complementary search queries in a single call."
      }
    },
    "required": ["query"]
  }
},
{
  "name": "browse",
  "description": "Visit webpage(s) and return the summary of the content.",
  "parameters": {
    "type": "object",
    "properties": {
      "url": {
        "type": "array",
        "items": {"type": "string"},
        "description": "The URL(s) of the webpage(s) to visit. Can be a single URL or an array of URLs."
      },
      "goal": {
        "type": "string",
        "description": "The specific information goal for browsing webpage(s)."
      }
    },
    "required": ["url", "goal"]
  }
})";

std::string budget_guideline(const ToolSet& tools) {
  std::string out = "## Budget\n\nYou have two independent budgets:\n";
  for (const auto& t : tools.tools())
    out += "- " + t.display_name + " Budget (for " + t.name + ")\n";
  out +=
      "Each string in 'query' or 'url' consumes 1 unit respectively.\n"
      "\n"
      "After each <tool_response>, a <budget> tag shows remaining units.\n"
      "You must ADAPT your strategy dynamically to the current budget state.\n"
      "\n"
      "### HIGH Budget (>=70%)\n"
      "- Search: 3-5 diverse queries in one batch.\n"
      "- Browse: up to 2-3 high-value URLs.\n"
      "- Goal: Broad exploration, build context fast.\n"
      "\n"
      "### MEDIUM Budget (30-70%)\n"
      "- Search: 2-3 precise, refined queries per cycle.\n"
      "- Browse: 1-2 URLs that close key knowledge gaps.\n"
      "- Goal: Converge; eliminate uncertainty efficiently.\n"
      "\n"
      "### LOW Budget (10-30%)\n"
      "- Search: 1 tightly focused query.\n"
      "- Browse: at most 1 most promising URL.\n"
      "- Goal: Verify a single critical fact or finalize answer.\n"
      "\n"
      "### CRITICAL (<10%)\n"
      "- Avoid using the depleted tool.\n"
      "- Only perform 1 minimal-cost query or browse if absolutely essential.\n"
      "- If uncertainty remains and no tool use is possible, output <answer>None</answer>.\n";
  return out;
}

const char* kPlanningGuideline =
    "## About questions\n"
    "\n"
    "Questions contain two types of constraints: exploration and verification.\n"
    "* Exploration: Broad, core requirements (e.g., birthday, profession). Use these for "
    "initial searches to surface candidates. You may combine 1-2 to form stronger queries.\n"
    "* Verification: Narrow, specific details. Apply these only after you have candidates, to "
    "confirm or filter them. Never begin with verification constraints.\n"
    "Start with exploration queries, then use verification to validate the results.\n"
    "\n"
    "## About planning\n"
    "\n"
    "Maintain a tree-structured checklist of actionable steps (each may require several tool "
    "calls).\n"
    "- Mark each step with its status: [ ] pending, [x] done, [!] failed, [~] partial.\n"
    "- Use numbered branches (1.1, 1.2) to represent alternative paths or candidate leads.\n"
    "- Log resource usage after execution: (Query=#, URL=#).\n"
    "- Keep all executed steps, never delete them, retain history to avoid repeats.\n"
    "- Update dynamically as you reason and gather info, adding or revising steps as needed.\n"
    "- Always consider current and remaining budget when updating the plan.\n"
    "- Write the current plan inside <plan> and </plan> tags whenever you update it.\n";

std::string step_syntax(bool tracker, const ToolSet& tools) {
  std::string out =
      "## Step syntax\n"
      "\n"
      "<think>\n"
      "Thinking process. Analyze the query, your internal knowledge, and search results to "
      "build your reasoning.";
  if (tracker) out += " Always justify tool choices based on the remaining budgets.";
  out +=
      "\n</think>\n"
      "<tool_code>\n"
      "{\"name\": \"tool name here\", \"arguments\": {\"parameter name here\": parameter value "
      "here, \"another parameter name here\": another parameter value here, ...}}\n"
      "</tool_code>\n"
      "<tool_response>\n"
      "tool_response here\n"
      "</tool_response>\n";
  if (tracker) {
    out += "<budget>\n";
    for (const auto& t : tools.tools())
      out += t.display_name + " Budget Used: [number], " + t.display_name +
             " Budget Remaining: [number]\n";
    out += std::string(kBudgetClosingSentence) + "\n</budget>\n";
  }
  out +=
      "\n"
      "Repeat <think><tool_code> until you have the final answer.\n"
      "<answer> Final solution only. </answer>\n"
      "\n"
      "## About answers\n"
      "\n"
      "* Only write the final answer inside <answer> and </answer>.\n"
      "* If you cannot find the answer, write <answer>None</answer>.\n";
  return out;
}

}  // namespace

std::string agent_system_prompt(Mode mode, const ToolSet& tools) {
  const bool tracker = mode != Mode::react;
  std::string out =
      "You are an AI reasoner with Google Search and Browsing tools. Solve the question by "
      "iterating: think, tool_code, tool_response, answer.\n"
      "\n"
      "## Tools\n"
      "You have access to 2 tools: search and browse.\n";
  out += kToolSchemas;
  out +=
      "\n\n"
      "You should start with one or more cycles of (thinking about which tool to use -> "
      "performing tool code -> waiting for tool response), and end with (thinking about the "
      "answer -> answer of the question). The thinking processes, tool codes, tool responses, "
      "and answer are enclosed within their tags. There could be multiple thinking processes, "
      "tool codes, tool call parameters and tool response parameters.\n\n";
  if (tracker) {
    out += budget_guideline(tools);
    out += "\n";
  }
  if (mode == Mode::bats) {
    out += kPlanningGuideline;
    out += "\n";
  }
  out += step_syntax(tracker, tools);
  return out;
}

std::string verifier_system_prompt() {
  return
      "You are an AI Strategic Verifier. Your primary goal is to evaluate a proposed answer, "
      "assess the viability of the current problem-solving plan, and decide the best course of "
      "action: declare success, continue with the current plan, or pivot to a new one.\n"
      "\n"
      "### Given Inputs\n"
      "\n"
      "* Question: The original user question. An answer is believed to exist.\n"
      "* Trajectory: The sequence of reasoning steps and tool calls taken so far in the current "
      "attempt.\n"
      "* Current Answer: The final answer produced by the current attempt.\n"
      "* Budget Status: Information on current tool call budget utilization and remaining "
      "budget, including search queries and browsing urls.\n"
      "\n"
      "### Your Task: A 3-Step Process\n"
      "\n"
      "You must proceed in the following order:\n"
      "\n"
      "#### Step 1: Conduct Verification Analysis\n"
      "\n"
      "First, perform a strict verification of the `Current Answer`.\n"
      "* Go through each constraint from the original Question one by one.\n"
      "* For each constraint, compare it against the `Current Answer` and the `Trajectory`.\n"
      "* State your finding for each constraint: satisfied, contradicted, or unverifiable.\n"
      "\n"
      "#### Step 2: Make a Strategic Decision\n"
      "\n"
      "Based on your verification and the budget, make one of three decisions.\n"
      "\n"
      "1. SUCCESS: If the verification in Step 1 passed (all constraints are satisfied). The "
      "task is complete.\n"
      "2. CONTINUE: If the verification failed because few constraints are unverifiable, but "
      "the overall plan is still sound and salvageable. This is the choice if **both** of these "
      "conditions are true:\n"
      "    * Promising Path: The `Trajectory` is generally sound, and the failure was due to a "
      "correctable error.\n"
      "    * Sufficient Budget: There is enough `Remaining Budget` to attempt a correction on "
      "this path.\n"
      "3. PIVOT: If the verification failed, signal to abandon the current plan and switch to "
      "another one. You should pivot if any of these conditions are true:\n"
      "    * Dead End: The `Trajectory` reveals a fundamental flaw in the current plan's logic "
      "that cannot be easily fixed.\n"
      "    * Failed Tool Calls: The Trajectory shows repeated, unsuccessful attempts to find "
      "certain info.\n"
      "    * Insufficient Budget: The `Remaining Budget` is too low to make another meaningful "
      "attempt or correction within the *current* plan.\n"
      "\n"
      "#### Step 3: Summarize for the Next Step\n"
      "\n"
      "This is the most critical step for guiding future actions.\n"
      "You need to first provide a **trajectory summary**: Summarize the agent's reasoning "
      "trajectory into a concise narrative. Explain its initial goal, the logical steps taken, "
      "key findings and the final conclusion, emphasizing how key findings or contradictions "
      "caused the agent to change its strategy.\n"
      "\n"
      "Then, provide additional details tailored to your decision in Step 2.\n"
      "\n"
      "* If the decision is SUCCESS:\n"
      "    * No further detail needed.\n"
      "\n"
      "* If the decision is CONTINUE / PIVOT:\n"
      "    * Failure Analysis: Diagnose the root cause of the failure. Identify the critical "
      "flaw (e.g., poor query design, flawed logic, misinterpreted evidence) and name the "
      "general failure pattern to prevent its recurrence.\n"
      "    * Useful information: Any useful intermediate findings or results from the current "
      "`Trajectory` that could be valuable inputs for the next attempt. This prevents redundant "
      "work.\n"
      "    * Strategic Recommendations: Provide actionable advice for the agent's next attempt. "
      "Suggest strategic pivots, new angles of investigation, or different ways to combine the "
      "problem's constraints. Explicitly state if it should backtrack to and resume from a "
      "specific step in the previous plan to avoid re-doing work.\n"
      "\n"
      "### **Output Requirement**\n"
      "\n"
      "Your final output must be a single JSON object with the following structure. Do not add "
      "any text before or after this JSON block.\n"
      "\n"
      "```json\n"
      "{\n"
      "  \"verification\": \"Verification analysis\",\n"
      "  \"decision\": \"SUCCESS | CONTINUE | PIVOT\",\n"
      "  \"justification\": \"A concise explanation for your strategic decision. Why is it a "
      "success, a dead end, or a correctable error?\",\n"
      "  \"trajectory_summary\": \"The informative trajectory summary.\",\n"
      "  \"details\": \"A JSON object containing the additional details required by Step 3. For "
      "a SUCCESS decision, this can be an empty object {}.\"\n"
      "}\n"
      "```\n";
}

std::string verifier_inputs(const std::string& question, const std::string& trajectory_text,
                            const std::string& answer, const std::string& budget_block) {
  return "* Question: " + question + "\n\n* Trajectory:\n" + trajectory_text +
         "\n\n* Current Answer: " + answer + "\n\n* Budget Status:\n" + budget_block + "\n";
}

std::string constraint_decomposition_system() {
  return
      "Analyze the question and categorize the clues it implies into two types: exploration "
      "clues, which expand the candidate space, and verification clues, which validate "
      "specific properties. Start with exploration queries, then use verification to validate "
      "the results.\n"
      "\n"
      "Output exactly two sections, one bullet per clue:\n"
      "Exploration:\n"
      "- <clue>\n"
      "Verification:\n"
      "- <clue>\n";
}

std::string best_of_n_system_prompt() {
  return
      "You are an expert evaluator. Your task is to select the most accurate and specific "
      "answer to an information-seeking question. The question has a deterministic answer. "
      "You'll be provided with several answers and their corresponding "
      "trajectories/verifications.\n"
      "\n"
      "**Instructions:**\n"
      "1.  **Identify the Core Question:** Determine the exact piece of information the "
      "question is asking for (e.g., a person, a location, a date).\n"
      "2.  **Evaluate Candidates:** For each candidate phrase, assess its factual accuracy.\n"
      "3.  **Compare and Select:** Choose the answer that is more likely to be correct. You "
      "should never choose \"None\" as the answer.\n"
      "\n"
      "**Output Format:**\n"
      "First, provide a brief justification explaining why the chosen answer is the most "
      "accurate and specific choice. Then, on a new line, output the letter of the best option "
      "inside a box.\n"
      "\n"
      "**Example:**\n"
      "Justification: Answer B is the most specific correct location...\n"
      "Answer: \\boxed{B}\n";
}

std::string majority_vote_system_prompt() {
  return
      "You are an expert evaluator. Your task is to select the answer that best represents the "
      "**majority vote** among the provided candidates. The question has a deterministic "
      "answer, and the goal is to identify which option most responses converge on. You'll be "
      "provided with several answers and their corresponding trajectories/verifications.\n"
      "\n"
      "**Instructions:**\n"
      "1. **Identify the Core Question:** Determine the exact piece of information the question "
      "is asking for (e.g., a person, a location, a date).\n"
      "2. **Tally the Votes:** Review all candidate answers and count how many times each "
      "distinct answer (or near-equivalent variant) appears. Treat semantically equivalent "
      "responses as votes for the same candidate.\n"
      "3. **Select the Majority:** Choose the answer that has the highest number of votes. If "
      "there is a tie, pick the option that is the most specific and consistent with the "
      "question. Never choose \"None\" or refuse to make a choice.\n"
      "\n"
      "**Output Format:**\n"
      "First, provide a brief justification explaining why the chosen answer was selected "
      "(e.g., \"Answer C has the majority of votes across candidates\"). Then, on a new line, "
      "output the letter of the best option inside a box.\n"
      "\n"
      "**Example:**\n"
      "Justification: Answer B received the majority of votes and aligns most consistently "
      "with the question.\n"
      "Answer: \\boxed{B}\n";
}

std::string lettered_options(const std::string& question,
                             const std::vector<std::pair<std::string, std::string>>& options) {
  std::string out = "Question: " + question + "\n\nCandidates:\n";
  char letter = 'A';
  for (const auto& [answer, context] : options) {
    out += "\nOption ";
    out += letter;
    out += ": " + answer + "\n";
    if (!context.empty()) out += "Trajectory/verification:\n" + context + "\n";
    ++letter;
  }
  return out;
}

std::string final_answer_prompt() {
  return
      "Provide your final answer now based on the information gathered so far. Only write the "
      "final answer inside <answer> and </answer>. If you cannot determine the answer, write "
      "<answer>None</answer>. Do not call any tools.";
}

std::string grade_system_prompt() {
  return
      "You are grading an answer to an information-seeking question with a deterministic gold "
      "answer. Decide whether the predicted answer refers to the same entity, value, or fact "
      "as the gold answer. Ignore formatting, casing, and phrasing differences; extra correct "
      "detail does not make a prediction wrong, but a different or missing fact does.\n"
      "\n"
      "Reply with a single line: \"correct: yes\" or \"correct: no\".";
}

std::string grade_inputs(const std::string& question, const std::string& prediction,
                         const std::string& gold) {
  return "Question: " + question + "\nPredicted answer: " + prediction +
         "\nGold answer: " + gold + "\n";
}

}  // namespace prompts

}  // namespace bats
