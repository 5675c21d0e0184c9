#include "bats/plan.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "bats/prompts.hpp"

namespace bats {

char plan_marker(PlanStatus status) {
  switch (status) {
    case PlanStatus::pending: return ' ';
    case PlanStatus::done: return 'x';
    case PlanStatus::failed: return '!';
    case PlanStatus::partial: return '~';
  }
  return ' ';
}

std::optional<PlanStatus> plan_status_from(char marker) {
  switch (marker) {
    case ' ': return PlanStatus::pending;
    case 'x':
    case 'X': return PlanStatus::done;
    case '!': return PlanStatus::failed;
    case '~': return PlanStatus::partial;
    default: return std::nullopt;
  }
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool is_dotted_id(const std::string& s) {
  if (s.empty()) return false;
  bool digit_seen = false, prev_dot = true;
  for (char c : s) {
    if (c == '.') {
      if (prev_dot) return false;
      prev_dot = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      digit_seen = true;
      prev_dot = false;
    } else {
      return false;
    }
  }
  return digit_seen && !prev_dot;
}

int id_depth(const std::string& id) {
  return 1 + static_cast<int>(std::count(id.begin(), id.end(), '.'));
}

std::string parent_id(const std::string& id) {
  auto dot = id.rfind('.');
  return dot == std::string::npos ? std::string() : id.substr(0, dot);
}

// Parses a trailing "(Query=4, URL=1)" log; returns the description with the
// log stripped when present.
std::string split_resources(std::string desc, PlanResources& res) {
  auto open = desc.rfind('(');
  if (open == std::string::npos) return desc;
  auto close = desc.find(')', open);
  if (close == std::string::npos) return desc;
  std::string inner = desc.substr(open + 1, close - open - 1);
  auto qpos = inner.find("Query=");
  auto upos = inner.find("URL=");
  if (qpos == std::string::npos || upos == std::string::npos) return desc;
  try {
    res.query_count = std::stoll(inner.substr(qpos + 6));
    res.url_count = std::stoll(inner.substr(upos + 4));
  } catch (const std::exception&) {
    return desc;
  }
  res.logged = true;
  return trim(desc.substr(0, open) + desc.substr(close + 1));
}

struct ParsedLine {
  PlanNode node;
  bool opaque = false;
};

std::optional<ParsedLine> parse_line(const std::string& raw) {
  std::string line = trim(raw);
  if (line.empty()) return std::nullopt;
  std::size_t i = 0;
  if (line[i] == '-' || line[i] == '*') ++i;
  while (i < line.size() && line[i] == ' ') ++i;

  ParsedLine out;
  if (i + 2 < line.size() && line[i] == '[' && line[i + 2] == ']') {
    auto status = plan_status_from(line[i + 1]);
    if (status) {
      out.node.status = *status;
      std::string rest = trim(line.substr(i + 3));
      auto space = rest.find(' ');
      std::string head = space == std::string::npos ? rest : rest.substr(0, space);
      if (is_dotted_id(head)) {
        out.node.id = head;
        rest = space == std::string::npos ? std::string() : trim(rest.substr(space + 1));
      }
      out.node.description = split_resources(rest, out.node.resources);
      return out;
    }
  }
  // No recognizable marker: keep the full line as an opaque pending item.
  out.opaque = true;
  out.node.description = line;
  return out;
}

void count_nodes(const std::vector<PlanNode>& nodes, std::size_t& n) {
  for (const auto& node : nodes) {
    ++n;
    count_nodes(node.children, n);
  }
}

const PlanNode* find_in(const std::vector<PlanNode>& nodes, const std::string& id) {
  for (const auto& node : nodes) {
    if (!node.id.empty() && node.id == id) return &node;
    if (const PlanNode* hit = find_in(node.children, id)) return hit;
  }
  return nullptr;
}

void totals_in(const std::vector<PlanNode>& nodes, PlanResources& res) {
  for (const auto& node : nodes) {
    if (node.resources.logged) {
      res.query_count += node.resources.query_count;
      res.url_count += node.resources.url_count;
      res.logged = true;
    }
    totals_in(node.children, res);
  }
}

nlohmann::json node_json(const PlanNode& n) {
  nlohmann::json j = {{"id", n.id},
                      {"description", n.description},
                      {"status", std::string(1, plan_marker(n.status))}};
  if (n.resources.logged)
    j["resources"] = {{"query", n.resources.query_count}, {"url", n.resources.url_count}};
  if (!n.children.empty()) {
    nlohmann::json kids = nlohmann::json::array();
    for (const auto& c : n.children) kids.push_back(node_json(c));
    j["children"] = kids;
  }
  return j;
}

void render_nodes(const std::vector<PlanNode>& nodes, int depth, std::string& out) {
  for (const auto& node : nodes) {
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
    out += "- [";
    out += plan_marker(node.status);
    out += "] ";
    if (!node.id.empty()) {
      out += node.id;
      if (!node.description.empty()) out += " ";
    }
    out += node.description;
    if (node.resources.logged)
      out += " (Query=" + std::to_string(node.resources.query_count) +
             ", URL=" + std::to_string(node.resources.url_count) + ")";
    out += "\n";
    render_nodes(node.children, depth + 1, out);
  }
}

void merge_level(const std::vector<PlanNode>& old_nodes, const std::vector<PlanNode>& new_nodes,
                 std::vector<PlanNode>& out, std::vector<std::string>& repairs);

PlanNode merge_node(const PlanNode& old_node, const PlanNode* new_node,
                    std::vector<std::string>& repairs) {
  PlanNode merged;
  merged.id = old_node.id;
  if (new_node) {
    merged.description = new_node->description.empty() ? old_node.description
                                                       : new_node->description;
    merged.status = new_node->status;
    merged.resources = new_node->resources.logged ? new_node->resources : old_node.resources;
    merge_level(old_node.children, new_node->children, merged.children, repairs);
  } else {
    repairs.push_back(old_node.id.empty() ? old_node.description : old_node.id);
    merged.description = old_node.description;
    merged.status = old_node.status;
    merged.resources = old_node.resources;
    merge_level(old_node.children, {}, merged.children, repairs);
  }
  return merged;
}

const PlanNode* match_in_level(const std::vector<PlanNode>& nodes, const PlanNode& target) {
  for (const auto& n : nodes) {
    if (!target.id.empty()) {
      if (n.id == target.id) return &n;
    } else if (n.id.empty() && n.description == target.description) {
      return &n;
    }
  }
  return nullptr;
}

void merge_level(const std::vector<PlanNode>& old_nodes, const std::vector<PlanNode>& new_nodes,
                 std::vector<PlanNode>& out, std::vector<std::string>& repairs) {
  for (const auto& old_node : old_nodes)
    out.push_back(merge_node(old_node, match_in_level(new_nodes, old_node), repairs));
  for (const auto& new_node : new_nodes) {
    if (match_in_level(old_nodes, new_node)) continue;
    out.push_back(new_node);
  }
}

}  // namespace

std::size_t Plan::node_count() const {
  std::size_t n = 0;
  count_nodes(roots, n);
  return n;
}

const PlanNode* Plan::find(const std::string& id) const { return find_in(roots, id); }

PlanResources Plan::resource_totals() const {
  PlanResources res;
  totals_in(roots, res);
  return res;
}

nlohmann::json Plan::to_json() const {
  nlohmann::json roots_json = nlohmann::json::array();
  for (const auto& r : roots) roots_json.push_back(node_json(r));
  return {{"revision", revision}, {"roots", roots_json}};
}

namespace {

PlanNode* find_mutable(std::vector<PlanNode>& nodes, const std::string& id) {
  for (auto& n : nodes) {
    if (!n.id.empty() && n.id == id) return &n;
    if (PlanNode* hit = find_mutable(n.children, id)) return hit;
  }
  return nullptr;
}

}  // namespace

Plan parse_plan_block(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  bool any_marker = false;
  std::vector<PlanNode> parsed;
  while (std::getline(in, raw)) {
    auto p = parse_line(raw);
    if (!p) continue;
    if (!p->opaque) any_marker = true;
    parsed.push_back(std::move(p->node));
  }
  if (!any_marker) throw NoPlanFoundError();

  Plan plan;
  for (auto& node : parsed) {
    const std::string parent = node.id.empty() ? std::string() : parent_id(node.id);
    PlanNode* parent_node = parent.empty() ? nullptr : find_mutable(plan.roots, parent);
    if (parent_node)
      parent_node->children.push_back(std::move(node));
    else
      plan.roots.push_back(std::move(node));
  }
  return plan;
}

std::string render_plan(const Plan& plan) {
  std::string out;
  render_nodes(plan.roots, 0, out);
  return out;
}

PlanMerge merge_plan_update(const Plan& older, const Plan& update) {
  PlanMerge result;
  result.plan.revision = older.revision + 1;
  merge_level(older.roots, update.roots, result.plan.roots, result.repairs);
  return result;
}

std::optional<ConstraintSet> parse_constraint_reply(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  ConstraintSet set;
  enum class Section { none, exploration, verification } section = Section::none;
  bool any_header = false;

  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
  };

  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty()) continue;
    std::string lt = lower(t);
    if (lt.rfind("exploration", 0) == 0) {
      section = Section::exploration;
      any_header = true;
      continue;
    }
    if (lt.rfind("verification", 0) == 0) {
      section = Section::verification;
      any_header = true;
      continue;
    }
    if (section == Section::none) continue;
    if (t[0] == '-' || t[0] == '*') t = trim(t.substr(1));
    if (t.empty()) continue;
    if (section == Section::exploration)
      set.exploration.push_back(t);
    else
      set.verification.push_back(t);
  }
  if (!any_header) return std::nullopt;

  // Disjointness: a clue listed in both sections belongs to exploration.
  auto in_exploration = [&](const std::string& clue) {
    return std::find(set.exploration.begin(), set.exploration.end(), clue) !=
           set.exploration.end();
  };
  std::vector<std::string> verification;
  for (const auto& clue : set.verification)
    if (!in_exploration(clue)) verification.push_back(clue);
  set.verification = std::move(verification);

  auto dedup = [](std::vector<std::string>& v) {
    std::vector<std::string> out;
    for (const auto& s : v)
      if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    v = std::move(out);
  };
  dedup(set.exploration);
  dedup(set.verification);
  return set;
}

DecomposeResult decompose_constraints(const std::string& question, LlmClient& llm) {
  DecomposeResult result;
  LlmRequest req;
  req.system = prompts::constraint_decomposition_system();
  req.turns.push_back({"user", "Question: " + question});
  req.temperature = 0.0;

  for (int attempt = 0; attempt < 2; ++attempt) {
    LlmResponse resp = llm.chat(req);
    result.usage += resp.usage;
    auto parsed = parse_constraint_reply(resp.text);
    if (parsed) {
      result.constraints = std::move(*parsed);
      return result;
    }
    req.turns.push_back({"assistant", resp.text});
    req.turns.push_back(
        {"user",
         "That reply had no Exploration/Verification sections. Reply again with exactly the "
         "two sections, one bullet per clue."});
  }
  result.degraded = true;  // proceed without decomposition
  return result;
}

}  // namespace bats
