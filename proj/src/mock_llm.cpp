#include "bats/mock_llm.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace bats {

std::string flatten_request(const LlmRequest& request) {
  std::string flat = request.system;
  for (const auto& t : request.turns) {
    flat += "\n[";
    flat += t.role;
    flat += "]\n";
    flat += t.text;
  }
  return flat;
}

TokenUsage synthesize_usage(const LlmRequest& request, const std::string& reply) {
  TokenUsage u;
  u.input = static_cast<std::int64_t>((request.char_length() + 3) / 4);
  u.output = static_cast<std::int64_t>((reply.size() + 3) / 4);
  u.cache_hit = 0;
  return u;
}

ScriptedLlm::ScriptedLlm(std::vector<ScriptedTurn> turns, bool strict)
    : turns_(std::move(turns)), strict_(strict) {
  for (const auto& t : turns_)
    if (t.usage) t.usage->validate();
}

LlmResponse ScriptedLlm::chat(const LlmRequest& request) {
  if (next_ >= turns_.size())
    throw TranscriptExhausted("scripted transcript exhausted after " +
                              std::to_string(turns_.size()) + " turns");
  const ScriptedTurn& turn = turns_[next_];
  if (strict_ && !turn.expect_substrings.empty()) {
    const std::string flat = flatten_request(request);
    for (const auto& expected : turn.expect_substrings) {
      if (flat.find(expected) == std::string::npos)
        throw TranscriptMismatch("turn " + std::to_string(next_) +
                                 ": prompt missing expected substring: " + expected);
    }
  }
  ++next_;
  LlmResponse resp;
  resp.text = turn.reply;
  resp.usage = turn.usage ? *turn.usage : synthesize_usage(request, turn.reply);
  return resp;
}

ScriptedLlm ScriptedLlm::load_jsonl(const std::string& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open transcript: " + path);
  std::vector<ScriptedTurn> turns;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    ScriptedTurn t;
    t.reply = j.at("reply").get<std::string>();
    if (j.contains("expect"))
      for (const auto& e : j.at("expect")) t.expect_substrings.push_back(e.get<std::string>());
    if (j.contains("usage")) t.usage = TokenUsage::from_json(j.at("usage"));
    turns.push_back(std::move(t));
  }
  return ScriptedLlm(std::move(turns), strict);
}

void ScriptedLlm::save_jsonl(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write transcript: " + path);
  for (const auto& t : turns_) {
    nlohmann::json j = {{"reply", t.reply}};
    if (!t.expect_substrings.empty()) j["expect"] = t.expect_substrings;
    if (t.usage) j["usage"] = t.usage->to_json();
    out << j.dump() << "\n";
  }
}

}  // namespace bats
