#include "bats/world.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bats/mock_llm.hpp"

namespace bats {

namespace {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    if (std::isalnum(static_cast<unsigned char>(ch))) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    } else if (!cur.empty()) {
      tokens.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(cur);
  return tokens;
}

std::string make_token(std::mt19937_64& rng) {
  static const char alphabet[] = "abcdefghijkmnpqrstuvwxyz23456789";
  std::uniform_int_distribution<int> pick(0, sizeof(alphabet) - 2);
  std::string t(8, 'x');
  for (char& c : t) c = alphabet[pick(rng)];
  return t;
}

std::string pad3(int id) {
  std::string s = std::to_string(id);
  while (s.size() < 3) s.insert(s.begin(), '0');
  return s;
}

}  // namespace

SyntheticWorld SyntheticWorld::build(const WorldParams& params) {
  if (params.depth < 1) throw std::invalid_argument("world: depth must be >= 1");
  if (params.branching < 2 || params.branching > 10)
    throw std::invalid_argument("world: branching must be in [2, 10]");
  if (params.mode == HopMode::alternating && params.depth % 2 != 0)
    throw std::invalid_argument("world: alternating mode needs an even depth");

  SyntheticWorld w;
  w.params_ = params;
  std::mt19937_64 rng(params.seed * 1000003ull + std::uint64_t(params.depth) * 101ull +
                      std::uint64_t(params.branching) * 7ull +
                      (params.mode == HopMode::alternating ? 3ull : 0ull));

  const int hops = params.mode == HopMode::search_only ? params.depth : params.depth / 2;
  std::set<std::string> taken;
  auto fresh = [&] {
    std::string t;
    do {
      t = make_token(rng);
    } while (!taken.insert(t).second);
    return t;
  };

  for (int i = 0; i < hops; ++i) w.chain_keys_.push_back(fresh());
  w.gold_ = fresh();

  for (int i = 0; i < hops; ++i) {
    const bool last = i == hops - 1;
    const std::string& key = w.chain_keys_[i];

    WorldCard chain;
    chain.id = i * params.branching;
    chain.key = key;
    chain.title = "Record " + key;
    chain.url = "world://record/" + pad3(chain.id);
    const std::string reveal =
        last ? "The secret code of this record is " + w.gold_ + "."
             : "The next record in the chain is " + w.chain_keys_[i + 1] + ".";
    if (params.mode == HopMode::search_only) {
      chain.snippet = "Record " + key + ": archived chain entry. " + reveal;
      chain.detail = "Record " + key + ". Chain position " + std::to_string(i) + ". " + reveal +
                     " End of record.";
    } else {
      chain.snippet = "Record " + key + ": archived chain entry. Full chain record available at " +
                      chain.url + ".";
      chain.detail = "Record " + key + ". Chain position " + std::to_string(i) + ". " + reveal +
                     " End of record.";
    }
    w.cards_.push_back(std::move(chain));

    for (int j = 1; j < params.branching; ++j) {
      WorldCard decoy;
      decoy.id = i * params.branching + j;
      decoy.key = fresh();
      decoy.title = "Record " + decoy.key;
      decoy.url = "world://record/" + pad3(decoy.id);
      decoy.snippet = "Archive note: record " + key + " cross-references " + decoy.key +
                      ". No chain continuation here.";
      decoy.detail = "Record " + decoy.key + ": no further records.";
      w.cards_.push_back(std::move(decoy));
    }
  }

  w.question_ = "Follow the record chain that starts at record key " + w.chain_keys_[0] +
                ". What is the secret code of the final record in the chain?";

  for (const auto& c : w.cards_) {
    w.atoms_.push_back(c.key);
    w.atoms_.push_back(c.url);
  }
  w.atoms_.push_back(w.gold_);

  // Construction guarantee, re-checked exhaustively: not solvable in fewer
  // than depth calls, solvable in exactly depth.
  auto min_calls = w.min_calls_to_solve(params.depth);
  if (!min_calls || *min_calls != params.depth)
    throw std::logic_error("world: construction violated the minimal-depth invariant");
  return w;
}

std::set<std::string> SyntheticWorld::atoms_in(const std::string& text) const {
  std::set<std::string> found;
  for (const auto& atom : atoms_)
    if (text.find(atom) != std::string::npos) found.insert(atom);
  return found;
}

std::vector<const WorldCard*> SyntheticWorld::ranked_matches(const std::string& query) const {
  // Only record tokens (keys and the gold code) are indexed; template prose
  // and URLs never rank a card.
  std::set<std::string> indexed;
  for (const auto& c : cards_) indexed.insert(c.key);
  indexed.insert(gold_);

  std::vector<std::string> significant;
  for (const auto& t : tokenize(query))
    if (indexed.count(t)) significant.push_back(t);
  if (significant.empty()) return {};

  std::vector<std::pair<int, const WorldCard*>> scored;
  for (const auto& card : cards_) {
    // Title matches outrank snippet mentions, so a record's own card beats
    // the cards that merely reference it. Ties break by entity id.
    int score = 0;
    std::set<std::string> seen;
    for (const auto& t : significant) {
      if (seen.count(t)) continue;
      seen.insert(t);
      if (card.title.find(t) != std::string::npos) score += 2;
      if (card.snippet.find(t) != std::string::npos) score += 1;
    }
    if (score > 0) scored.emplace_back(score, &card);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second->id < b.second->id;
  });
  std::vector<const WorldCard*> out;
  for (const auto& [score, card] : scored) {
    out.push_back(card);
    if (out.size() == 10) break;
  }
  return out;
}

std::vector<std::vector<SearchResult>> SyntheticWorld::search(
    const std::vector<std::string>& queries) {
  std::vector<std::vector<SearchResult>> out;
  out.reserve(queries.size());
  for (const auto& q : queries) {
    if (q.empty()) throw EmptyQueryError();
    std::vector<SearchResult> results;
    for (const auto* card : ranked_matches(q))
      results.push_back(SearchResult{card->title, card->snippet, card->url});
    out.push_back(std::move(results));
  }
  return out;
}

std::vector<PageContent> SyntheticWorld::browse(const std::vector<std::string>& urls,
                                                const std::string& /*goal*/) {
  std::vector<PageContent> out;
  out.reserve(urls.size());
  for (const auto& url : urls) {
    const WorldCard* hit = nullptr;
    for (const auto& c : cards_)
      if (c.url == url) { hit = &c; break; }
    if (hit) {
      out.push_back(PageContent::make(url, hit->detail));
    } else {
      out.push_back(PageContent::make(url, "Error: page not found: " + url));
    }
  }
  return out;
}

std::optional<int> SyntheticWorld::min_calls_to_solve(int max_calls) const {
  // Knowledge-closure breadth-first search. A state is the set of revealed
  // atoms; an action is a search for any known non-URL atom or a browse of
  // any known URL. Single-atom queries dominate batched ones here: at most
  // `branching` (<=10) cards match any key, so the top-10 cutoff never drops
  // a match that a combined query would surface.
  const std::set<std::string> initial = atoms_in(question_);
  if (initial.count(gold_)) return 0;

  auto canonical = [](const std::set<std::string>& s) {
    std::string key;
    for (const auto& a : s) { key += a; key += '|'; }
    return key;
  };

  std::set<std::string> visited{canonical(initial)};
  std::deque<std::pair<std::set<std::string>, int>> frontier{{initial, 0}};
  while (!frontier.empty()) {
    auto [knowledge, calls] = frontier.front();
    frontier.pop_front();
    if (calls >= max_calls) continue;
    for (const auto& atom : knowledge) {
      std::string revealed_text;
      if (atom.rfind("world://", 0) == 0) {
        const WorldCard* hit = nullptr;
        for (const auto& c : cards_)
          if (c.url == atom) { hit = &c; break; }
        if (hit) revealed_text = hit->detail;
      } else {
        for (const auto* card : ranked_matches(atom))
          revealed_text += card->title + "\n" + card->snippet + "\n" + card->url + "\n";
      }
      std::set<std::string> next = knowledge;
      for (const auto& a : atoms_in(revealed_text)) next.insert(a);
      if (next.count(gold_)) return calls + 1;
      std::string key = canonical(next);
      if (visited.insert(key).second) frontier.emplace_back(std::move(next), calls + 1);
    }
  }
  return std::nullopt;
}

std::vector<std::string> SyntheticWorld::scripted_solution() const {
  std::vector<std::string> calls;
  for (std::size_t i = 0; i < chain_keys_.size(); ++i) {
    calls.push_back("search " + chain_keys_[i]);
    if (params_.mode == HopMode::alternating)
      calls.push_back("browse world://record/" + pad3(static_cast<int>(i) * params_.branching));
  }
  return calls;
}

void SyntheticWorld::save_jsonl(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write world file: " + path);
  nlohmann::json meta = {
      {"kind", "meta"},
      {"seed", params_.seed},
      {"depth", params_.depth},
      {"branching", params_.branching},
      {"mode", params_.mode == HopMode::search_only ? "search_only" : "alternating"},
      {"question", question_},
      {"gold", gold_},
      {"chain", chain_keys_}};
  out << meta.dump() << "\n";
  for (const auto& c : cards_) {
    nlohmann::json j = {{"kind", "card"}, {"id", c.id},         {"key", c.key},
                        {"title", c.title}, {"snippet", c.snippet}, {"url", c.url},
                        {"detail", c.detail}};
    out << j.dump() << "\n";
  }
}

SyntheticWorld SyntheticWorld::load_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open world file: " + path);
  SyntheticWorld w;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    if (j.at("kind") == "meta") {
      w.params_.seed = j.at("seed").get<std::uint64_t>();
      w.params_.depth = j.at("depth").get<int>();
      w.params_.branching = j.at("branching").get<int>();
      w.params_.mode = j.at("mode") == "alternating" ? HopMode::alternating : HopMode::search_only;
      w.question_ = j.at("question").get<std::string>();
      w.gold_ = j.at("gold").get<std::string>();
      w.chain_keys_ = j.at("chain").get<std::vector<std::string>>();
    } else {
      WorldCard c;
      c.id = j.at("id").get<int>();
      c.key = j.at("key").get<std::string>();
      c.title = j.at("title").get<std::string>();
      c.snippet = j.at("snippet").get<std::string>();
      c.url = j.at("url").get<std::string>();
      c.detail = j.at("detail").get<std::string>();
      w.cards_.push_back(std::move(c));
    }
  }
  for (const auto& c : w.cards_) {
    w.atoms_.push_back(c.key);
    w.atoms_.push_back(c.url);
  }
  w.atoms_.push_back(w.gold_);
  return w;
}

namespace {

std::string last_between(const std::string& text, const std::string& open,
                         const std::string& close) {
  auto start = text.rfind(open);
  if (start == std::string::npos) return {};
  start += open.size();
  auto end = text.find(close, start);
  if (end == std::string::npos) return text.substr(start);
  return text.substr(start, end - start);
}

std::string extract_after(const std::string& text, const std::string& marker) {
  auto pos = text.find(marker);
  if (pos == std::string::npos) return {};
  pos += marker.size();
  std::string out;
  while (pos < text.size() && std::isalnum(static_cast<unsigned char>(text[pos])))
    out += text[pos++];
  return out;
}

std::string tool_code_json(const std::string& tool, const std::string& param,
                           const std::string& value, bool with_goal) {
  nlohmann::json args;
  args[param] = nlohmann::json::array({value});
  if (with_goal) args["goal"] = "follow the record chain";
  nlohmann::json call = {{"name", tool}, {"arguments", args}};
  return call.dump();
}

/// State machine over the visible conversation. Each reply is derived only
/// from the rendered request, so replays are deterministic. Besides the
/// agent loop itself, it answers the decomposition, verifier, and judge
/// protocols, so one instance can stand in for every LLM role offline.
class ChainSolver {
 public:
  ChainSolver(std::shared_ptr<const SyntheticWorld> world, SolverStyle style, int blind_stop)
      : world_(std::move(world)), style_(style), blind_stop_(blind_stop) {}

  std::string operator()(const LlmRequest& request) {
    if (request.system.rfind("Analyze the question and categorize", 0) == 0)
      return "Exploration:\n- follow the record chain from the starting key\n"
             "Verification:\n- confirm the secret code of the final record";
    if (request.system.rfind("You are an AI Strategic Verifier", 0) == 0)
      return verifier_reply(request);
    if (request.system.rfind("You are an expert evaluator", 0) == 0)
      return judge_reply(request);

    std::string all;
    for (const auto& t : request.turns) { all += t.text; all += "\n"; }

    const std::string response = last_between(all, "<tool_response>", "</tool_response>");

    // Terminal: the secret code is visible somewhere in the conversation.
    std::string code = extract_after(all, "The secret code of this record is ");
    if (!code.empty())
      return "<think>The chain ends here; that is the code.</think>\n<answer>" + code +
             "</answer>";

    // A refusal or exhaustion notice means no further tool use is possible.
    if (response.find("budget") != std::string::npos &&
        (response.find("exhausted") != std::string::npos ||
         response.find("exceeds") != std::string::npos))
      return "<think>No budget left to continue the chain.</think>\n<answer>None</answer>";

    std::string next_key;
    std::string next_url;
    if (response.empty()) {
      next_key = extract_after(all, "starts at record key ");
    } else {
      next_key = extract_after(response, "The next record in the chain is ");
      if (world_->params().mode == HopMode::alternating && next_key.empty()) {
        auto pos = response.find("world://record/");
        if (pos != std::string::npos) next_url = response.substr(pos, 18);
      }
    }

    if (next_key.empty() && next_url.empty())
      return "<think>The trail went cold.</think>\n<answer>None</answer>";

    if (style_ == SolverStyle::budget_blind && calls_made_ >= blind_stop_)
      return "<think>I have searched enough; concluding.</think>\n<answer>None</answer>";

    if (style_ == SolverStyle::budget_aware) {
      const std::string block = last_between(all, "<budget>", "</budget>");
      if (!block.empty()) {
        const std::string field = next_url.empty() ? "Query Budget Remaining: " : "URL Budget Remaining: ";
        const std::string rem = extract_after(block, field);
        if (rem == "0")
          return "<think>The required tool budget is spent.</think>\n<answer>None</answer>";
      }
    }

    ++calls_made_;
    if (!next_url.empty())
      return "<think>Following the chain link to its record page.</think>\n<tool_code>" +
             tool_code_json("browse", "url", next_url, true) + "</tool_code>";
    return "<think>Looking up the next record key.</think>\n<tool_code>" +
           tool_code_json("search", "query", next_key, false) + "</tool_code>";
  }

 private:
  // SUCCESS whenever a concrete answer was proposed; PIVOT on "None".
  std::string verifier_reply(const LlmRequest& request) const {
    std::string inputs;
    for (const auto& t : request.turns) inputs += t.text + "\n";
    std::string answer;
    auto pos = inputs.find("* Current Answer: ");
    if (pos != std::string::npos) {
      pos += 18;
      auto end = inputs.find('\n', pos);
      answer = inputs.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    }
    if (!answer.empty() && answer != "None") {
      nlohmann::json v = {{"verification", "the chain terminated at a secret code"},
                          {"decision", "SUCCESS"},
                          {"justification", "a concrete code was produced"},
                          {"trajectory_summary", ""},
                          {"details", nlohmann::json::object()}};
      return v.dump();
    }
    nlohmann::json v = {{"verification", "no secret code was reached"},
                        {"decision", "PIVOT"},
                        {"justification", "the attempt ended without completing the chain"},
                        {"trajectory_summary", "the chain was not followed to its final record"},
                        {"details", {{"Strategic Recommendations",
                                      "restart from the starting key and spend fewer calls per "
                                      "hop"}}}};
    return v.dump();
  }

  // Picks the first non-"None" lettered option.
  std::string judge_reply(const LlmRequest& request) const {
    std::string inputs;
    for (const auto& t : request.turns) inputs += t.text + "\n";
    char letter = 'A';
    for (char c = 'A'; c <= 'Z'; ++c) {
      const std::string marker = std::string("Option ") + c + ": ";
      auto pos = inputs.find(marker);
      if (pos == std::string::npos) break;
      auto end = inputs.find('\n', pos);
      std::string answer = inputs.substr(pos + marker.size(),
                                         end == std::string::npos
                                             ? std::string::npos
                                             : end - pos - marker.size());
      if (answer != "None") {
        letter = c;
        break;
      }
    }
    return std::string("Justification: first concrete option.\nAnswer: \\boxed{") + letter +
           "}";
  }

  std::shared_ptr<const SyntheticWorld> world_;
  SolverStyle style_;
  int blind_stop_;
  int calls_made_ = 0;
};

}  // namespace

std::shared_ptr<LlmClient> make_world_solver_llm(std::shared_ptr<const SyntheticWorld> world,
                                                 SolverStyle style, int blind_stop) {
  return std::make_shared<CallbackLlm>(ChainSolver(std::move(world), style, blind_stop));
}

}  // namespace bats
