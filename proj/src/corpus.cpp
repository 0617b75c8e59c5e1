#include "amlm/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_set>

#include "amlm/common.hpp"
#include "json.hpp"

namespace amlm {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

json parse_line(const std::string& line, const std::filesystem::path& path, size_t line_no) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw ParseError("'" + path.string() + "' line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
  }
}

std::string require_string(const json& obj, const char* key, const std::filesystem::path& path, size_t line_no) {
  if (!obj.contains(key) || !obj[key].is_string())
    throw ParseError("'" + path.string() + "' line " + std::to_string(line_no) + ": missing string field \"" +
                     key + "\"");
  return obj[key].get<std::string>();
}

// Calls fn(line, line_no) for every non-empty line. Line numbers are 1-based.
template <class Fn>
void for_each_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    fn(line, line_no);
  }
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

const char* role_name(Role role) { return role == Role::kUser ? "user" : "agent"; }

}  // namespace

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out += ' ';
      pending_space = false;
      out += c;
    }
  }
  return out;
}

std::vector<Session> load_sessions(const std::filesystem::path& path) {
  std::vector<Session> sessions;
  std::unordered_set<std::string> seen_ids;
  for_each_line(path, [&](const std::string& line, size_t line_no) {
    const json obj = parse_line(line, path, line_no);
    Session session;
    session.session_id = require_string(obj, "session_id", path, line_no);
    if (!seen_ids.insert(session.session_id).second)
      throw ParseError("'" + path.string() + "' line " + std::to_string(line_no) + ": duplicate session_id \"" +
                       session.session_id + "\"");
    if (!obj.contains("turns") || !obj["turns"].is_array() || obj["turns"].empty())
      throw ParseError("'" + path.string() + "' line " + std::to_string(line_no) +
                       ": \"turns\" must be a non-empty array");
    for (const auto& turn_obj : obj["turns"]) {
      DialogTurn turn;
      const std::string role = require_string(turn_obj, "role", path, line_no);
      if (role == "user") {
        turn.role = Role::kUser;
      } else if (role == "agent") {
        turn.role = Role::kAgent;
      } else {
        throw ParseError("'" + path.string() + "' line " + std::to_string(line_no) + ": unknown role \"" + role +
                         "\"");
      }
      turn.text = normalize_text(require_string(turn_obj, "text", path, line_no));
      if (turn.text.empty())
        throw ParseError("'" + path.string() + "' line " + std::to_string(line_no) + ": turn text empty after trimming");
      session.turns.push_back(std::move(turn));
    }
    sessions.push_back(std::move(session));
  });
  return sessions;
}

Session splice_consecutive_turns(const Session& session) {
  Session out;
  out.session_id = session.session_id;
  for (const auto& turn : session.turns) {
    if (!out.turns.empty() && out.turns.back().role == turn.role) {
      out.turns.back().text += ' ';
      out.turns.back().text += turn.text;
    } else {
      out.turns.push_back(turn);
    }
  }
  return out;
}

std::vector<SessionPair> extract_pairs(const Session& session, int32_t max_pairs, PairingMode mode) {
  if (max_pairs <= 0) throw InvalidArgument("extract_pairs: max_pairs must be positive");
  std::vector<SessionPair> pairs;
  if (mode == PairingMode::kNearestAgent) {
    const std::string* last_agent = nullptr;
    for (const auto& turn : session.turns) {
      if (turn.role == Role::kAgent) {
        last_agent = &turn.text;
      } else if (last_agent != nullptr) {
        if (static_cast<int32_t>(pairs.size()) >= max_pairs) break;
        pairs.push_back({session.session_id, *last_agent, turn.text});
      }
    }
  } else {
    for (const auto& agent_turn : session.turns) {
      if (agent_turn.role != Role::kAgent) continue;
      for (const auto& user_turn : session.turns) {
        if (user_turn.role != Role::kUser) continue;
        if (static_cast<int32_t>(pairs.size()) >= max_pairs) return pairs;
        pairs.push_back({session.session_id, agent_turn.text, user_turn.text});
      }
    }
  }
  return pairs;
}

std::vector<KnowledgeEntry> load_knowledge(const std::filesystem::path& path) {
  std::vector<KnowledgeEntry> kb;
  std::unordered_set<std::string> seen_ids;
  for_each_line(path, [&](const std::string& line, size_t line_no) {
    const json obj = parse_line(line, path, line_no);
    KnowledgeEntry entry;
    entry.knowledge_id = require_string(obj, "knowledge_id", path, line_no);
    entry.question = normalize_text(require_string(obj, "question", path, line_no));
    if (!seen_ids.insert(entry.knowledge_id).second)
      throw ParseError("'" + path.string() + "' line " + std::to_string(line_no) + ": duplicate knowledge_id \"" +
                       entry.knowledge_id + "\"");
    kb.push_back(std::move(entry));
  });
  return kb;
}

std::vector<TestCase> load_testset(const std::filesystem::path& path, const std::vector<KnowledgeEntry>& kb) {
  std::unordered_set<std::string> known;
  for (const auto& entry : kb) known.insert(entry.knowledge_id);
  std::vector<TestCase> cases;
  for_each_line(path, [&](const std::string& line, size_t line_no) {
    const json obj = parse_line(line, path, line_no);
    TestCase tc;
    tc.query = normalize_text(require_string(obj, "query", path, line_no));
    if (!obj.contains("gold_ids") || !obj["gold_ids"].is_array() || obj["gold_ids"].empty())
      throw ParseError("'" + path.string() + "' line " + std::to_string(line_no) +
                       ": \"gold_ids\" must be a non-empty array");
    for (const auto& id : obj["gold_ids"]) {
      if (!id.is_string())
        throw ParseError("'" + path.string() + "' line " + std::to_string(line_no) + ": gold id must be a string");
      std::string gold = id.get<std::string>();
      if (!known.count(gold))
        throw ParseError("'" + path.string() + "' line " + std::to_string(line_no) + ": gold id \"" + gold +
                         "\" not present in the knowledge base");
      tc.gold_ids.push_back(std::move(gold));
    }
    cases.push_back(std::move(tc));
  });
  return cases;
}

std::vector<SessionPair> load_pairs(const std::filesystem::path& path) {
  std::vector<SessionPair> pairs;
  for_each_line(path, [&](const std::string& line, size_t line_no) {
    const json obj = parse_line(line, path, line_no);
    SessionPair pair;
    pair.session_id = require_string(obj, "session_id", path, line_no);
    pair.agent_query = normalize_text(require_string(obj, "agent_query", path, line_no));
    pair.user_query = normalize_text(require_string(obj, "user_query", path, line_no));
    if (pair.agent_query.empty() || pair.user_query.empty())
      throw ParseError("'" + path.string() + "' line " + std::to_string(line_no) + ": pair with empty query text");
    pairs.push_back(std::move(pair));
  });
  return pairs;
}

void save_sessions(const std::vector<Session>& sessions, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  for (const auto& session : sessions) {
    ordered_json obj;
    obj["session_id"] = session.session_id;
    obj["turns"] = ordered_json::array();
    for (const auto& turn : session.turns) {
      ordered_json t;
      t["role"] = role_name(turn.role);
      t["text"] = turn.text;
      obj["turns"].push_back(std::move(t));
    }
    out << obj.dump() << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void save_pairs(const std::vector<SessionPair>& pairs, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  for (const auto& pair : pairs) {
    ordered_json obj;
    obj["session_id"] = pair.session_id;
    obj["agent_query"] = pair.agent_query;
    obj["user_query"] = pair.user_query;
    out << obj.dump() << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void save_knowledge(const std::vector<KnowledgeEntry>& kb, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  for (const auto& entry : kb) {
    ordered_json obj;
    obj["knowledge_id"] = entry.knowledge_id;
    obj["question"] = entry.question;
    out << obj.dump() << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void save_testset(const std::vector<TestCase>& cases, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  for (const auto& tc : cases) {
    ordered_json obj;
    obj["query"] = tc.query;
    obj["gold_ids"] = tc.gold_ids;
    out << obj.dump() << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

namespace {

constexpr int32_t kHoldoutPerIntent = 2;
constexpr int32_t kAnchorsPerIntent = 3;
constexpr int32_t kTopicsPerIntent = 5;
constexpr int32_t kTopicsPerParaphrase = 2;
constexpr int32_t kFillersPerParaphrase = 2;

const char* kFillerWords[] = {"please", "help",  "with",  "my",    "the",   "a",     "i",     "need",
                              "about",  "how",   "can",   "you",   "to",    "for",   "on",    "is",
                              "it",     "this",  "order", "today", "thanks", "hello", "am",    "was"};

std::string make_pseudo_word(Rng& rng) {
  static const char consonants[] = "bcdfgklmnprstvz";
  static const char vowels[] = "aeiou";
  const size_t syllables = 2 + rng.below(2);
  std::string word;
  for (size_t s = 0; s < syllables; ++s) {
    word += consonants[rng.below(sizeof(consonants) - 1)];
    word += vowels[rng.below(sizeof(vowels) - 1)];
  }
  return word;
}

struct IntentLexicon {
  std::vector<std::string> anchors;
  std::vector<std::string> topics;
};

// A paraphrase is all anchors, two topics and two fillers in shuffled order.
// Anchors guarantee same-intent paraphrases share at least three tokens while
// cross-intent paraphrases can share at most the two fillers.
std::vector<std::string> make_paraphrase(const IntentLexicon& intent, Rng& rng) {
  std::vector<std::string> tokens = intent.anchors;
  std::vector<size_t> topic_idx(intent.topics.size());
  for (size_t i = 0; i < topic_idx.size(); ++i) topic_idx[i] = i;
  rng.shuffle(topic_idx);
  for (int32_t t = 0; t < kTopicsPerParaphrase; ++t) tokens.push_back(intent.topics[topic_idx[static_cast<size_t>(t)]]);
  const size_t n_fillers = sizeof(kFillerWords) / sizeof(kFillerWords[0]);
  size_t f1 = rng.below(n_fillers);
  size_t f2 = rng.below(n_fillers - 1);
  if (f2 >= f1) ++f2;
  tokens.emplace_back(kFillerWords[f1]);
  tokens.emplace_back(kFillerWords[f2]);
  rng.shuffle(tokens);
  return tokens;
}

std::string apply_noise_and_join(std::vector<std::string> tokens, double noise_rate,
                                 const std::vector<std::string>& lexicon, Rng& rng) {
  for (auto& token : tokens) {
    if (noise_rate > 0.0 && rng.next_real() < noise_rate)
      token = lexicon[rng.below(lexicon.size())];
  }
  std::string text;
  for (const auto& token : tokens) {
    if (!text.empty()) text += ' ';
    text += token;
  }
  return text;
}

}  // namespace

SyntheticCorpus generate_synthetic_corpus(int32_t n_intents, int32_t paraphrases_per_intent,
                                          double noise_rate, uint64_t seed) {
  if (n_intents < 2) throw InvalidArgument("generate_synthetic_corpus: n_intents must be at least 2");
  if (paraphrases_per_intent < 3)
    throw InvalidArgument("generate_synthetic_corpus: paraphrases_per_intent must be at least 3");
  if (noise_rate < 0.0 || noise_rate > 1.0)
    throw InvalidArgument("generate_synthetic_corpus: noise_rate must lie in [0, 1]");

  Rng rng(seed);

  std::vector<IntentLexicon> intents(static_cast<size_t>(n_intents));
  std::vector<std::string> lexicon;
  std::unordered_set<std::string> used;
  for (const char* f : kFillerWords) used.insert(f);
  for (auto& intent : intents) {
    for (int32_t w = 0; w < kAnchorsPerIntent + kTopicsPerIntent; ++w) {
      std::string word = make_pseudo_word(rng);
      while (!used.insert(word).second) word = make_pseudo_word(rng);
      lexicon.push_back(word);
      if (w < kAnchorsPerIntent) {
        intent.anchors.push_back(std::move(word));
      } else {
        intent.topics.push_back(std::move(word));
      }
    }
  }
  for (const char* f : kFillerWords) lexicon.emplace_back(f);

  SyntheticCorpus corpus;
  const int32_t train_per_intent = paraphrases_per_intent - kHoldoutPerIntent;
  for (int32_t i = 0; i < n_intents; ++i) {
    const auto& intent = intents[static_cast<size_t>(i)];
    const std::string kid = "k" + std::to_string(i);

    std::vector<std::string> user_texts;
    for (int32_t j = 0; j < paraphrases_per_intent; ++j)
      user_texts.push_back(apply_noise_and_join(make_paraphrase(intent, rng), noise_rate, lexicon, rng));
    std::vector<std::string> agent_texts;
    for (int32_t j = 0; j < train_per_intent; ++j)
      agent_texts.push_back(apply_noise_and_join(make_paraphrase(intent, rng), noise_rate, lexicon, rng));

    for (int32_t j = 0; j < train_per_intent; ++j) {
      Session session;
      session.session_id = "s" + std::to_string(i) + "_" + std::to_string(j);
      session.turns.push_back({Role::kAgent, agent_texts[static_cast<size_t>(j)]});
      session.turns.push_back({Role::kUser, user_texts[static_cast<size_t>(j)]});
      corpus.sessions.push_back(std::move(session));
    }

    std::string question;
    for (const auto& a : intent.anchors) question += a + ' ';
    for (const auto& t : intent.topics) question += t + ' ';
    question.pop_back();
    corpus.knowledge.push_back({kid, std::move(question)});

    for (int32_t j = train_per_intent; j < paraphrases_per_intent; ++j)
      corpus.testset.push_back({user_texts[static_cast<size_t>(j)], {kid}});
  }
  return corpus;
}

}  // namespace amlm
