#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace amlm {

enum class Role { kUser, kAgent };

struct DialogTurn {
  Role role;
  std::string text;
};

struct Session {
  std::string session_id;
  std::vector<DialogTurn> turns;
};

// One (agent query, user query) positive pair from a single session.
struct SessionPair {
  std::string session_id;
  std::string agent_query;
  std::string user_query;
};

struct KnowledgeEntry {
  std::string knowledge_id;
  std::string question;
};

struct TestCase {
  std::string query;
  std::vector<std::string> gold_ids;  // validated against the knowledge base
};

enum class PairingMode { kNearestAgent, kAllCross };

// Trims surrounding whitespace and collapses internal runs to single spaces.
std::string normalize_text(std::string_view text);

std::vector<Session> load_sessions(const std::filesystem::path& path);

// Merges maximal runs of consecutive same-role turns, texts joined by a
// single space. Idempotent.
Session splice_consecutive_turns(const Session& session);

// Expects a spliced session. kNearestAgent pairs each user turn with the
// nearest preceding agent turn; kAllCross emits every agent x user
// combination. Output is truncated to max_pairs.
std::vector<SessionPair> extract_pairs(const Session& session, int32_t max_pairs,
                                       PairingMode mode = PairingMode::kNearestAgent);

std::vector<KnowledgeEntry> load_knowledge(const std::filesystem::path& path);
std::vector<TestCase> load_testset(const std::filesystem::path& path,
                                   const std::vector<KnowledgeEntry>& kb);

std::vector<SessionPair> load_pairs(const std::filesystem::path& path);

void save_sessions(const std::vector<Session>& sessions, const std::filesystem::path& path);
void save_pairs(const std::vector<SessionPair>& pairs, const std::filesystem::path& path);
void save_knowledge(const std::vector<KnowledgeEntry>& kb, const std::filesystem::path& path);
void save_testset(const std::vector<TestCase>& cases, const std::filesystem::path& path);

struct SyntheticCorpus {
  std::vector<Session> sessions;
  std::vector<KnowledgeEntry> knowledge;
  std::vector<TestCase> testset;
};

// Deterministic template-paraphrase corpus: every intent owns a disjoint set
// of anchor and topic words drawn over a shared lexicon, each session holds
// an agent and a user paraphrase of the same intent, and the last two
// paraphrases per intent are held out as test cases.
SyntheticCorpus generate_synthetic_corpus(int32_t n_intents, int32_t paraphrases_per_intent,
                                          double noise_rate, uint64_t seed);

}  // namespace amlm
