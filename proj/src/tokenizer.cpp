#include "amlm/tokenizer.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "amlm/common.hpp"
#include "json.hpp"

namespace amlm {

namespace {

const char* kSpecialTokens[Vocab::kNumSpecials] = {"[PAD]", "[UNK]", "[CLS]", "[MASK]"};

bool is_special_token(const std::string& token) {
  for (const char* s : kSpecialTokens) {
    if (token == s) return true;
  }
  return false;
}

Vocab vocab_from_tokens(std::vector<std::string> tokens) {
  Vocab v;
  v.tokens = std::move(tokens);
  v.ids.reserve(v.tokens.size());
  for (size_t i = 0; i < v.tokens.size(); ++i) {
    auto [it, inserted] = v.ids.emplace(v.tokens[i], static_cast<int32_t>(i));
    if (!inserted) throw ParseError("vocab: duplicate token '" + v.tokens[i] + "'");
  }
  return v;
}

}  // namespace

const std::string& Vocab::token_of(int32_t id) const {
  if (id < 0 || id >= size()) throw InvalidArgument("vocab: token id " + std::to_string(id) + " out of range");
  return tokens[static_cast<size_t>(id)];
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) words.emplace_back(text.substr(start, i - start));
  }
  return words;
}

Vocab build_vocab(const std::vector<std::string>& texts, int32_t max_size, int32_t min_freq) {
  if (max_size < Vocab::kNumSpecials + 1)
    throw InvalidArgument("build_vocab: max_size must be at least " + std::to_string(Vocab::kNumSpecials + 1));

  // Count frequencies; remember first-occurrence rank for the tie-break.
  std::unordered_map<std::string, std::pair<int64_t, int64_t>> stats;  // token -> (count, first_seen)
  int64_t seen = 0;
  for (const auto& text : texts) {
    for (auto& word : split_words(text)) {
      auto [it, inserted] = stats.emplace(std::move(word), std::make_pair(int64_t{0}, seen));
      it->second.first += 1;
      ++seen;
    }
  }

  std::vector<const std::pair<const std::string, std::pair<int64_t, int64_t>>*> ranked;
  ranked.reserve(stats.size());
  for (const auto& entry : stats) {
    if (entry.second.first >= min_freq && !is_special_token(entry.first)) ranked.push_back(&entry);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto* a, const auto* b) {
    if (a->second.first != b->second.first) return a->second.first > b->second.first;
    return a->second.second < b->second.second;
  });

  const size_t room = static_cast<size_t>(max_size) - Vocab::kNumSpecials;
  if (ranked.size() > room) ranked.resize(room);

  std::vector<std::string> tokens;
  tokens.reserve(Vocab::kNumSpecials + ranked.size());
  for (const char* s : kSpecialTokens) tokens.emplace_back(s);
  for (const auto* entry : ranked) tokens.push_back(entry->first);
  return vocab_from_tokens(std::move(tokens));
}

EncodedSentence encode(const Vocab& vocab, std::string_view text, int32_t max_len) {
  if (max_len < 2) throw InvalidArgument("encode: max_len must be at least 2");
  EncodedSentence out;
  out.ids.assign(static_cast<size_t>(max_len), Vocab::kPadId);
  out.ids[0] = Vocab::kClsId;
  int32_t pos = 1;
  for (const auto& word : split_words(text)) {
    if (pos >= max_len) break;
    out.ids[static_cast<size_t>(pos)] = vocab.id_of(word);
    ++pos;
  }
  out.true_len = pos;
  return out;
}

std::string decode(const Vocab& vocab, const std::vector<int32_t>& ids) {
  std::string out;
  for (int32_t id : ids) {
    if (id == Vocab::kPadId || id == Vocab::kClsId) continue;
    if (!out.empty()) out += ' ';
    out += vocab.token_of(id);
  }
  return out;
}

void save_vocab(const Vocab& vocab, const std::filesystem::path& path) {
  nlohmann::ordered_json doc;
  doc["tokens"] = vocab.tokens;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("save_vocab: cannot open '" + path.string() + "' for writing");
  out << doc.dump() << '\n';
  if (!out) throw IoError("save_vocab: write failed for '" + path.string() + "'");
}

Vocab load_vocab(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_vocab: cannot open '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("load_vocab: malformed JSON in '" + path.string() + "': " + e.what());
  }
  if (!doc.is_object() || !doc.contains("tokens") || !doc["tokens"].is_array())
    throw ParseError("load_vocab: expected {\"tokens\": [...]} in '" + path.string() + "'");
  std::vector<std::string> tokens;
  for (const auto& t : doc["tokens"]) {
    if (!t.is_string()) throw ParseError("load_vocab: non-string token in '" + path.string() + "'");
    tokens.push_back(t.get<std::string>());
  }
  if (tokens.size() < Vocab::kNumSpecials) throw ParseError("load_vocab: vocab smaller than the reserved specials");
  for (int i = 0; i < Vocab::kNumSpecials; ++i) {
    if (tokens[static_cast<size_t>(i)] != kSpecialTokens[i])
      throw ParseError("load_vocab: special token mismatch at id " + std::to_string(i));
  }
  return vocab_from_tokens(std::move(tokens));
}

}  // namespace amlm
