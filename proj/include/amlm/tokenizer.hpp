#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace amlm {

// Word-level vocabulary with four reserved ids. Immutable after build.
struct Vocab {
  static constexpr int32_t kPadId = 0;
  static constexpr int32_t kUnkId = 1;
  static constexpr int32_t kClsId = 2;
  static constexpr int32_t kMaskId = 3;
  static constexpr int32_t kNumSpecials = 4;

  std::vector<std::string> tokens;               // id -> token, specials first
  std::unordered_map<std::string, int32_t> ids;  // token -> id

  int32_t size() const { return static_cast<int32_t>(tokens.size()); }

  int32_t id_of(std::string_view token) const {
    auto it = ids.find(std::string(token));
    return it == ids.end() ? kUnkId : it->second;
  }

  const std::string& token_of(int32_t id) const;

  bool operator==(const Vocab& other) const { return tokens == other.tokens; }
};

// Fixed-length token-id sequence: ids[0] is CLS, positions >= true_len are PAD.
struct EncodedSentence {
  std::vector<int32_t> ids;
  int32_t true_len = 0;

  int32_t max_len() const { return static_cast<int32_t>(ids.size()); }
};

// Splits on runs of ASCII whitespace; bytes outside the ASCII space are
// passed through untouched so any UTF-8 text works.
std::vector<std::string> split_words(std::string_view text);

Vocab build_vocab(const std::vector<std::string>& texts, int32_t max_size, int32_t min_freq);

EncodedSentence encode(const Vocab& vocab, std::string_view text, int32_t max_len);

// Skips PAD and CLS; MASK renders as the literal token "[MASK]".
std::string decode(const Vocab& vocab, const std::vector<int32_t>& ids);

void save_vocab(const Vocab& vocab, const std::filesystem::path& path);
Vocab load_vocab(const std::filesystem::path& path);

}  // namespace amlm
