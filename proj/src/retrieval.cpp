#include "amlm/retrieval.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <numeric>

#include "json.hpp"

namespace amlm {

namespace {

VecX<float> embed_normalized(const Parameters<float>& params, const Vocab& vocab, const std::string& text) {
  const EncodedSentence enc = encode(vocab, text, params.config.max_len);
  const auto hidden = encode_forward(params, {enc});
  return sentence_vector(hidden.front(), /*normalize=*/true).values;
}

}  // namespace

EmbeddingIndex build_index(const Parameters<float>& params, const Vocab& vocab,
                           const std::vector<KnowledgeEntry>& kb, std::string provenance) {
  if (kb.empty()) throw InvalidArgument("build_index: knowledge base is empty");
  EmbeddingIndex index;
  index.provenance = std::move(provenance);
  index.knowledge_ids.reserve(kb.size());
  index.vectors.resize(static_cast<Eigen::Index>(kb.size()), params.config.hidden_dim);
  for (size_t i = 0; i < kb.size(); ++i) {
    if (kb[i].question.empty())
      throw InvalidArgument("build_index: knowledge entry \"" + kb[i].knowledge_id + "\" has empty question text");
    index.vectors.row(static_cast<Eigen::Index>(i)) = embed_normalized(params, vocab, kb[i].question).transpose();
    index.knowledge_ids.push_back(kb[i].knowledge_id);
  }
  return index;
}

RetrievalResult retrieve_top_k(const EmbeddingIndex& index, const Parameters<float>& params,
                               const Vocab& vocab, const std::string& query, int32_t k) {
  if (k < 1) throw InvalidArgument("retrieve_top_k: k must be at least 1");
  if (index.size() == 0) throw InvalidArgument("retrieve_top_k: empty index");

  const VecX<float> q = embed_normalized(params, vocab, query);
  const VecX<float> scores = index.vectors * q;

  std::vector<int32_t> order(static_cast<size_t>(index.size()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int32_t a, int32_t b) {
    if (scores(a) != scores(b)) return scores(a) > scores(b);
    return a < b;  // tie-break by knowledge-base order
  });

  RetrievalResult result;
  result.query = query;
  result.k = k;
  const int32_t take = std::min<int32_t>(k, index.size());
  result.ranked.reserve(static_cast<size_t>(take));
  for (int32_t r = 0; r < take; ++r) {
    const int32_t idx = order[static_cast<size_t>(r)];
    result.ranked.emplace_back(index.knowledge_ids[static_cast<size_t>(idx)],
                               static_cast<double>(scores(idx)));
  }
  return result;
}

namespace {

void check_alignment(const std::vector<RetrievalResult>& results, const std::vector<TestCase>& cases) {
  if (results.size() != cases.size())
    throw InvalidArgument("evaluation: results and test cases are not aligned 1:1");
  if (cases.empty()) throw InvalidArgument("evaluation: empty test set has undefined metrics");
}

int32_t gold_hits_in_top_k(const RetrievalResult& result, const TestCase& tc, int32_t k) {
  const size_t take = std::min<size_t>(static_cast<size_t>(k), result.ranked.size());
  int32_t hits = 0;
  for (size_t r = 0; r < take; ++r) {
    const auto& id = result.ranked[r].first;
    if (std::find(tc.gold_ids.begin(), tc.gold_ids.end(), id) != tc.gold_ids.end()) ++hits;
  }
  return hits;
}

}  // namespace

double top_k_accuracy(const std::vector<RetrievalResult>& results, const std::vector<TestCase>& cases,
                      int32_t k) {
  check_alignment(results, cases);
  if (k < 1) throw InvalidArgument("top_k_accuracy: k must be at least 1");
  int32_t hits = 0;
  for (size_t i = 0; i < cases.size(); ++i) {
    if (gold_hits_in_top_k(results[i], cases[i], k) > 0) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(cases.size());
}

double precision_at_k(const std::vector<RetrievalResult>& results, const std::vector<TestCase>& cases,
                      int32_t k) {
  check_alignment(results, cases);
  if (k < 1) throw InvalidArgument("precision_at_k: k must be at least 1");
  double total = 0.0;
  for (size_t i = 0; i < cases.size(); ++i) {
    total += static_cast<double>(gold_hits_in_top_k(results[i], cases[i], k)) / static_cast<double>(k);
  }
  return total / static_cast<double>(cases.size());
}

EvalReport evaluate(const Parameters<float>& params, const Vocab& vocab,
                    const std::vector<KnowledgeEntry>& kb, const std::vector<TestCase>& testset,
                    const std::vector<int32_t>& ks, const std::vector<int32_t>& pks) {
  if (ks.empty()) throw InvalidArgument("evaluate: ks must be non-empty");
  if (testset.empty()) throw InvalidArgument("evaluate: empty test set has undefined metrics");

  int32_t k_max = 1;
  for (int32_t k : ks) k_max = std::max(k_max, k);
  for (int32_t k : pks) k_max = std::max(k_max, k);

  const EmbeddingIndex index = build_index(params, vocab, kb);
  EvalReport report;
  report.n_queries = static_cast<int32_t>(testset.size());
  report.per_query.reserve(testset.size());
  for (const auto& tc : testset)
    report.per_query.push_back(retrieve_top_k(index, params, vocab, tc.query, k_max));

  for (int32_t k : ks) report.k_accuracy[k] = top_k_accuracy(report.per_query, testset, k);
  for (int32_t k : pks) report.p_at_k[k] = precision_at_k(report.per_query, testset, k);
  return report;
}

// ---------------------------------------------------------------------------
// Index file: "AMIX" | u32 version | u64 header length | JSON header
// (dim, ids, provenance) | little-endian f32 rows.
// ---------------------------------------------------------------------------

namespace {

constexpr char kIndexMagic[4] = {'A', 'M', 'I', 'X'};
constexpr uint32_t kIndexVersion = 1;

static_assert(std::endian::native == std::endian::little, "index I/O assumes a little-endian host");

}  // namespace

void save_index(const EmbeddingIndex& index, const std::filesystem::path& path) {
  nlohmann::ordered_json header;
  header["dim"] = index.vectors.cols();
  header["ids"] = index.knowledge_ids;
  header["provenance"] = index.provenance;
  const std::string header_text = header.dump();

  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("save_index: cannot open '" + tmp.string() + "' for writing");
    out.write(kIndexMagic, 4);
    const uint32_t version = kIndexVersion;
    out.write(reinterpret_cast<const char*>(&version), 4);
    const uint64_t header_len = header_text.size();
    out.write(reinterpret_cast<const char*>(&header_len), 8);
    out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
    out.write(reinterpret_cast<const char*>(index.vectors.data()),
              static_cast<std::streamsize>(sizeof(float) * static_cast<size_t>(index.vectors.size())));
    if (!out) throw IoError("save_index: write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

EmbeddingIndex load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_index: cannot open '" + path.string() + "'");
  char magic[4];
  if (!in.read(magic, 4)) throw IoError("load_index: truncated magic");
  if (std::memcmp(magic, kIndexMagic, 4) != 0) throw ParseError("load_index: bad magic bytes");
  uint32_t version = 0;
  if (!in.read(reinterpret_cast<char*>(&version), 4)) throw IoError("load_index: truncated version");
  if (version != kIndexVersion)
    throw ParseError("load_index: unsupported format version " + std::to_string(version));
  uint64_t header_len = 0;
  if (!in.read(reinterpret_cast<char*>(&header_len), 8)) throw IoError("load_index: truncated header length");
  std::string header_text(header_len, '\0');
  if (!in.read(header_text.data(), static_cast<std::streamsize>(header_len)))
    throw IoError("load_index: truncated header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("load_index: malformed header JSON: ") + e.what());
  }

  EmbeddingIndex index;
  index.knowledge_ids = header.at("ids").get<std::vector<std::string>>();
  index.provenance = header.value("provenance", std::string{});
  const auto dim = header.at("dim").get<Eigen::Index>();
  if (dim <= 0 || index.knowledge_ids.empty()) throw ParseError("load_index: invalid header dimensions");
  index.vectors.resize(static_cast<Eigen::Index>(index.knowledge_ids.size()), dim);
  if (!in.read(reinterpret_cast<char*>(index.vectors.data()),
               static_cast<std::streamsize>(sizeof(float) * static_cast<size_t>(index.vectors.size()))))
    throw IoError("load_index: truncated vector data");
  return index;
}

}  // namespace amlm
