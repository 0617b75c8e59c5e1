#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "amlm/corpus.hpp"
#include "amlm/model.hpp"
#include "amlm/tokenizer.hpp"

namespace amlm {

// Unit-normalized CLS vectors for every knowledge-base question, in file
// order. Read-only after build.
struct EmbeddingIndex {
  std::vector<std::string> knowledge_ids;
  MatX<float> vectors;  // one row per entry, unit norm
  std::string provenance;

  int32_t size() const { return static_cast<int32_t>(knowledge_ids.size()); }
};

struct RetrievalResult {
  std::string query;
  std::vector<std::pair<std::string, double>> ranked;  // (knowledge_id, score), best first
  int32_t k = 0;
};

struct EvalReport {
  std::map<int32_t, double> k_accuracy;
  std::map<int32_t, double> p_at_k;
  int32_t n_queries = 0;
  std::vector<RetrievalResult> per_query;
};

EmbeddingIndex build_index(const Parameters<float>& params, const Vocab& vocab,
                           const std::vector<KnowledgeEntry>& kb, std::string provenance = {});

// Exact brute-force cosine top-k; ties broken by knowledge-base order.
RetrievalResult retrieve_top_k(const EmbeddingIndex& index, const Parameters<float>& params,
                               const Vocab& vocab, const std::string& query, int32_t k);

double top_k_accuracy(const std::vector<RetrievalResult>& results, const std::vector<TestCase>& cases,
                      int32_t k);
double precision_at_k(const std::vector<RetrievalResult>& results, const std::vector<TestCase>& cases,
                      int32_t k);

// Builds the index once, retrieves with the largest requested k and derives
// every metric from that single ranking.
EvalReport evaluate(const Parameters<float>& params, const Vocab& vocab,
                    const std::vector<KnowledgeEntry>& kb, const std::vector<TestCase>& testset,
                    const std::vector<int32_t>& ks, const std::vector<int32_t>& pks = {1, 5});

void save_index(const EmbeddingIndex& index, const std::filesystem::path& path);
EmbeddingIndex load_index(const std::filesystem::path& path);

}  // namespace amlm
