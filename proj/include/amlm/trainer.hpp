#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "amlm/corpus.hpp"
#include "amlm/model.hpp"
#include "amlm/objectives.hpp"
#include "amlm/tokenizer.hpp"

namespace amlm {

struct TrainConfig {
  LossConfig loss;
  int32_t batch_size = 128;
  int32_t max_steps = 0;
  double learning_rate = 1e-4;
  int32_t warmup_steps = 0;  // linear warmup, then constant
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  uint64_t seed = 0;
  int32_t eval_every = 0;  // 0 disables periodic eval/checkpointing
  void validate() const;
};

struct OptimizerState {
  Parameters<float> m, v;
  int64_t step = 0;
};

// Epoch batches as indices into `pairs`: every batch holds batch_size pairs
// with pairwise-distinct session ids; leftovers that cannot fill a batch are
// dropped.
std::vector<std::vector<int32_t>> make_batches(const std::vector<SessionPair>& pairs, int32_t batch_size,
                                               Rng& rng);

struct EvalBundle {
  std::vector<KnowledgeEntry> knowledge;
  std::vector<TestCase> testset;
};

struct EvalPoint {
  int64_t step = 0;
  LossBreakdown losses;
  std::optional<double> top1, top5;
};

struct TrainReport {
  std::vector<LossBreakdown> series;  // one entry per executed step
  std::vector<EvalPoint> eval_points;
  double wall_seconds = 0.0;
  std::filesystem::path checkpoint_path;
};

// One joint-loss Adam step on the given pre-encoded batch.
LossBreakdown train_step(Parameters<float>& params, OptimizerState& opt, const PairBatch& batch,
                         const TrainConfig& cfg, Rng& mask_rng, Rng* dropout_rng = nullptr);

// Full run: init, max_steps steps over shuffled session-distinct batches,
// periodic eval/checkpoint when eval_every is set, final checkpoint. Writes
// metrics.jsonl and checkpoint.amlm under out_dir (no files when out_dir is
// empty).
TrainReport train(const std::vector<SessionPair>& pairs, const TrainConfig& cfg, const Vocab& vocab,
                  const ModelConfig& model_config, const std::filesystem::path& out_dir,
                  const EvalBundle* eval_bundle = nullptr);

}  // namespace amlm
