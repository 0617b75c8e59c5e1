#include "amlm/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "amlm/retrieval.hpp"
#include "json.hpp"

namespace amlm {

namespace {

constexpr uint64_t kBatchStream = 1;
constexpr uint64_t kMaskStream = 2;
constexpr uint64_t kDropoutStream = 3;

}  // namespace

void TrainConfig::validate() const {
  loss.masking.validate();
  if (loss.lambda < 0.0) throw InvalidArgument("train config: lambda must be non-negative");
  if (loss.uses_cl() && batch_size < 2)
    throw InvalidArgument("train config: contrastive modes need batch_size >= 2");
  if (batch_size < 1) throw InvalidArgument("train config: batch_size must be positive");
  if (max_steps < 0) throw InvalidArgument("train config: max_steps must be non-negative");
  if (learning_rate <= 0.0) throw InvalidArgument("train config: learning_rate must be positive");
  if (warmup_steps < 0) throw InvalidArgument("train config: warmup_steps must be non-negative");
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
    throw InvalidArgument("train config: adam betas must lie in [0, 1)");
  if (epsilon <= 0.0) throw InvalidArgument("train config: adam epsilon must be positive");
  if (eval_every < 0) throw InvalidArgument("train config: eval_every must be non-negative");
}

std::vector<std::vector<int32_t>> make_batches(const std::vector<SessionPair>& pairs, int32_t batch_size,
                                               Rng& rng) {
  if (batch_size < 1) throw InvalidArgument("make_batches: batch_size must be positive");
  std::unordered_set<std::string> distinct;
  for (const auto& pair : pairs) distinct.insert(pair.session_id);
  if (static_cast<int32_t>(distinct.size()) < batch_size)
    throw InvalidArgument("make_batches: only " + std::to_string(distinct.size()) +
                          " distinct sessions available for batch_size " + std::to_string(batch_size));

  std::vector<int32_t> remaining(pairs.size());
  for (size_t i = 0; i < pairs.size(); ++i) remaining[i] = static_cast<int32_t>(i);
  rng.shuffle(remaining);

  std::vector<std::vector<int32_t>> batches;
  while (static_cast<int32_t>(remaining.size()) >= batch_size) {
    std::vector<int32_t> batch;
    std::vector<int32_t> rest;
    std::unordered_set<std::string> used;
    for (int32_t idx : remaining) {
      if (static_cast<int32_t>(batch.size()) < batch_size &&
          used.insert(pairs[static_cast<size_t>(idx)].session_id).second) {
        batch.push_back(idx);
      } else {
        rest.push_back(idx);
      }
    }
    if (static_cast<int32_t>(batch.size()) < batch_size) break;  // leftovers dropped
    batches.push_back(std::move(batch));
    remaining = std::move(rest);
  }
  return batches;
}

namespace {

void adam_update(Parameters<float>& params, OptimizerState& opt, const Parameters<float>& grads,
                 const TrainConfig& cfg, double lr_now) {
  opt.step += 1;
  const float b1 = static_cast<float>(cfg.beta1);
  const float b2 = static_cast<float>(cfg.beta2);
  const float eps = static_cast<float>(cfg.epsilon);
  const float bias1 = 1.0f - static_cast<float>(std::pow(cfg.beta1, static_cast<double>(opt.step)));
  const float bias2 = 1.0f - static_cast<float>(std::pow(cfg.beta2, static_cast<double>(opt.step)));
  const float lr = static_cast<float>(lr_now);

  auto pv = tensor_views(params);
  const auto gv = tensor_views(grads);
  auto mv = tensor_views(opt.m);
  auto vv = tensor_views(opt.v);
  for (size_t t = 0; t < pv.size(); ++t) {
    const int64_t size = pv[t].size();
    Eigen::Map<Eigen::ArrayXf> p(pv[t].data, size);
    Eigen::Map<const Eigen::ArrayXf> g(gv[t].data, size);
    Eigen::Map<Eigen::ArrayXf> m(mv[t].data, size);
    Eigen::Map<Eigen::ArrayXf> v(vv[t].data, size);
    m = b1 * m + (1.0f - b1) * g;
    v = b2 * v + (1.0f - b2) * g.square();
    p -= lr * (m / bias1) / ((v / bias2).sqrt() + eps);
  }
}

double learning_rate_at(const TrainConfig& cfg, int64_t step_index) {
  // step_index is 1-based.
  if (cfg.warmup_steps > 0 && step_index <= cfg.warmup_steps)
    return cfg.learning_rate * static_cast<double>(step_index) / static_cast<double>(cfg.warmup_steps);
  return cfg.learning_rate;
}

}  // namespace

LossBreakdown train_step(Parameters<float>& params, OptimizerState& opt, const PairBatch& batch,
                         const TrainConfig& cfg, Rng& mask_rng, Rng* dropout_rng) {
  StepInputs inputs = prepare_step_inputs(batch, cfg.loss, params.config.vocab_size, mask_rng);
  Parameters<float> grads = zeros_like(params);
  LossBreakdown breakdown;
  try {
    breakdown = compute_loss_and_gradients(params, inputs, cfg.loss, &grads, dropout_rng);
  } catch (const NumericError& e) {
    throw NumericError("train_step " + std::to_string(opt.step + 1) + ": " + e.what());
  }
  adam_update(params, opt, grads, cfg, learning_rate_at(cfg, opt.step + 1));
  return breakdown;
}

TrainReport train(const std::vector<SessionPair>& pairs, const TrainConfig& cfg, const Vocab& vocab,
                  const ModelConfig& model_config, const std::filesystem::path& out_dir,
                  const EvalBundle* eval_bundle) {
  cfg.validate();
  ModelConfig mc = model_config;
  if (mc.vocab_size == 0) mc.vocab_size = vocab.size();
  if (mc.vocab_size != vocab.size())
    throw InvalidArgument("train: model vocab_size does not match the vocabulary");
  mc.validate();

  const auto t_start = std::chrono::steady_clock::now();

  std::vector<std::pair<EncodedSentence, EncodedSentence>> encoded;
  encoded.reserve(pairs.size());
  for (const auto& pair : pairs)
    encoded.emplace_back(encode(vocab, pair.agent_query, mc.max_len), encode(vocab, pair.user_query, mc.max_len));

  Parameters<float> params = init_params<float>(mc);
  OptimizerState opt;
  opt.m = zeros_like(params);
  opt.v = zeros_like(params);

  TrainReport report;
  const bool write_files = !out_dir.empty();
  std::ofstream metrics;
  if (write_files) {
    std::filesystem::create_directories(out_dir);
    report.checkpoint_path = out_dir / "checkpoint.amlm";
    metrics.open(out_dir / "metrics.jsonl", std::ios::binary | std::ios::trunc);
    if (!metrics) throw IoError("train: cannot open metrics.jsonl under '" + out_dir.string() + "'");
  }

  auto run_eval = [&](int64_t step, const LossBreakdown& losses) {
    EvalPoint point;
    point.step = step;
    point.losses = losses;
    if (eval_bundle != nullptr && !eval_bundle->testset.empty()) {
      const EvalReport eval = evaluate(params, vocab, eval_bundle->knowledge, eval_bundle->testset, {1, 5});
      point.top1 = eval.k_accuracy.at(1);
      point.top5 = eval.k_accuracy.at(5);
    }
    if (write_files) {
      nlohmann::ordered_json line;
      line["step"] = step;
      line["cl"] = losses.cl;
      line["automlm"] = losses.automlm;
      line["joint"] = losses.joint;
      if (losses.has_mlm) line["mlm"] = losses.mlm;
      if (point.top1) line["top1"] = *point.top1;
      if (point.top5) line["top5"] = *point.top5;
      metrics << line.dump() << '\n';
      metrics.flush();
      save_checkpoint(params, vocab, report.checkpoint_path);
    }
    report.eval_points.push_back(std::move(point));
  };

  Rng batch_rng(Rng::derive(cfg.seed, kBatchStream));
  int64_t step = 0;
  bool done = cfg.max_steps == 0;
  while (!done) {
    const auto batches = make_batches(pairs, cfg.batch_size, batch_rng);
    if (batches.empty()) throw InvalidArgument("train: no full batch can be formed from the pair set");
    for (const auto& batch_indices : batches) {
      PairBatch batch;
      batch.agents.reserve(batch_indices.size());
      batch.users.reserve(batch_indices.size());
      for (int32_t idx : batch_indices) {
        batch.agents.push_back(encoded[static_cast<size_t>(idx)].first);
        batch.users.push_back(encoded[static_cast<size_t>(idx)].second);
      }
      Rng mask_rng(Rng::derive(Rng::derive(cfg.seed, kMaskStream), static_cast<uint64_t>(step)));
      Rng dropout_rng(Rng::derive(Rng::derive(cfg.seed, kDropoutStream), static_cast<uint64_t>(step)));
      LossBreakdown breakdown = train_step(params, opt, batch, cfg, mask_rng,
                                           mc.dropout_rate > 0.0 ? &dropout_rng : nullptr);
      report.series.push_back(breakdown);
      ++step;
      if (cfg.eval_every > 0 && step % cfg.eval_every == 0 && step < cfg.max_steps)
        run_eval(step, breakdown);
      if (step >= cfg.max_steps) {
        done = true;
        break;
      }
    }
  }

  if (cfg.eval_every > 0 && !report.series.empty()) {
    run_eval(step, report.series.back());
  }
  if (write_files) save_checkpoint(params, vocab, report.checkpoint_path);

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

}  // namespace amlm
