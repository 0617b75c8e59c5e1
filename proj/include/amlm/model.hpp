#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "amlm/common.hpp"
#include "amlm/tokenizer.hpp"

namespace amlm {

template <class T>
using MatX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using VecX = Eigen::Matrix<T, Eigen::Dynamic, 1>;

struct ModelConfig {
  int32_t n_layers = 4;
  int32_t hidden_dim = 128;
  int32_t n_heads = 4;
  int32_t ffn_dim = 0;  // 0 means 4 * hidden_dim
  int32_t max_len = 64;
  int32_t vocab_size = 0;
  double dropout_rate = 0.0;
  uint64_t seed = 0;

  int32_t ffn() const { return ffn_dim > 0 ? ffn_dim : 4 * hidden_dim; }
  int32_t head_dim() const { return hidden_dim / n_heads; }
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

template <class T>
struct AttentionParams {
  MatX<T> wq, wk, wv, wo;  // hidden_dim x hidden_dim
  VecX<T> bq, bk, bv, bo;
};

template <class T>
struct LayerParams {
  VecX<T> ln1_gain, ln1_bias;
  AttentionParams<T> attn;
  VecX<T> ln2_gain, ln2_bias;
  MatX<T> ffn_w1;  // hidden_dim x ffn_dim
  VecX<T> ffn_b1;
  MatX<T> ffn_w2;  // ffn_dim x hidden_dim
  VecX<T> ffn_b2;
};

// All trainable tensors. The output projection is tied to tok_emb plus
// out_bias. Gradients reuse this struct (config is carried along unused).
template <class T>
struct Parameters {
  ModelConfig config;
  MatX<T> tok_emb;  // vocab_size x hidden_dim
  MatX<T> pos_emb;  // max_len x hidden_dim
  std::vector<LayerParams<T>> layers;
  VecX<T> final_gain, final_bias;
  VecX<T> out_bias;  // vocab_size
};

template <class T>
struct TensorView {
  std::string name;
  T* data;
  int64_t rows, cols;
  int64_t size() const { return rows * cols; }
};

namespace detail {
template <class P, class Fn>
void visit_tensors_impl(P& p, Fn&& fn) {
  auto emit = [&](const std::string& name, auto& m) {
    fn(name, m.data(), static_cast<int64_t>(m.rows()), static_cast<int64_t>(m.cols()));
  };
  emit("tok_emb", p.tok_emb);
  emit("pos_emb", p.pos_emb);
  for (size_t l = 0; l < p.layers.size(); ++l) {
    auto& layer = p.layers[l];
    const std::string pre = "layer" + std::to_string(l) + ".";
    emit(pre + "ln1.gain", layer.ln1_gain);
    emit(pre + "ln1.bias", layer.ln1_bias);
    emit(pre + "attn.wq", layer.attn.wq);
    emit(pre + "attn.bq", layer.attn.bq);
    emit(pre + "attn.wk", layer.attn.wk);
    emit(pre + "attn.bk", layer.attn.bk);
    emit(pre + "attn.wv", layer.attn.wv);
    emit(pre + "attn.bv", layer.attn.bv);
    emit(pre + "attn.wo", layer.attn.wo);
    emit(pre + "attn.bo", layer.attn.bo);
    emit(pre + "ln2.gain", layer.ln2_gain);
    emit(pre + "ln2.bias", layer.ln2_bias);
    emit(pre + "ffn.w1", layer.ffn_w1);
    emit(pre + "ffn.b1", layer.ffn_b1);
    emit(pre + "ffn.w2", layer.ffn_w2);
    emit(pre + "ffn.b2", layer.ffn_b2);
  }
  emit("final_ln.gain", p.final_gain);
  emit("final_ln.bias", p.final_bias);
  emit("out_bias", p.out_bias);
}
}  // namespace detail

// Tensor views in a fixed manifest order: checkpoint layout, optimizer state
// and coordinate indexing all share it.
template <class T>
std::vector<TensorView<T>> tensor_views(Parameters<T>& p) {
  std::vector<TensorView<T>> out;
  detail::visit_tensors_impl(p, [&](const std::string& name, T* data, int64_t rows, int64_t cols) {
    out.push_back({name, data, rows, cols});
  });
  return out;
}

template <class T>
std::vector<TensorView<const T>> tensor_views(const Parameters<T>& p) {
  std::vector<TensorView<const T>> out;
  detail::visit_tensors_impl(p, [&](const std::string& name, const T* data, int64_t rows, int64_t cols) {
    out.push_back({name, data, rows, cols});
  });
  return out;
}

template <class T>
int64_t parameter_count(const Parameters<T>& p) {
  int64_t n = 0;
  for (const auto& view : tensor_views(p)) n += view.size();
  return n;
}

template <class T>
Parameters<T> zeros_like(const Parameters<T>& p) {
  Parameters<T> out = p;
  for (auto& view : tensor_views(out)) std::fill(view.data, view.data + view.size(), T(0));
  return out;
}

template <class To, class From>
Parameters<To> params_cast(const Parameters<From>& p) {
  Parameters<To> out;
  out.config = p.config;
  out.layers.resize(p.layers.size());
  out.tok_emb = p.tok_emb.template cast<To>();
  out.pos_emb = p.pos_emb.template cast<To>();
  for (size_t l = 0; l < p.layers.size(); ++l) {
    const auto& a = p.layers[l];
    auto& b = out.layers[l];
    b.ln1_gain = a.ln1_gain.template cast<To>();
    b.ln1_bias = a.ln1_bias.template cast<To>();
    b.attn.wq = a.attn.wq.template cast<To>();
    b.attn.bq = a.attn.bq.template cast<To>();
    b.attn.wk = a.attn.wk.template cast<To>();
    b.attn.bk = a.attn.bk.template cast<To>();
    b.attn.wv = a.attn.wv.template cast<To>();
    b.attn.bv = a.attn.bv.template cast<To>();
    b.attn.wo = a.attn.wo.template cast<To>();
    b.attn.bo = a.attn.bo.template cast<To>();
    b.ln2_gain = a.ln2_gain.template cast<To>();
    b.ln2_bias = a.ln2_bias.template cast<To>();
    b.ffn_w1 = a.ffn_w1.template cast<To>();
    b.ffn_b1 = a.ffn_b1.template cast<To>();
    b.ffn_w2 = a.ffn_w2.template cast<To>();
    b.ffn_b2 = a.ffn_b2.template cast<To>();
  }
  out.final_gain = p.final_gain.template cast<To>();
  out.final_bias = p.final_bias.template cast<To>();
  out.out_bias = p.out_bias.template cast<To>();
  return out;
}

// Per-sentence forward activations kept for the backward pass.
template <class T>
struct LayerCache {
  MatX<T> ln1_xhat, ln1_out;
  VecX<T> ln1_rstd;
  MatX<T> q, k, v;
  MatX<T> attn_probs;  // n_heads blocks of max_len x max_len, stacked by rows
  MatX<T> attn_ctx;
  MatX<T> x_mid;
  MatX<T> ln2_xhat, ln2_out;
  VecX<T> ln2_rstd;
  MatX<T> ffn_pre, ffn_act;
  MatX<T> x_out;
  MatX<T> drop_attn, drop_ffn;  // inverted-dropout masks; empty when inactive
};

template <class T>
struct SentenceCache {
  std::vector<int32_t> ids;
  int32_t true_len = 0;
  MatX<T> x0;
  std::vector<LayerCache<T>> layers;
  MatX<T> lnf_xhat;
  VecX<T> lnf_rstd;
  MatX<T> hidden;  // max_len x hidden_dim, final layer-norm output
};

template <class T>
struct HiddenStates {
  MatX<T> states;
  int32_t true_len = 0;
};

template <class T>
struct SentenceVector {
  VecX<T> values;
  bool normalized = false;
};

template <class T>
Parameters<T> init_params(const ModelConfig& config);

// Runs the encoder over one sentence, keeping every intermediate needed by
// encoder_backward. dropout_rng enables dropout (training only).
template <class T>
SentenceCache<T> encode_cached(const Parameters<T>& params, const EncodedSentence& sentence,
                               Rng* dropout_rng = nullptr);

template <class T>
std::vector<HiddenStates<T>> encode_forward(const Parameters<T>& params,
                                            const std::vector<EncodedSentence>& batch);

template <class T>
SentenceVector<T> sentence_vector(const HiddenStates<T>& hidden, bool normalize);

// rows are hidden states gathered at selected positions; when injected is
// given it is added to every row before the tied projection.
template <class T>
MatX<T> output_logits(const Parameters<T>& params, const MatX<T>& rows, const VecX<T>* injected);

// Accumulates d(loss)/d(params) into grads for one sentence, given
// d(loss)/d(hidden).
template <class T>
void encoder_backward(const Parameters<T>& params, const SentenceCache<T>& cache,
                      const MatX<T>& d_hidden, Parameters<T>& grads);

struct Checkpoint {
  Parameters<float> params;
  Vocab vocab;
};

template <class T>
void save_checkpoint(const Parameters<T>& params, const Vocab& vocab, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace amlm
