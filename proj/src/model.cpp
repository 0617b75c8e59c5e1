#include "amlm/model.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "json.hpp"

namespace amlm {

namespace {

constexpr double kLayerNormEps = 1e-5;
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

template <class T>
T gelu(T x) {
  return T(0.5) * x * (T(1) + std::erf(x * T(kInvSqrt2)));
}

template <class T>
T gelu_grad(T x) {
  const T cdf = T(0.5) * (T(1) + std::erf(x * T(kInvSqrt2)));
  const T pdf = std::exp(T(-0.5) * x * x) * T(kInvSqrt2Pi);
  return cdf + x * pdf;
}

template <class T>
void layer_norm_forward(const MatX<T>& x, const VecX<T>& gain, const VecX<T>& bias, MatX<T>& xhat,
                        VecX<T>& rstd, MatX<T>& out) {
  const Eigen::Index rows = x.rows(), cols = x.cols();
  xhat.resize(rows, cols);
  rstd.resize(rows);
  out.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const T mean = x.row(r).mean();
    const T var = (x.row(r).array() - mean).square().sum() / T(cols);
    const T rs = T(1) / std::sqrt(var + T(kLayerNormEps));
    rstd(r) = rs;
    xhat.row(r) = (x.row(r).array() - mean) * rs;
    out.row(r) = xhat.row(r).cwiseProduct(gain.transpose()) + bias.transpose();
  }
}

// Returns d(loss)/dx and accumulates the gain/bias gradients.
template <class T>
MatX<T> layer_norm_backward(const MatX<T>& dy, const MatX<T>& xhat, const VecX<T>& rstd,
                            const VecX<T>& gain, VecX<T>& dgain, VecX<T>& dbias) {
  MatX<T> dx(dy.rows(), dy.cols());
  for (Eigen::Index r = 0; r < dy.rows(); ++r) {
    Eigen::Array<T, 1, Eigen::Dynamic> dxhat = dy.row(r).array() * gain.transpose().array();
    const T m1 = dxhat.mean();
    const T m2 = (dxhat * xhat.row(r).array()).mean();
    dx.row(r) = ((dxhat - m1) - xhat.row(r).array() * m2) * rstd(r);
  }
  dgain += dy.cwiseProduct(xhat).colwise().sum().transpose();
  dbias += dy.colwise().sum().transpose();
  return dx;
}

template <class T>
MatX<T> xavier_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  MatX<T> m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = static_cast<T>(bound * (2.0 * rng.next_real() - 1.0));
  return m;
}

template <class T>
MatX<T> dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng) {
  const T scale = static_cast<T>(1.0 / (1.0 - rate));
  MatX<T> mask(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) mask(r, c) = rng.next_real() < rate ? T(0) : scale;
  return mask;
}

void check_sentence(const ModelConfig& config, const EncodedSentence& sentence) {
  if (sentence.max_len() != config.max_len)
    throw InvalidArgument("encoder: sentence length " + std::to_string(sentence.max_len()) +
                          " does not match model max_len " + std::to_string(config.max_len));
  if (sentence.true_len < 1 || sentence.true_len > sentence.max_len())
    throw InvalidArgument("encoder: true_len out of range");
  for (int32_t id : sentence.ids) {
    if (id < 0 || id >= config.vocab_size)
      throw InvalidArgument("encoder: token id " + std::to_string(id) + " outside vocabulary of size " +
                            std::to_string(config.vocab_size));
  }
}

}  // namespace

void ModelConfig::validate() const {
  if (n_layers < 1) throw InvalidArgument("model config: n_layers must be positive");
  if (hidden_dim < 1 || n_heads < 1 || hidden_dim % n_heads != 0)
    throw InvalidArgument("model config: hidden_dim must be a positive multiple of n_heads");
  if (vocab_size < 5) throw InvalidArgument("model config: vocab_size must be at least 5");
  if (max_len < 2) throw InvalidArgument("model config: max_len must be at least 2");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0)
    throw InvalidArgument("model config: dropout_rate must lie in [0, 1)");
}

namespace {

template <class T>
Parameters<T> allocate_params(const ModelConfig& config) {
  const Eigen::Index d = config.hidden_dim, f = config.ffn(), v = config.vocab_size;
  Parameters<T> p;
  p.config = config;
  p.tok_emb = MatX<T>::Zero(v, d);
  p.pos_emb = MatX<T>::Zero(config.max_len, d);
  p.layers.resize(static_cast<size_t>(config.n_layers));
  for (auto& layer : p.layers) {
    layer.ln1_gain = VecX<T>::Ones(d);
    layer.ln1_bias = VecX<T>::Zero(d);
    layer.attn.wq = MatX<T>::Zero(d, d);
    layer.attn.wk = MatX<T>::Zero(d, d);
    layer.attn.wv = MatX<T>::Zero(d, d);
    layer.attn.wo = MatX<T>::Zero(d, d);
    layer.attn.bq = VecX<T>::Zero(d);
    layer.attn.bk = VecX<T>::Zero(d);
    layer.attn.bv = VecX<T>::Zero(d);
    layer.attn.bo = VecX<T>::Zero(d);
    layer.ln2_gain = VecX<T>::Ones(d);
    layer.ln2_bias = VecX<T>::Zero(d);
    layer.ffn_w1 = MatX<T>::Zero(d, f);
    layer.ffn_b1 = VecX<T>::Zero(f);
    layer.ffn_w2 = MatX<T>::Zero(f, d);
    layer.ffn_b2 = VecX<T>::Zero(d);
  }
  p.final_gain = VecX<T>::Ones(d);
  p.final_bias = VecX<T>::Zero(d);
  p.out_bias = VecX<T>::Zero(v);
  return p;
}

}  // namespace

template <class T>
Parameters<T> init_params(const ModelConfig& config) {
  config.validate();
  Parameters<T> p = allocate_params<T>(config);
  Rng rng(config.seed);
  p.tok_emb = xavier_matrix<T>(p.tok_emb.rows(), p.tok_emb.cols(), rng);
  p.pos_emb = xavier_matrix<T>(p.pos_emb.rows(), p.pos_emb.cols(), rng);
  for (auto& layer : p.layers) {
    layer.attn.wq = xavier_matrix<T>(layer.attn.wq.rows(), layer.attn.wq.cols(), rng);
    layer.attn.wk = xavier_matrix<T>(layer.attn.wk.rows(), layer.attn.wk.cols(), rng);
    layer.attn.wv = xavier_matrix<T>(layer.attn.wv.rows(), layer.attn.wv.cols(), rng);
    layer.attn.wo = xavier_matrix<T>(layer.attn.wo.rows(), layer.attn.wo.cols(), rng);
    layer.ffn_w1 = xavier_matrix<T>(layer.ffn_w1.rows(), layer.ffn_w1.cols(), rng);
    layer.ffn_w2 = xavier_matrix<T>(layer.ffn_w2.rows(), layer.ffn_w2.cols(), rng);
  }
  return p;
}

template <class T>
SentenceCache<T> encode_cached(const Parameters<T>& params, const EncodedSentence& sentence,
                               Rng* dropout_rng) {
  const ModelConfig& config = params.config;
  check_sentence(config, sentence);
  const Eigen::Index len = config.max_len, d = config.hidden_dim;
  const int32_t n_heads = config.n_heads, dh = config.head_dim();
  const T inv_sqrt_dh = T(1) / std::sqrt(static_cast<T>(dh));
  const bool use_dropout = dropout_rng != nullptr && config.dropout_rate > 0.0;

  SentenceCache<T> cache;
  cache.ids = sentence.ids;
  cache.true_len = sentence.true_len;
  cache.layers.resize(params.layers.size());

  cache.x0.resize(len, d);
  for (Eigen::Index t = 0; t < len; ++t)
    cache.x0.row(t) = params.tok_emb.row(sentence.ids[static_cast<size_t>(t)]) + params.pos_emb.row(t);

  const MatX<T>* x = &cache.x0;
  for (size_t l = 0; l < params.layers.size(); ++l) {
    const LayerParams<T>& w = params.layers[l];
    LayerCache<T>& c = cache.layers[l];

    layer_norm_forward(*x, w.ln1_gain, w.ln1_bias, c.ln1_xhat, c.ln1_rstd, c.ln1_out);
    c.q.noalias() = c.ln1_out * w.attn.wq;
    c.q.rowwise() += w.attn.bq.transpose();
    c.k.noalias() = c.ln1_out * w.attn.wk;
    c.k.rowwise() += w.attn.bk.transpose();
    c.v.noalias() = c.ln1_out * w.attn.wv;
    c.v.rowwise() += w.attn.bv.transpose();

    c.attn_probs.resize(n_heads * len, len);
    c.attn_ctx.resize(len, d);
    for (int32_t h = 0; h < n_heads; ++h) {
      auto qh = c.q.middleCols(h * dh, dh);
      auto kh = c.k.middleCols(h * dh, dh);
      auto vh = c.v.middleCols(h * dh, dh);
      MatX<T> scores = qh * kh.transpose() * inv_sqrt_dh;
      // PAD key positions are excluded via additive -inf; position 0 (CLS)
      // is always attendable, so every row keeps a finite maximum.
      if (sentence.true_len < len)
        scores.rightCols(len - sentence.true_len).setConstant(-std::numeric_limits<T>::infinity());
      for (Eigen::Index r = 0; r < len; ++r) {
        const T mx = scores.row(r).maxCoeff();
        scores.row(r) = (scores.row(r).array() - mx).exp();
        scores.row(r) /= scores.row(r).sum();
      }
      c.attn_probs.middleRows(h * len, len) = scores;
      c.attn_ctx.middleCols(h * dh, dh).noalias() = scores * vh;
    }

    MatX<T> attn_out = c.attn_ctx * w.attn.wo;
    attn_out.rowwise() += w.attn.bo.transpose();
    if (use_dropout) {
      c.drop_attn = dropout_mask<T>(len, d, config.dropout_rate, *dropout_rng);
      attn_out = attn_out.cwiseProduct(c.drop_attn);
    }
    c.x_mid = *x + attn_out;

    layer_norm_forward(c.x_mid, w.ln2_gain, w.ln2_bias, c.ln2_xhat, c.ln2_rstd, c.ln2_out);
    c.ffn_pre.noalias() = c.ln2_out * w.ffn_w1;
    c.ffn_pre.rowwise() += w.ffn_b1.transpose();
    c.ffn_act = c.ffn_pre.unaryExpr([](T u) { return gelu(u); });
    MatX<T> ffn_out = c.ffn_act * w.ffn_w2;
    ffn_out.rowwise() += w.ffn_b2.transpose();
    if (use_dropout) {
      c.drop_ffn = dropout_mask<T>(len, d, config.dropout_rate, *dropout_rng);
      ffn_out = ffn_out.cwiseProduct(c.drop_ffn);
    }
    c.x_out = c.x_mid + ffn_out;
    x = &c.x_out;
  }

  layer_norm_forward(*x, params.final_gain, params.final_bias, cache.lnf_xhat, cache.lnf_rstd,
                     cache.hidden);
  for (Eigen::Index r = 0; r < cache.hidden.rows(); ++r) {
    for (Eigen::Index col = 0; col < cache.hidden.cols(); ++col) {
      if (!std::isfinite(cache.hidden(r, col))) throw NumericError("encoder: non-finite hidden state");
    }
  }
  return cache;
}

template <class T>
std::vector<HiddenStates<T>> encode_forward(const Parameters<T>& params,
                                            const std::vector<EncodedSentence>& batch) {
  std::vector<HiddenStates<T>> out;
  out.reserve(batch.size());
  for (const auto& sentence : batch) {
    SentenceCache<T> cache = encode_cached(params, sentence);
    out.push_back({std::move(cache.hidden), sentence.true_len});
  }
  return out;
}

template <class T>
SentenceVector<T> sentence_vector(const HiddenStates<T>& hidden, bool normalize) {
  if (hidden.states.rows() < 1) throw InvalidArgument("sentence_vector: empty hidden states");
  SentenceVector<T> out;
  out.values = hidden.states.row(0).transpose();
  if (normalize) {
    const T norm = out.values.norm();
    if (norm == T(0)) throw NumericError("sentence_vector: zero-norm CLS vector cannot be normalized");
    out.values /= norm;
    out.normalized = true;
  }
  return out;
}

template <class T>
MatX<T> output_logits(const Parameters<T>& params, const MatX<T>& rows, const VecX<T>* injected) {
  if (rows.cols() != params.config.hidden_dim)
    throw InvalidArgument("output_logits: rows have width " + std::to_string(rows.cols()) +
                          ", expected hidden_dim " + std::to_string(params.config.hidden_dim));
  MatX<T> logits;
  if (injected != nullptr) {
    if (injected->size() != params.config.hidden_dim)
      throw InvalidArgument("output_logits: injected vector has wrong dimension");
    MatX<T> shifted = rows;
    shifted.rowwise() += injected->transpose();
    logits.noalias() = shifted * params.tok_emb.transpose();
  } else {
    logits.noalias() = rows * params.tok_emb.transpose();
  }
  logits.rowwise() += params.out_bias.transpose();
  return logits;
}

template <class T>
void encoder_backward(const Parameters<T>& params, const SentenceCache<T>& cache,
                      const MatX<T>& d_hidden, Parameters<T>& grads) {
  const ModelConfig& config = params.config;
  const Eigen::Index len = config.max_len, d = config.hidden_dim;
  const int32_t n_heads = config.n_heads, dh = config.head_dim();
  const T inv_sqrt_dh = T(1) / std::sqrt(static_cast<T>(dh));

  MatX<T> dx = layer_norm_backward(d_hidden, cache.lnf_xhat, cache.lnf_rstd, params.final_gain,
                                   grads.final_gain, grads.final_bias);

  for (size_t li = params.layers.size(); li-- > 0;) {
    const LayerParams<T>& w = params.layers[li];
    const LayerCache<T>& c = cache.layers[li];
    LayerParams<T>& gw = grads.layers[li];

    // FFN branch: x_out = x_mid + drop(ffn_out)
    MatX<T> d_ffn_out = c.drop_ffn.size() > 0 ? dx.cwiseProduct(c.drop_ffn).eval() : dx;
    gw.ffn_w2.noalias() += c.ffn_act.transpose() * d_ffn_out;
    gw.ffn_b2 += d_ffn_out.colwise().sum().transpose();
    MatX<T> d_act = d_ffn_out * w.ffn_w2.transpose();
    MatX<T> d_pre = d_act.cwiseProduct(c.ffn_pre.unaryExpr([](T u) { return gelu_grad(u); }));
    gw.ffn_w1.noalias() += c.ln2_out.transpose() * d_pre;
    gw.ffn_b1 += d_pre.colwise().sum().transpose();
    MatX<T> d_c = d_pre * w.ffn_w1.transpose();
    MatX<T> d_mid = dx + layer_norm_backward(d_c, c.ln2_xhat, c.ln2_rstd, w.ln2_gain, gw.ln2_gain,
                                             gw.ln2_bias);

    // Attention branch: x_mid = x + drop(attn_out)
    MatX<T> d_attn_out = c.drop_attn.size() > 0 ? d_mid.cwiseProduct(c.drop_attn).eval() : d_mid;
    gw.attn.wo.noalias() += c.attn_ctx.transpose() * d_attn_out;
    gw.attn.bo += d_attn_out.colwise().sum().transpose();
    MatX<T> d_ctx = d_attn_out * w.attn.wo.transpose();

    MatX<T> d_q(len, d), d_k(len, d), d_v(len, d);
    for (int32_t h = 0; h < n_heads; ++h) {
      auto probs = c.attn_probs.middleRows(h * len, len);
      auto qh = c.q.middleCols(h * dh, dh);
      auto kh = c.k.middleCols(h * dh, dh);
      auto vh = c.v.middleCols(h * dh, dh);
      auto d_ctx_h = d_ctx.middleCols(h * dh, dh);
      MatX<T> d_probs = d_ctx_h * vh.transpose();
      d_v.middleCols(h * dh, dh).noalias() = probs.transpose() * d_ctx_h;
      MatX<T> d_scores(len, len);
      for (Eigen::Index r = 0; r < len; ++r) {
        const T dot = probs.row(r).cwiseProduct(d_probs.row(r)).sum();
        d_scores.row(r) = probs.row(r).array() * (d_probs.row(r).array() - dot);
      }
      d_q.middleCols(h * dh, dh).noalias() = d_scores * kh * inv_sqrt_dh;
      d_k.middleCols(h * dh, dh).noalias() = d_scores.transpose() * qh * inv_sqrt_dh;
    }

    gw.attn.wq.noalias() += c.ln1_out.transpose() * d_q;
    gw.attn.bq += d_q.colwise().sum().transpose();
    gw.attn.wk.noalias() += c.ln1_out.transpose() * d_k;
    gw.attn.bk += d_k.colwise().sum().transpose();
    gw.attn.wv.noalias() += c.ln1_out.transpose() * d_v;
    gw.attn.bv += d_v.colwise().sum().transpose();
    MatX<T> d_a = d_q * w.attn.wq.transpose();
    d_a.noalias() += d_k * w.attn.wk.transpose();
    d_a.noalias() += d_v * w.attn.wv.transpose();

    dx = d_mid + layer_norm_backward(d_a, c.ln1_xhat, c.ln1_rstd, w.ln1_gain, gw.ln1_gain, gw.ln1_bias);
  }

  for (Eigen::Index t = 0; t < len; ++t) {
    grads.tok_emb.row(cache.ids[static_cast<size_t>(t)]) += dx.row(t);
    grads.pos_emb.row(t) += dx.row(t);
  }
}

// ---------------------------------------------------------------------------
// Checkpoint format: "AMLM" | u32 version | u64 header length | JSON header
// (config, vocab, tensor manifest) | little-endian f32 data in manifest order.
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'A', 'M', 'L', 'M'};
constexpr uint32_t kFormatVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

void write_u32(std::ostream& out, uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }
void write_u64(std::ostream& out, uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); }

uint32_t read_u32(std::istream& in, const char* what) {
  uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), 4)) throw IoError(std::string("checkpoint: truncated ") + what);
  return v;
}

uint64_t read_u64(std::istream& in, const char* what) {
  uint64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), 8)) throw IoError(std::string("checkpoint: truncated ") + what);
  return v;
}

nlohmann::ordered_json config_to_json(const ModelConfig& c) {
  nlohmann::ordered_json j;
  j["n_layers"] = c.n_layers;
  j["hidden_dim"] = c.hidden_dim;
  j["n_heads"] = c.n_heads;
  j["ffn_dim"] = c.ffn_dim;
  j["max_len"] = c.max_len;
  j["vocab_size"] = c.vocab_size;
  j["dropout_rate"] = c.dropout_rate;
  j["seed"] = c.seed;
  return j;
}

ModelConfig config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.n_layers = j.at("n_layers").get<int32_t>();
  c.hidden_dim = j.at("hidden_dim").get<int32_t>();
  c.n_heads = j.at("n_heads").get<int32_t>();
  c.ffn_dim = j.at("ffn_dim").get<int32_t>();
  c.max_len = j.at("max_len").get<int32_t>();
  c.vocab_size = j.at("vocab_size").get<int32_t>();
  c.dropout_rate = j.at("dropout_rate").get<double>();
  c.seed = j.at("seed").get<uint64_t>();
  return c;
}

}  // namespace

template <class T>
void save_checkpoint(const Parameters<T>& params, const Vocab& vocab, const std::filesystem::path& path) {
  if (params.config.vocab_size != vocab.size())
    throw InvalidArgument("save_checkpoint: vocab size does not match model config");

  nlohmann::ordered_json header;
  header["config"] = config_to_json(params.config);
  header["vocab"] = {{"tokens", vocab.tokens}};
  auto manifest = nlohmann::ordered_json::array();
  const auto views = tensor_views(params);
  for (const auto& view : views) {
    manifest.push_back({{"name", view.name}, {"shape", {view.rows, view.cols}}});
  }
  header["tensors"] = std::move(manifest);
  const std::string header_text = header.dump();

  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("save_checkpoint: cannot open '" + tmp.string() + "' for writing");
    out.write(kMagic, 4);
    write_u32(out, kFormatVersion);
    write_u64(out, header_text.size());
    out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
    std::vector<float> buffer;
    for (const auto& view : views) {
      buffer.resize(static_cast<size_t>(view.size()));
      for (int64_t i = 0; i < view.size(); ++i) buffer[static_cast<size_t>(i)] = static_cast<float>(view.data[i]);
      out.write(reinterpret_cast<const char*>(buffer.data()),
                static_cast<std::streamsize>(buffer.size() * sizeof(float)));
    }
    if (!out) throw IoError("save_checkpoint: write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_checkpoint: cannot open '" + path.string() + "'");

  char magic[4];
  if (!in.read(magic, 4)) throw IoError("load_checkpoint: truncated magic");
  if (std::memcmp(magic, kMagic, 4) != 0) throw ParseError("load_checkpoint: bad magic bytes");
  const uint32_t version = read_u32(in, "version");
  if (version != kFormatVersion)
    throw ParseError("load_checkpoint: unsupported format version " + std::to_string(version));
  const uint64_t header_len = read_u64(in, "header length");
  std::string header_text(header_len, '\0');
  if (!in.read(header_text.data(), static_cast<std::streamsize>(header_len)))
    throw IoError("load_checkpoint: truncated header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("load_checkpoint: malformed header JSON: ") + e.what());
  }

  Checkpoint ckpt;
  ckpt.params.config = config_from_json(header.at("config"));
  ckpt.params.config.validate();
  {
    std::vector<std::string> tokens = header.at("vocab").at("tokens").get<std::vector<std::string>>();
    ckpt.vocab.tokens = tokens;
    for (size_t i = 0; i < tokens.size(); ++i) ckpt.vocab.ids.emplace(tokens[i], static_cast<int32_t>(i));
  }
  if (ckpt.vocab.size() != ckpt.params.config.vocab_size)
    throw ParseError("load_checkpoint: header vocab size disagrees with config");

  Parameters<float> params = allocate_params<float>(ckpt.params.config);
  auto views = tensor_views(params);
  const auto& manifest = header.at("tensors");
  if (!manifest.is_array() || manifest.size() != views.size())
    throw ParseError("load_checkpoint: tensor manifest does not match this configuration");
  for (size_t i = 0; i < views.size(); ++i) {
    const auto& entry = manifest[i];
    const auto shape = entry.at("shape").get<std::vector<int64_t>>();
    if (entry.at("name").get<std::string>() != views[i].name || shape.size() != 2 ||
        shape[0] != views[i].rows || shape[1] != views[i].cols)
      throw ParseError("load_checkpoint: tensor manifest mismatch at '" + views[i].name + "'");
  }
  for (auto& view : views) {
    if (!in.read(reinterpret_cast<char*>(view.data),
                 static_cast<std::streamsize>(view.size() * sizeof(float))))
      throw IoError("load_checkpoint: truncated tensor data at '" + view.name + "'");
  }
  char extra;
  if (in.read(&extra, 1)) throw ParseError("load_checkpoint: trailing bytes after tensor data");

  ckpt.params = std::move(params);
  return ckpt;
}

// Explicit instantiations: float for training and serving, double for the
// finite-difference checks.
template Parameters<float> init_params<float>(const ModelConfig&);
template Parameters<double> init_params<double>(const ModelConfig&);
template SentenceCache<float> encode_cached<float>(const Parameters<float>&, const EncodedSentence&, Rng*);
template SentenceCache<double> encode_cached<double>(const Parameters<double>&, const EncodedSentence&, Rng*);
template std::vector<HiddenStates<float>> encode_forward<float>(const Parameters<float>&,
                                                                const std::vector<EncodedSentence>&);
template std::vector<HiddenStates<double>> encode_forward<double>(const Parameters<double>&,
                                                                  const std::vector<EncodedSentence>&);
template SentenceVector<float> sentence_vector<float>(const HiddenStates<float>&, bool);
template SentenceVector<double> sentence_vector<double>(const HiddenStates<double>&, bool);
template MatX<float> output_logits<float>(const Parameters<float>&, const MatX<float>&, const VecX<float>*);
template MatX<double> output_logits<double>(const Parameters<double>&, const MatX<double>&,
                                            const VecX<double>*);
template void encoder_backward<float>(const Parameters<float>&, const SentenceCache<float>&,
                                      const MatX<float>&, Parameters<float>&);
template void encoder_backward<double>(const Parameters<double>&, const SentenceCache<double>&,
                                       const MatX<double>&, Parameters<double>&);
template void save_checkpoint<float>(const Parameters<float>&, const Vocab&, const std::filesystem::path&);
template void save_checkpoint<double>(const Parameters<double>&, const Vocab&, const std::filesystem::path&);

}  // namespace amlm
