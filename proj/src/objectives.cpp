#include "amlm/objectives.hpp"

#include <algorithm>
#include <cmath>

namespace amlm {

void MaskingConfig::validate() const {
  if (mask_prob <= 0.0 || mask_prob > 1.0) throw InvalidArgument("masking: mask_prob must lie in (0, 1]");
  if (sub_mask < 0.0 || sub_random < 0.0 || sub_mask + sub_random > 1.0)
    throw InvalidArgument("masking: sub_mask + sub_random must lie in [0, 1]");
}

MaskedSentence apply_masking(const EncodedSentence& sentence, const MaskingConfig& cfg, Rng& rng,
                             int32_t vocab_size) {
  cfg.validate();
  if (sentence.true_len < 2)
    throw InvalidArgument("apply_masking: sentence needs at least one non-CLS token");

  MaskedSentence out;
  out.corrupted = sentence;

  std::vector<int32_t> selected;
  for (int32_t p = 1; p < sentence.true_len; ++p) {
    if (rng.next_real() < cfg.mask_prob) selected.push_back(p);
  }
  if (selected.empty() && cfg.force_min_one)
    selected.push_back(1 + static_cast<int32_t>(rng.below(static_cast<uint64_t>(sentence.true_len - 1))));

  for (int32_t p : selected) {
    const double u = rng.next_real();
    int32_t replacement = sentence.ids[static_cast<size_t>(p)];
    if (u < cfg.sub_mask) {
      replacement = Vocab::kMaskId;
    } else if (u < cfg.sub_mask + cfg.sub_random) {
      replacement = vocab_size > Vocab::kNumSpecials
                        ? Vocab::kNumSpecials +
                              static_cast<int32_t>(rng.below(static_cast<uint64_t>(vocab_size - Vocab::kNumSpecials)))
                        : Vocab::kMaskId;
    }
    out.corrupted.ids[static_cast<size_t>(p)] = replacement;
    out.positions.push_back(p);
    out.targets.push_back(sentence.ids[static_cast<size_t>(p)]);
  }
  return out;
}

std::string to_string(ObjectiveMode mode) {
  switch (mode) {
    case ObjectiveMode::kCl: return "cl";
    case ObjectiveMode::kMlm: return "mlm";
    case ObjectiveMode::kAutoMlm: return "automlm";
    case ObjectiveMode::kClMlm: return "cl_mlm";
    case ObjectiveMode::kClAutoMlm: return "cl_automlm";
  }
  throw InvalidArgument("unknown objective mode");
}

ObjectiveMode objective_mode_from_string(const std::string& name) {
  if (name == "cl") return ObjectiveMode::kCl;
  if (name == "mlm") return ObjectiveMode::kMlm;
  if (name == "automlm") return ObjectiveMode::kAutoMlm;
  if (name == "cl_mlm") return ObjectiveMode::kClMlm;
  if (name == "cl_automlm") return ObjectiveMode::kClAutoMlm;
  throw InvalidArgument("unknown objective mode \"" + name + "\"");
}

std::string to_string(AutoMlmSide side) {
  switch (side) {
    case AutoMlmSide::kUser: return "user";
    case AutoMlmSide::kAgent: return "agent";
    case AutoMlmSide::kBoth: return "both";
  }
  throw InvalidArgument("unknown automlm side");
}

AutoMlmSide side_from_string(const std::string& name) {
  if (name == "user") return AutoMlmSide::kUser;
  if (name == "agent") return AutoMlmSide::kAgent;
  if (name == "both") return AutoMlmSide::kBoth;
  throw InvalidArgument("unknown automlm side \"" + name + "\"");
}

std::string to_string(IndexMode mode) {
  return mode == IndexMode::kFull ? "full" : "paper_literal";
}

IndexMode index_mode_from_string(const std::string& name) {
  if (name == "full") return IndexMode::kFull;
  if (name == "paper_literal") return IndexMode::kPaperLiteral;
  throw InvalidArgument("unknown index mode \"" + name + "\"");
}

std::string to_string(HingeMode mode) {
  return mode == HingeMode::kConventional ? "conventional" : "paper_literal";
}

HingeMode hinge_mode_from_string(const std::string& name) {
  if (name == "conventional") return HingeMode::kConventional;
  if (name == "paper_literal") return HingeMode::kPaperLiteral;
  throw InvalidArgument("unknown hinge mode \"" + name + "\"");
}

namespace {

template <class T>
T norm_tolerance() {
  return std::is_same_v<T, float> ? T(1e-4) : T(1e-6);
}

template <class T>
MatX<T> stack_unit_vectors(const std::vector<SentenceVector<T>>& vecs, const char* which) {
  if (vecs.empty()) throw InvalidArgument("score_matrix: empty vector list");
  const Eigen::Index dim = vecs.front().values.size();
  MatX<T> m(static_cast<Eigen::Index>(vecs.size()), dim);
  for (size_t i = 0; i < vecs.size(); ++i) {
    const auto& v = vecs[i];
    if (v.values.size() != dim) throw InvalidArgument("score_matrix: inconsistent vector dimensions");
    if (!v.normalized || std::abs(v.values.norm() - T(1)) > norm_tolerance<T>())
      throw InvalidArgument(std::string("score_matrix: ") + which + " vector " + std::to_string(i) +
                            " is not unit-normalized");
    m.row(static_cast<Eigen::Index>(i)) = v.values.transpose();
  }
  return m;
}

template <class T>
T hinge_offset(T margin, HingeMode mode) {
  return mode == HingeMode::kPaperLiteral ? margin : -margin;
}

}  // namespace

template <class T>
MatX<T> score_matrix(const std::vector<SentenceVector<T>>& agent_vecs,
                     const std::vector<SentenceVector<T>>& user_vecs) {
  if (agent_vecs.size() != user_vecs.size())
    throw InvalidArgument("score_matrix: agent and user lists differ in length");
  if (agent_vecs.size() < 2) throw InvalidArgument("score_matrix: need at least two pairs");
  const MatX<T> a = stack_unit_vectors(agent_vecs, "agent");
  const MatX<T> u = stack_unit_vectors(user_vecs, "user");
  return a * u.transpose();
}

template <class T>
T cl_margin_loss(const MatX<T>& scores, T margin, IndexMode index_mode, HingeMode hinge_mode) {
  const Eigen::Index n = scores.rows();
  if (n < 2 || scores.cols() != n) throw InvalidArgument("cl_margin_loss: scores must be NxN with N >= 2");
  const T offset = hinge_offset(margin, hinge_mode);
  const Eigen::Index first = index_mode == IndexMode::kPaperLiteral ? 1 : 0;
  T total = T(0);
  for (Eigen::Index i = first; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      total += std::max(T(0), scores(i, j) - scores(i, i) - offset);
    }
  }
  return total / static_cast<T>(n);
}

template <class T>
MatX<T> cl_margin_loss_grad(const MatX<T>& scores, T margin, IndexMode index_mode, HingeMode hinge_mode) {
  const Eigen::Index n = scores.rows();
  if (n < 2 || scores.cols() != n) throw InvalidArgument("cl_margin_loss_grad: scores must be NxN with N >= 2");
  const T offset = hinge_offset(margin, hinge_mode);
  const Eigen::Index first = index_mode == IndexMode::kPaperLiteral ? 1 : 0;
  const T inv_n = T(1) / static_cast<T>(n);
  MatX<T> grad = MatX<T>::Zero(n, n);
  for (Eigen::Index i = first; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      if (scores(i, j) - scores(i, i) - offset > T(0)) {
        grad(i, j) += inv_n;
        grad(i, i) -= inv_n;
      }
    }
  }
  return grad;
}

namespace {

// Shared forward for the masked-prediction losses. cls_rows, when present,
// holds one injection vector per masked sentence (the raw CLS of its
// uncorrupted original).
template <class T>
struct MaskedForward {
  std::vector<SentenceCache<T>> caches;
  std::vector<std::pair<int32_t, int32_t>> row_map;  // (masked sentence, position)
  MatX<T> aug_rows;                                  // M x hidden_dim
  MatX<T> logits;                                    // M x vocab_size
  T loss = T(0);
};

template <class T>
MaskedForward<T> masked_nll_forward(const Parameters<T>& params, const std::vector<MaskedSentence>& masked,
                                    const MatX<T>* cls_rows, Rng* dropout_rng = nullptr) {
  if (masked.empty()) throw InvalidArgument("masked loss: empty batch");
  MaskedForward<T> fwd;
  fwd.caches.reserve(masked.size());
  int64_t total_rows = 0;
  for (const auto& m : masked) total_rows += static_cast<int64_t>(m.positions.size());
  if (total_rows == 0) throw InvalidArgument("masked loss: no masked positions in batch");

  fwd.aug_rows.resize(total_rows, params.config.hidden_dim);
  fwd.row_map.reserve(static_cast<size_t>(total_rows));
  Eigen::Index row = 0;
  for (size_t k = 0; k < masked.size(); ++k) {
    fwd.caches.push_back(encode_cached(params, masked[k].corrupted, dropout_rng));
    const auto& hidden = fwd.caches.back().hidden;
    for (size_t pi = 0; pi < masked[k].positions.size(); ++pi) {
      const int32_t pos = masked[k].positions[pi];
      if (pos < 1 || pos >= masked[k].corrupted.true_len)
        throw InvalidArgument("masked loss: mask position outside [1, true_len)");
      if (cls_rows != nullptr) {
        fwd.aug_rows.row(row) = hidden.row(pos) + cls_rows->row(static_cast<Eigen::Index>(k));
      } else {
        fwd.aug_rows.row(row) = hidden.row(pos);
      }
      fwd.row_map.emplace_back(static_cast<int32_t>(k), pos);
      ++row;
    }
  }

  fwd.logits.noalias() = fwd.aug_rows * params.tok_emb.transpose();
  fwd.logits.rowwise() += params.out_bias.transpose();

  T total = T(0);
  row = 0;
  for (size_t k = 0; k < masked.size(); ++k) {
    for (size_t pi = 0; pi < masked[k].positions.size(); ++pi, ++row) {
      const int32_t target = masked[k].targets[pi];
      if (target < 0 || target >= params.config.vocab_size)
        throw InvalidArgument("masked loss: target id outside vocabulary");
      const auto z = fwd.logits.row(row);
      const T mx = z.maxCoeff();
      const T lse = mx + std::log((z.array() - mx).exp().sum());
      total += lse - z(target);
    }
  }
  fwd.loss = total / static_cast<T>(total_rows);
  if (!std::isfinite(static_cast<double>(fwd.loss))) throw NumericError("masked loss: non-finite value");
  return fwd;
}

// Backward of the masked NLL scaled by `weight`. Per-sentence hidden
// gradients go straight through encoder_backward; the gradient w.r.t. each
// injection vector is accumulated into d_cls (one row per masked sentence).
template <class T>
void masked_nll_backward(const Parameters<T>& params, const std::vector<MaskedSentence>& masked,
                         MaskedForward<T>& fwd, T weight, Parameters<T>& grads, MatX<T>* d_cls) {
  const Eigen::Index total_rows = fwd.aug_rows.rows();
  const T scale = weight / static_cast<T>(total_rows);

  MatX<T> d_logits(total_rows, params.config.vocab_size);
  Eigen::Index row = 0;
  for (size_t k = 0; k < masked.size(); ++k) {
    for (size_t pi = 0; pi < masked[k].positions.size(); ++pi, ++row) {
      const auto z = fwd.logits.row(row);
      const T mx = z.maxCoeff();
      Eigen::Array<T, 1, Eigen::Dynamic> probs = (z.array() - mx).exp();
      probs /= probs.sum();
      d_logits.row(row) = probs.matrix() * scale;
      d_logits(row, masked[k].targets[pi]) -= scale;
    }
  }

  grads.tok_emb.noalias() += d_logits.transpose() * fwd.aug_rows;
  grads.out_bias += d_logits.colwise().sum().transpose();
  MatX<T> d_aug = d_logits * params.tok_emb;

  row = 0;
  for (size_t k = 0; k < masked.size(); ++k) {
    const Eigen::Index n_pos = static_cast<Eigen::Index>(masked[k].positions.size());
    if (n_pos == 0) continue;
    MatX<T> d_hidden = MatX<T>::Zero(params.config.max_len, params.config.hidden_dim);
    for (Eigen::Index pi = 0; pi < n_pos; ++pi, ++row) {
      d_hidden.row(masked[k].positions[static_cast<size_t>(pi)]) += d_aug.row(row);
      if (d_cls != nullptr) d_cls->row(static_cast<Eigen::Index>(k)) += d_aug.row(row);
    }
    encoder_backward(params, fwd.caches[k], d_hidden, grads);
  }
}

}  // namespace

template <class T>
T mlm_loss(const Parameters<T>& params, const std::vector<MaskedSentence>& masked) {
  return masked_nll_forward(params, masked, static_cast<const MatX<T>*>(nullptr)).loss;
}

template <class T>
T auto_mlm_loss(const Parameters<T>& params, const std::vector<EncodedSentence>& originals,
                const std::vector<MaskedSentence>& masked, bool inject) {
  if (originals.size() != masked.size())
    throw InvalidArgument("auto_mlm_loss: originals and masked batches differ in length");
  if (!inject) return masked_nll_forward(params, masked, static_cast<const MatX<T>*>(nullptr)).loss;

  MatX<T> cls_rows(static_cast<Eigen::Index>(originals.size()), params.config.hidden_dim);
  for (size_t k = 0; k < originals.size(); ++k) {
    SentenceCache<T> cache = encode_cached(params, originals[k]);
    cls_rows.row(static_cast<Eigen::Index>(k)) = cache.hidden.row(0);
  }
  return masked_nll_forward(params, masked, &cls_rows).loss;
}

StepInputs prepare_step_inputs(PairBatch pairs, const LossConfig& cfg, int32_t vocab_size, Rng& mask_rng) {
  StepInputs inputs;
  inputs.pairs = std::move(pairs);
  if (!cfg.uses_masked_term()) return inputs;
  const int32_t n = static_cast<int32_t>(inputs.pairs.agents.size());
  const bool mask_agents = cfg.automlm_side != AutoMlmSide::kUser;
  const bool mask_users = cfg.automlm_side != AutoMlmSide::kAgent;
  if (mask_agents) {
    for (int32_t j = 0; j < n; ++j) {
      inputs.masked.push_back(apply_masking(inputs.pairs.agents[static_cast<size_t>(j)], cfg.masking,
                                            mask_rng, vocab_size));
      inputs.masked_origin.push_back(j);
    }
  }
  if (mask_users) {
    for (size_t j = 0; j < inputs.pairs.users.size(); ++j) {
      inputs.masked.push_back(apply_masking(inputs.pairs.users[j], cfg.masking, mask_rng, vocab_size));
      inputs.masked_origin.push_back(n + static_cast<int32_t>(j));
    }
  }
  return inputs;
}

template <class T>
LossBreakdown compute_loss_and_gradients(const Parameters<T>& params, const StepInputs& inputs,
                                         const LossConfig& cfg, Parameters<T>* grads, Rng* dropout_rng) {
  const size_t n = inputs.pairs.agents.size();
  if (inputs.pairs.users.size() != n)
    throw InvalidArgument("compute_loss: agent and user sides differ in length");
  const bool use_cl = cfg.uses_cl();
  const bool use_masked = cfg.uses_masked_term();
  const bool injecting = cfg.masked_term_injects();
  if (use_cl && n < 2) throw InvalidArgument("compute_loss: contrastive modes need a batch of at least 2");
  if (use_masked && inputs.masked.empty()) throw InvalidArgument("compute_loss: no masked sentences supplied");
  if (inputs.masked.size() != inputs.masked_origin.size())
    throw InvalidArgument("compute_loss: masked/origin length mismatch");

  const Eigen::Index dim = params.config.hidden_dim;

  // Forward passes over the uncorrupted sentences that anything depends on.
  std::vector<SentenceCache<T>> origin_caches(2 * n);
  std::vector<bool> origin_needed(2 * n, false);
  if (use_cl) std::fill(origin_needed.begin(), origin_needed.end(), true);
  if (injecting) {
    for (int32_t idx : inputs.masked_origin) {
      if (idx < 0 || idx >= static_cast<int32_t>(2 * n))
        throw InvalidArgument("compute_loss: masked origin index out of range");
      origin_needed[static_cast<size_t>(idx)] = true;
    }
  }
  auto origin_sentence = [&](size_t idx) -> const EncodedSentence& {
    return idx < n ? inputs.pairs.agents[idx] : inputs.pairs.users[idx - n];
  };
  for (size_t idx = 0; idx < 2 * n; ++idx) {
    if (origin_needed[idx]) origin_caches[idx] = encode_cached(params, origin_sentence(idx), dropout_rng);
  }

  LossBreakdown breakdown;
  breakdown.lambda = cfg.lambda;
  breakdown.margin = cfg.margin;

  // Contrastive term on the normalized CLS score matrix.
  MatX<T> agent_unit, user_unit, d_score;
  VecX<T> agent_norms, user_norms;
  if (use_cl) {
    agent_unit.resize(static_cast<Eigen::Index>(n), dim);
    user_unit.resize(static_cast<Eigen::Index>(n), dim);
    agent_norms.resize(static_cast<Eigen::Index>(n));
    user_norms.resize(static_cast<Eigen::Index>(n));
    for (size_t i = 0; i < n; ++i) {
      const auto cls_a = origin_caches[i].hidden.row(0);
      const auto cls_u = origin_caches[n + i].hidden.row(0);
      const T na = cls_a.norm(), nu = cls_u.norm();
      if (na == T(0) || nu == T(0)) throw NumericError("compute_loss: zero-norm CLS vector");
      agent_norms(static_cast<Eigen::Index>(i)) = na;
      user_norms(static_cast<Eigen::Index>(i)) = nu;
      agent_unit.row(static_cast<Eigen::Index>(i)) = cls_a / na;
      user_unit.row(static_cast<Eigen::Index>(i)) = cls_u / nu;
    }
    MatX<T> scores = agent_unit * user_unit.transpose();
    T cl = cl_margin_loss(scores, static_cast<T>(cfg.margin), cfg.index_mode, cfg.hinge_mode);
    if (cfg.cl_symmetric) {
      const MatX<T> scores_t = scores.transpose();
      cl = (cl + cl_margin_loss(scores_t, static_cast<T>(cfg.margin), cfg.index_mode, cfg.hinge_mode)) / T(2);
      if (grads != nullptr) {
        const MatX<T> g1 = cl_margin_loss_grad(scores, static_cast<T>(cfg.margin), cfg.index_mode, cfg.hinge_mode);
        const MatX<T> g2 =
            cl_margin_loss_grad(scores_t, static_cast<T>(cfg.margin), cfg.index_mode, cfg.hinge_mode);
        d_score = (g1 + g2.transpose()) / T(2);
      }
    } else if (grads != nullptr) {
      d_score = cl_margin_loss_grad(scores, static_cast<T>(cfg.margin), cfg.index_mode, cfg.hinge_mode);
    }
    breakdown.cl = static_cast<double>(cl);
    breakdown.has_cl = true;
  }

  // Masked-prediction term (MLM or Auto-MLM depending on mode).
  MaskedForward<T> masked_fwd;
  MatX<T> cls_rows;
  if (use_masked) {
    if (injecting) {
      cls_rows.resize(static_cast<Eigen::Index>(inputs.masked.size()), dim);
      for (size_t k = 0; k < inputs.masked.size(); ++k)
        cls_rows.row(static_cast<Eigen::Index>(k)) =
            origin_caches[static_cast<size_t>(inputs.masked_origin[k])].hidden.row(0);
      masked_fwd = masked_nll_forward(params, inputs.masked, &cls_rows, dropout_rng);
    } else {
      masked_fwd = masked_nll_forward(params, inputs.masked, static_cast<const MatX<T>*>(nullptr), dropout_rng);
    }
    const double value = static_cast<double>(masked_fwd.loss);
    if (cfg.mode == ObjectiveMode::kMlm || cfg.mode == ObjectiveMode::kClMlm) {
      breakdown.mlm = value;
      breakdown.has_mlm = true;
    } else {
      breakdown.automlm = value;
      breakdown.has_automlm = true;
    }
  }

  const double masked_value = breakdown.has_mlm ? breakdown.mlm : breakdown.automlm;
  if (use_cl && use_masked) {
    breakdown.joint = joint_loss(breakdown.cl, masked_value, cfg.lambda);
  } else if (use_cl) {
    breakdown.joint = breakdown.cl;
  } else {
    breakdown.joint = masked_value;
  }
  if (!std::isfinite(breakdown.joint)) throw NumericError("compute_loss: non-finite joint loss");
  if (grads == nullptr) return breakdown;

  // ---- backward ----
  const T masked_weight = use_cl && use_masked ? static_cast<T>(cfg.lambda) : (use_masked ? T(1) : T(0));

  // Gradient seeds flowing into each original sentence's raw CLS row.
  MatX<T> d_cls_origin = MatX<T>::Zero(static_cast<Eigen::Index>(2 * n), dim);

  if (use_masked && masked_weight != T(0)) {
    MatX<T> d_cls_masked;
    MatX<T>* d_cls_ptr = nullptr;
    if (injecting) {
      d_cls_masked = MatX<T>::Zero(static_cast<Eigen::Index>(inputs.masked.size()), dim);
      d_cls_ptr = &d_cls_masked;
    }
    masked_nll_backward(params, inputs.masked, masked_fwd, masked_weight, *grads, d_cls_ptr);
    if (injecting) {
      for (size_t k = 0; k < inputs.masked.size(); ++k)
        d_cls_origin.row(inputs.masked_origin[k]) += d_cls_masked.row(static_cast<Eigen::Index>(k));
    }
  }

  if (use_cl) {
    // d(loss)/d(unit vectors), then back through the normalization.
    MatX<T> d_agent_unit = d_score * user_unit;
    MatX<T> d_user_unit = d_score.transpose() * agent_unit;
    for (size_t i = 0; i < n; ++i) {
      const auto ai = agent_unit.row(static_cast<Eigen::Index>(i));
      const auto ui = user_unit.row(static_cast<Eigen::Index>(i));
      const T da_dot = d_agent_unit.row(static_cast<Eigen::Index>(i)).dot(ai);
      const T du_dot = d_user_unit.row(static_cast<Eigen::Index>(i)).dot(ui);
      d_cls_origin.row(static_cast<Eigen::Index>(i)) +=
          (d_agent_unit.row(static_cast<Eigen::Index>(i)) - da_dot * ai) / agent_norms(static_cast<Eigen::Index>(i));
      d_cls_origin.row(static_cast<Eigen::Index>(n + i)) +=
          (d_user_unit.row(static_cast<Eigen::Index>(i)) - du_dot * ui) / user_norms(static_cast<Eigen::Index>(i));
    }
  }

  for (size_t idx = 0; idx < 2 * n; ++idx) {
    if (!origin_needed[idx]) continue;
    if (d_cls_origin.row(static_cast<Eigen::Index>(idx)).isZero(T(0))) continue;
    MatX<T> d_hidden = MatX<T>::Zero(params.config.max_len, dim);
    d_hidden.row(0) = d_cls_origin.row(static_cast<Eigen::Index>(idx));
    encoder_backward(params, origin_caches[idx], d_hidden, *grads);
  }

  return breakdown;
}

template MatX<float> score_matrix<float>(const std::vector<SentenceVector<float>>&,
                                         const std::vector<SentenceVector<float>>&);
template MatX<double> score_matrix<double>(const std::vector<SentenceVector<double>>&,
                                           const std::vector<SentenceVector<double>>&);
template float cl_margin_loss<float>(const MatX<float>&, float, IndexMode, HingeMode);
template double cl_margin_loss<double>(const MatX<double>&, double, IndexMode, HingeMode);
template MatX<float> cl_margin_loss_grad<float>(const MatX<float>&, float, IndexMode, HingeMode);
template MatX<double> cl_margin_loss_grad<double>(const MatX<double>&, double, IndexMode, HingeMode);
template float mlm_loss<float>(const Parameters<float>&, const std::vector<MaskedSentence>&);
template double mlm_loss<double>(const Parameters<double>&, const std::vector<MaskedSentence>&);
template float auto_mlm_loss<float>(const Parameters<float>&, const std::vector<EncodedSentence>&,
                                    const std::vector<MaskedSentence>&, bool);
template double auto_mlm_loss<double>(const Parameters<double>&, const std::vector<EncodedSentence>&,
                                      const std::vector<MaskedSentence>&, bool);
template LossBreakdown compute_loss_and_gradients<float>(const Parameters<float>&, const StepInputs&,
                                                         const LossConfig&, Parameters<float>*, Rng*);
template LossBreakdown compute_loss_and_gradients<double>(const Parameters<double>&, const StepInputs&,
                                                          const LossConfig&, Parameters<double>*, Rng*);

}  // namespace amlm
