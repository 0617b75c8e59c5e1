#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "amlm/common.hpp"
#include "amlm/model.hpp"
#include "amlm/tokenizer.hpp"

namespace amlm {

struct MaskingConfig {
  double mask_prob = 0.15;
  double sub_mask = 0.8;    // fraction of selected positions replaced by MASK
  double sub_random = 0.1;  // fraction replaced by a random non-special token
  bool force_min_one = true;
  void validate() const;
};

// Corrupted copy of a sentence plus the positions and original ids to predict.
struct MaskedSentence {
  EncodedSentence corrupted;
  std::vector<int32_t> positions;  // sorted, never CLS or PAD
  std::vector<int32_t> targets;
};

MaskedSentence apply_masking(const EncodedSentence& sentence, const MaskingConfig& cfg, Rng& rng,
                             int32_t vocab_size);

enum class IndexMode { kFull, kPaperLiteral };
enum class HingeMode { kConventional, kPaperLiteral };
enum class ObjectiveMode { kCl, kMlm, kAutoMlm, kClMlm, kClAutoMlm };
enum class AutoMlmSide { kUser, kAgent, kBoth };

std::string to_string(ObjectiveMode mode);
ObjectiveMode objective_mode_from_string(const std::string& name);
std::string to_string(AutoMlmSide side);
AutoMlmSide side_from_string(const std::string& name);
std::string to_string(IndexMode mode);
IndexMode index_mode_from_string(const std::string& name);
std::string to_string(HingeMode mode);
HingeMode hinge_mode_from_string(const std::string& name);

// scores(i, j) = dot(agent_i, user_j); inputs must be unit-normalized.
template <class T>
MatX<T> score_matrix(const std::vector<SentenceVector<T>>& agent_vecs,
                     const std::vector<SentenceVector<T>>& user_vecs);

// (1/N) sum over anchors i and negatives j != i of
// max(0, scores(i,j) - scores(i,i) - m') with m' = +margin in the literal
// hinge and m' = -margin in the conventional one. kPaperLiteral indexing
// skips the first anchor row.
template <class T>
T cl_margin_loss(const MatX<T>& scores, T margin, IndexMode index_mode = IndexMode::kFull,
                 HingeMode hinge_mode = HingeMode::kConventional);

template <class T>
MatX<T> cl_margin_loss_grad(const MatX<T>& scores, T margin, IndexMode index_mode = IndexMode::kFull,
                            HingeMode hinge_mode = HingeMode::kConventional);

// Mean negative log-likelihood of the masked targets, no injection.
template <class T>
T mlm_loss(const Parameters<T>& params, const std::vector<MaskedSentence>& masked);

// Conditioned variant: the raw CLS vector of each uncorrupted original is
// added to the hidden rows at that sentence's masked positions before the
// output projection. inject=false reproduces mlm_loss exactly.
template <class T>
T auto_mlm_loss(const Parameters<T>& params, const std::vector<EncodedSentence>& originals,
                const std::vector<MaskedSentence>& masked, bool inject);

template <class T>
T joint_loss(T cl, T automlm, T lambda) {
  return cl + lambda * automlm;
}

struct LossBreakdown {
  double cl = 0.0;
  double automlm = 0.0;
  double mlm = 0.0;
  double joint = 0.0;
  double lambda = 0.0;
  double margin = 0.0;
  bool has_cl = false;
  bool has_automlm = false;
  bool has_mlm = false;
};

struct LossConfig {
  ObjectiveMode mode = ObjectiveMode::kClAutoMlm;
  double lambda = 1.0;
  double margin = 0.1;
  IndexMode index_mode = IndexMode::kFull;
  HingeMode hinge_mode = HingeMode::kConventional;
  bool cl_symmetric = false;
  AutoMlmSide automlm_side = AutoMlmSide::kBoth;
  bool inject = true;  // Auto-MLM sentence-vector injection toggle
  MaskingConfig masking;

  bool uses_cl() const {
    return mode == ObjectiveMode::kCl || mode == ObjectiveMode::kClMlm || mode == ObjectiveMode::kClAutoMlm;
  }
  bool uses_masked_term() const { return mode != ObjectiveMode::kCl; }
  bool masked_term_injects() const {
    return (mode == ObjectiveMode::kAutoMlm || mode == ObjectiveMode::kClAutoMlm) && inject;
  }
};

struct PairBatch {
  std::vector<EncodedSentence> agents;
  std::vector<EncodedSentence> users;
};

// Batch plus pre-sampled masked copies. Originals are indexed as
// agents[0..N) followed by users[0..N); masked_origin[k] points there.
struct StepInputs {
  PairBatch pairs;
  std::vector<MaskedSentence> masked;
  std::vector<int32_t> masked_origin;
};

StepInputs prepare_step_inputs(PairBatch pairs, const LossConfig& cfg, int32_t vocab_size, Rng& mask_rng);

// Forward (and, when grads is non-null, exact reverse-mode backward) of the
// configured objective over one batch. Gradients accumulate into *grads.
// dropout_rng activates dropout in every encoder pass (training only).
template <class T>
LossBreakdown compute_loss_and_gradients(const Parameters<T>& params, const StepInputs& inputs,
                                         const LossConfig& cfg, Parameters<T>* grads,
                                         Rng* dropout_rng = nullptr);

}  // namespace amlm
