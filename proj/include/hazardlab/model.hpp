#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hazardlab/loss.hpp"
#include "hazardlab/survival.hpp"

namespace hazardlab {

/// Architecture hyperparameters and ablation toggles. The toggles reproduce
/// the model family: base (all off), +MIL, +MIL+binary, full (+self-attention).
struct ModelConfig {
  int feature_dim = 8;
  int encoder_hidden = 16;
  int embed_dim = 16;
  bool use_self_attention = true;
  bool use_mil = true;
  bool use_binary_feature = true;
  bool mil_on_hazards = false;  // pool post-sigmoid hazards instead of logits
  int gru_hidden = 16;
  int interval_count = 28;
  int attention_hidden = 8;
  std::uint64_t seed = 0;

  int gru_input_dim() const { return embed_dim + (use_binary_feature ? 1 : 0) + 1; }
  void validate() const;
};

/// All learnable weights. Matrices use the row convention: activations are
/// (instances x features) and map through x * W + b.
struct ModelParams {
  using Mat = Eigen::MatrixXd;

  Mat enc_w1, enc_b1;  // feature_dim x encoder_hidden, 1 x encoder_hidden
  Mat enc_w2, enc_b2;  // encoder_hidden x embed_dim, 1 x embed_dim
  Mat attn_wq, attn_wk, attn_wv;        // embed_dim x embed_dim
  Mat gru_wz, gru_uz, gru_bz;           // input x hidden, hidden x hidden, 1 x hidden
  Mat gru_wr, gru_ur, gru_br;
  Mat gru_wh, gru_uh, gru_bh;
  Mat mil_v;            // gru_hidden x attention_hidden
  Mat mil_w;            // attention_hidden x 1
  Mat head_w, head_b;   // gru_hidden x 1, 1 x 1

  static constexpr int kTensorCount = 20;

  /// Fixed tensor order; initialization, the optimizer, serialization and the
  /// gradient checker all iterate in this order.
  std::array<Mat*, kTensorCount> tensors() {
    return {&enc_w1, &enc_b1, &enc_w2, &enc_b2,
            &attn_wq, &attn_wk, &attn_wv,
            &gru_wz, &gru_uz, &gru_bz,
            &gru_wr, &gru_ur, &gru_br,
            &gru_wh, &gru_uh, &gru_bh,
            &mil_v, &mil_w, &head_w, &head_b};
  }
  std::array<const Mat*, kTensorCount> tensors() const {
    return {&enc_w1, &enc_b1, &enc_w2, &enc_b2,
            &attn_wq, &attn_wk, &attn_wv,
            &gru_wz, &gru_uz, &gru_bz,
            &gru_wr, &gru_ur, &gru_br,
            &gru_wh, &gru_uh, &gru_bh,
            &mil_v, &mil_w, &head_w, &head_b};
  }
  static const std::array<const char*, kTensorCount>& tensor_names();

  static ModelParams zeros_like(const ModelParams& other);
  bool all_finite() const;
};

/// Deterministic initialization: weights uniform in [-s, s] with
/// s = sqrt(6 / (fan_in + fan_out)), biases zero, GRU update-gate bias +1.
ModelParams init_params(const ModelConfig& cfg);

struct AttentionReport {
  std::vector<double> weights;  // non-negative, sums to 1 over the bag
};

/// All intermediates of one forward pass, retained for backward.
struct ForwardCache {
  Eigen::MatrixXd bag;             // P x d
  Eigen::MatrixXd enc_h1, embed0;  // post-tanh encoder activations
  Eigen::MatrixXd attn_q, attn_k, attn_v, attn_a;  // self-attention pieces
  Eigen::MatrixXd embed;                           // post-attention embedding
  double binary_feature = 0.0;
  std::vector<Eigen::MatrixXd> gru_z, gru_r, gru_c, gru_h;  // per step, P x hidden
  Eigen::MatrixXd hidden_mean;                              // P x hidden
  Eigen::MatrixXd mil_tanh;                                 // P x attention_hidden
  Eigen::VectorXd mil_scores, attention;                    // P
  Eigen::MatrixXd logits;                                   // P x k per-instance
  Eigen::VectorXd bag_logits, hazard_values;                // k
  bool used_self_attention = false, used_mil = false, used_binary = false,
       pooled_hazards = false;
};

struct ForwardResult {
  HazardCurve hazard;
  AttentionReport attention;
  ForwardCache cache;
};

ForwardResult forward(const Eigen::MatrixXd& bag, double binary_feature, const TimeGrid& grid,
                      const ModelParams& params, const ModelConfig& cfg);
/// Convenience overload for the record layout.
ForwardResult forward(const std::vector<std::vector<double>>& bag, double binary_feature,
                      const TimeGrid& grid, const ModelParams& params, const ModelConfig& cfg);

/// Reverse-mode gradients of a scalar loss with upstream = d(loss)/d(hazard).
ModelParams backward(const ForwardCache& cache, const std::vector<double>& upstream,
                     const ModelParams& params, const ModelConfig& cfg);

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& bag);

struct OptimizerState {
  ModelParams m, v;
  long step = 0;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  bool nesterov = true;

  static OptimizerState init(const ModelParams& like, double learning_rate = 1e-3,
                             double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8,
                             bool nesterov = true);
};

/// One Adam step with bias correction; with `nesterov` set, the first moment
/// uses the Nesterov-style lookahead blend.
void nadam_step(ModelParams& params, const ModelParams& grads, OptimizerState& state);

/// Logistic regression over mean-pooled bag features predicting an event
/// within `horizon_months`. Subjects censored before the horizon carry an
/// unknowable label and are excluded.
struct BinaryRelapseModel {
  Eigen::VectorXd weights;
  double bias = 0.0;

  double predict(const SubjectRecord& subject) const;
};

BinaryRelapseModel train_binary_model(const std::vector<SubjectRecord>& cohort,
                                      double horizon_months = 24.0);

struct TrainOptions {
  int epochs = 40;
  int batch_size = 32;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  bool nesterov = true;
  bool batch_mean = true;  // normalize batch gradient by batch size
  std::uint64_t seed = 0;
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  ModelParams params;  // snapshot with the smallest validation loss
  std::vector<EpochLog> log;
  int best_epoch = 0;
  bool diverged = false;
};

TrainResult train(const std::vector<SubjectRecord>& cohort_train,
                  const std::vector<SubjectRecord>& cohort_val, const TimeGrid& grid,
                  const ModelConfig& cfg, const LossConfig& loss_cfg, const TrainOptions& opts,
                  const BinaryRelapseModel* binary_model);

struct Prediction {
  SurvivalCurve survival;
  RiskScore risk;
  AttentionReport attention;
};

std::vector<Prediction> predict(const std::vector<SubjectRecord>& cohort,
                                const ModelParams& params, const ModelConfig& cfg,
                                const BinaryRelapseModel* binary_model, const TimeGrid& grid);

}  // namespace hazardlab
