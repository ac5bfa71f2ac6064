#include "hazardlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hazardlab/errors.hpp"
#include "hazardlab/numeric.hpp"

namespace hazardlab {

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

Mat sigmoid(const Mat& x) { return (1.0 / (1.0 + (-x.array()).exp())).matrix(); }

// row-wise softmax with max subtraction
Mat row_softmax(const Mat& scores) {
  Mat out(scores.rows(), scores.cols());
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    const double m = scores.row(r).maxCoeff();
    Eigen::ArrayXd e = (scores.row(r).array() - m).exp();
    out.row(r) = (e / e.sum()).matrix().transpose();
  }
  return out;
}

Vec softmax(const Vec& scores) {
  const double m = scores.maxCoeff();
  Eigen::ArrayXd e = (scores.array() - m).exp();
  return (e / e.sum()).matrix();
}

void check_finite(const Mat& m, const char* what) {
  if (!m.allFinite()) raise(ErrorKind::numeric, std::string("non-finite values in ") + what);
}

}  // namespace

void ModelConfig::validate() const {
  if (feature_dim < 1 || encoder_hidden < 1 || embed_dim < 1 || gru_hidden < 1 ||
      attention_hidden < 1)
    raise(ErrorKind::invalid_input, "model widths must be positive");
  if (interval_count < 1) raise(ErrorKind::invalid_input, "interval_count must be >= 1");
}

const std::array<const char*, ModelParams::kTensorCount>& ModelParams::tensor_names() {
  static const std::array<const char*, kTensorCount> names = {
      "enc_w1", "enc_b1", "enc_w2", "enc_b2",
      "attn_wq", "attn_wk", "attn_wv",
      "gru_wz", "gru_uz", "gru_bz",
      "gru_wr", "gru_ur", "gru_br",
      "gru_wh", "gru_uh", "gru_bh",
      "mil_v", "mil_w", "head_w", "head_b"};
  return names;
}

ModelParams ModelParams::zeros_like(const ModelParams& other) {
  ModelParams out;
  const auto src = other.tensors();
  const auto dst = out.tensors();
  for (int i = 0; i < kTensorCount; ++i) *dst[i] = Mat::Zero(src[i]->rows(), src[i]->cols());
  return out;
}

bool ModelParams::all_finite() const {
  for (const Mat* m : tensors())
    if (!m->allFinite()) return false;
  return true;
}

ModelParams init_params(const ModelConfig& cfg) {
  cfg.validate();
  num::Rng rng(cfg.seed);
  const auto glorot = [&](Eigen::Index rows, Eigen::Index cols) {
    const double s = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Mat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.uniform(-s, s);
    return m;
  };

  const int d = cfg.feature_dim, h1 = cfg.encoder_hidden, e = cfg.embed_dim;
  const int g = cfg.gru_hidden, in = cfg.gru_input_dim(), a = cfg.attention_hidden;

  ModelParams p;
  p.enc_w1 = glorot(d, h1);
  p.enc_b1 = Mat::Zero(1, h1);
  p.enc_w2 = glorot(h1, e);
  p.enc_b2 = Mat::Zero(1, e);
  p.attn_wq = glorot(e, e);
  p.attn_wk = glorot(e, e);
  p.attn_wv = glorot(e, e);
  p.gru_wz = glorot(in, g);
  p.gru_uz = glorot(g, g);
  p.gru_bz = Mat::Ones(1, g);  // start near "keep memory"
  p.gru_wr = glorot(in, g);
  p.gru_ur = glorot(g, g);
  p.gru_br = Mat::Zero(1, g);
  p.gru_wh = glorot(in, g);
  p.gru_uh = glorot(g, g);
  p.gru_bh = Mat::Zero(1, g);
  p.mil_v = glorot(g, a);
  p.mil_w = glorot(a, 1);
  p.head_w = glorot(g, 1);
  p.head_b = Mat::Zero(1, 1);
  return p;
}

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& bag) {
  if (bag.empty()) raise(ErrorKind::invalid_input, "bag must be non-empty");
  const std::size_t d = bag.front().size();
  Mat m(static_cast<Eigen::Index>(bag.size()), static_cast<Eigen::Index>(d));
  for (std::size_t p = 0; p < bag.size(); ++p) {
    if (bag[p].size() != d) raise(ErrorKind::invalid_input, "instances differ in dimension");
    for (std::size_t c = 0; c < d; ++c) m(p, c) = bag[p][c];
  }
  return m;
}

ForwardResult forward(const Eigen::MatrixXd& bag, double binary_feature, const TimeGrid& grid,
                      const ModelParams& params, const ModelConfig& cfg) {
  cfg.validate();
  if (bag.cols() != cfg.feature_dim)
    raise(ErrorKind::invalid_input, "bag feature dimension does not match config");
  if (bag.rows() < 1) raise(ErrorKind::invalid_input, "bag must be non-empty");
  if (grid.interval_count() != cfg.interval_count)
    raise(ErrorKind::invalid_input, "grid length does not match config interval_count");

  const Eigen::Index pcount = bag.rows();
  const int k = cfg.interval_count;

  ForwardCache cache;
  cache.bag = bag;
  cache.binary_feature = binary_feature;
  cache.used_self_attention = cfg.use_self_attention;
  cache.used_mil = cfg.use_mil;
  cache.used_binary = cfg.use_binary_feature;
  cache.pooled_hazards = cfg.mil_on_hazards;

  // instance encoder, two tanh layers
  cache.enc_h1 = (bag * params.enc_w1).rowwise() + params.enc_b1.row(0);
  cache.enc_h1 = cache.enc_h1.array().tanh();
  cache.embed0 = (cache.enc_h1 * params.enc_w2).rowwise() + params.enc_b2.row(0);
  cache.embed0 = cache.embed0.array().tanh();

  // residual scaled dot-product self-attention across instances
  if (cfg.use_self_attention) {
    cache.attn_q = cache.embed0 * params.attn_wq;
    cache.attn_k = cache.embed0 * params.attn_wk;
    cache.attn_v = cache.embed0 * params.attn_wv;
    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.embed_dim));
    cache.attn_a = row_softmax(cache.attn_q * cache.attn_k.transpose() * scale);
    cache.embed = cache.embed0 + cache.attn_a * cache.attn_v;
  } else {
    cache.embed = cache.embed0;
  }
  check_finite(cache.embed, "instance embedding");

  // GRU over the time axis, all instances advanced together
  const int in_dim = cfg.gru_input_dim();
  Mat x_step(pcount, in_dim);
  x_step.leftCols(cfg.embed_dim) = cache.embed;
  if (cfg.use_binary_feature) x_step.col(cfg.embed_dim).setConstant(binary_feature);

  cache.gru_z.resize(k);
  cache.gru_r.resize(k);
  cache.gru_c.resize(k);
  cache.gru_h.resize(k);
  Mat h_prev = Mat::Zero(pcount, cfg.gru_hidden);
  cache.logits.resize(pcount, k);
  for (int j = 0; j < k; ++j) {
    x_step.col(in_dim - 1).setConstant(static_cast<double>(j + 1) / k);
    Mat z = sigmoid(((x_step * params.gru_wz + h_prev * params.gru_uz).rowwise() +
                     params.gru_bz.row(0)));
    Mat r = sigmoid(((x_step * params.gru_wr + h_prev * params.gru_ur).rowwise() +
                     params.gru_br.row(0)));
    Mat c = ((x_step * params.gru_wh + (r.array() * h_prev.array()).matrix() * params.gru_uh)
                 .rowwise() +
             params.gru_bh.row(0));
    c = c.array().tanh();
    Mat h = (z.array() * h_prev.array() + (1.0 - z.array()) * c.array()).matrix();
    cache.gru_z[j] = std::move(z);
    cache.gru_r[j] = std::move(r);
    cache.gru_c[j] = std::move(c);
    cache.gru_h[j] = h;
    cache.logits.col(j) = h * params.head_w + Vec::Constant(pcount, params.head_b(0, 0));
    h_prev = std::move(h);
  }

  cache.hidden_mean = Mat::Zero(pcount, cfg.gru_hidden);
  for (int j = 0; j < k; ++j) cache.hidden_mean += cache.gru_h[j];
  cache.hidden_mean /= static_cast<double>(k);

  // attention-based MIL pooling over instances
  if (cfg.use_mil) {
    cache.mil_tanh = (cache.hidden_mean * params.mil_v).array().tanh();
    cache.mil_scores = cache.mil_tanh * params.mil_w;
    cache.attention = softmax(cache.mil_scores);
  } else {
    cache.attention = Vec::Constant(pcount, 1.0 / static_cast<double>(pcount));
  }

  if (cfg.mil_on_hazards) {
    const Mat inst_hazard = sigmoid(cache.logits);
    cache.hazard_values = inst_hazard.transpose() * cache.attention;
  } else {
    cache.bag_logits = cache.logits.transpose() * cache.attention;
    cache.hazard_values =
        (1.0 / (1.0 + (-cache.bag_logits.array()).exp())).matrix();
  }
  check_finite(cache.hazard_values, "hazard output");

  ForwardResult result;
  result.hazard.values.assign(cache.hazard_values.data(), cache.hazard_values.data() + k);
  result.attention.weights.assign(cache.attention.data(), cache.attention.data() + pcount);
  result.cache = std::move(cache);
  return result;
}

ForwardResult forward(const std::vector<std::vector<double>>& bag, double binary_feature,
                      const TimeGrid& grid, const ModelParams& params, const ModelConfig& cfg) {
  return forward(to_matrix(bag), binary_feature, grid, params, cfg);
}

ModelParams backward(const ForwardCache& cache, const std::vector<double>& upstream,
                     const ModelParams& params, const ModelConfig& cfg) {
  const int k = cfg.interval_count;
  const Eigen::Index pcount = cache.bag.rows();
  if (static_cast<int>(upstream.size()) != k)
    raise(ErrorKind::invalid_input, "upstream gradient length does not match grid");
  if (cache.bag.cols() != cfg.feature_dim || static_cast<int>(cache.gru_h.size()) != k ||
      cache.used_self_attention != cfg.use_self_attention || cache.used_mil != cfg.use_mil ||
      cache.used_binary != cfg.use_binary_feature || cache.pooled_hazards != cfg.mil_on_hazards)
    raise(ErrorKind::invalid_input, "forward cache does not match config");

  ModelParams grads = ModelParams::zeros_like(params);
  const Vec dhaz = Eigen::Map<const Vec>(upstream.data(), k);

  // pooling and output head
  Mat dlogits(pcount, k);
  Vec dattention = Vec::Zero(pcount);
  if (cfg.mil_on_hazards) {
    const Mat inst_hazard = sigmoid(cache.logits);
    dattention = inst_hazard * dhaz;
    const Mat dinst = cache.attention * dhaz.transpose();  // P x k
    dlogits = (dinst.array() * inst_hazard.array() * (1.0 - inst_hazard.array())).matrix();
  } else {
    const Eigen::ArrayXd hz = cache.hazard_values.array();
    const Vec dbag_logits = (dhaz.array() * hz * (1.0 - hz)).matrix();
    dlogits = cache.attention * dbag_logits.transpose();
    dattention = cache.logits * dbag_logits;
  }

  Mat dhidden_mean = Mat::Zero(pcount, cfg.gru_hidden);
  if (cfg.use_mil) {
    // softmax backward
    const Vec ds =
        (cache.attention.array() * (dattention.array() - dattention.dot(cache.attention)))
            .matrix();
    grads.mil_w = cache.mil_tanh.transpose() * ds;
    const Mat dtanh = ds * params.mil_w.transpose();  // P x attention_hidden
    const Mat dpre = (dtanh.array() * (1.0 - cache.mil_tanh.array().square())).matrix();
    grads.mil_v = cache.hidden_mean.transpose() * dpre;
    dhidden_mean = dpre * params.mil_v.transpose();
  }

  // per-step hidden gradients: head term + mean-pool share
  std::vector<Mat> dh(k);
  const double inv_k = 1.0 / static_cast<double>(k);
  for (int j = 0; j < k; ++j) {
    dh[j] = dlogits.col(j) * params.head_w.transpose() + dhidden_mean * inv_k;
    grads.head_w += cache.gru_h[j].transpose() * dlogits.col(j);
    grads.head_b(0, 0) += dlogits.col(j).sum();
  }

  // backpropagation through time
  const int in_dim = cfg.gru_input_dim();
  Mat x_step(pcount, in_dim);
  x_step.leftCols(cfg.embed_dim) = cache.embed;
  if (cfg.use_binary_feature) x_step.col(cfg.embed_dim).setConstant(cache.binary_feature);

  Mat dembed = Mat::Zero(pcount, cfg.embed_dim);
  Mat dh_next = Mat::Zero(pcount, cfg.gru_hidden);
  for (int j = k - 1; j >= 0; --j) {
    x_step.col(in_dim - 1).setConstant(static_cast<double>(j + 1) / k);
    const Mat h_prev = (j == 0) ? Mat::Zero(pcount, cfg.gru_hidden) : cache.gru_h[j - 1];
    const Mat dh_total = dh[j] + dh_next;

    const auto& z = cache.gru_z[j];
    const auto& r = cache.gru_r[j];
    const auto& c = cache.gru_c[j];

    const Mat dz = (dh_total.array() * (h_prev.array() - c.array())).matrix();
    const Mat dc = (dh_total.array() * (1.0 - z.array())).matrix();
    Mat dh_prev = (dh_total.array() * z.array()).matrix();

    const Mat dc_pre = (dc.array() * (1.0 - c.array().square())).matrix();
    grads.gru_wh += x_step.transpose() * dc_pre;
    grads.gru_uh += (r.array() * h_prev.array()).matrix().transpose() * dc_pre;
    grads.gru_bh += dc_pre.colwise().sum();
    Mat dx = dc_pre * params.gru_wh.transpose();
    const Mat drh = dc_pre * params.gru_uh.transpose();
    const Mat dr = (drh.array() * h_prev.array()).matrix();
    dh_prev += (drh.array() * r.array()).matrix();

    const Mat dz_pre = (dz.array() * z.array() * (1.0 - z.array())).matrix();
    grads.gru_wz += x_step.transpose() * dz_pre;
    grads.gru_uz += h_prev.transpose() * dz_pre;
    grads.gru_bz += dz_pre.colwise().sum();
    dx += dz_pre * params.gru_wz.transpose();
    dh_prev += dz_pre * params.gru_uz.transpose();

    const Mat dr_pre = (dr.array() * r.array() * (1.0 - r.array())).matrix();
    grads.gru_wr += x_step.transpose() * dr_pre;
    grads.gru_ur += h_prev.transpose() * dr_pre;
    grads.gru_br += dr_pre.colwise().sum();
    dx += dr_pre * params.gru_wr.transpose();
    dh_prev += dr_pre * params.gru_ur.transpose();

    dembed += dx.leftCols(cfg.embed_dim);
    dh_next = std::move(dh_prev);
  }

  // self-attention backward (residual scaled dot-product)
  Mat dembed0;
  if (cfg.use_self_attention) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.embed_dim));
    const Mat da = dembed * cache.attn_v.transpose();
    const Mat dv = cache.attn_a.transpose() * dembed;
    Mat dscores(pcount, pcount);
    for (Eigen::Index rr = 0; rr < pcount; ++rr) {
      const double dot = da.row(rr).dot(cache.attn_a.row(rr));
      dscores.row(rr) =
          (cache.attn_a.row(rr).array() * (da.row(rr).array() - dot)).matrix();
    }
    const Mat dq = dscores * cache.attn_k * scale;
    const Mat dk = dscores.transpose() * cache.attn_q * scale;
    grads.attn_wq = cache.embed0.transpose() * dq;
    grads.attn_wk = cache.embed0.transpose() * dk;
    grads.attn_wv = cache.embed0.transpose() * dv;
    dembed0 = dembed + dq * params.attn_wq.transpose() + dk * params.attn_wk.transpose() +
              dv * params.attn_wv.transpose();
  } else {
    dembed0 = dembed;
  }

  // encoder backward
  const Mat dpre2 = (dembed0.array() * (1.0 - cache.embed0.array().square())).matrix();
  grads.enc_w2 = cache.enc_h1.transpose() * dpre2;
  grads.enc_b2 = dpre2.colwise().sum();
  const Mat dh1 = dpre2 * params.enc_w2.transpose();
  const Mat dpre1 = (dh1.array() * (1.0 - cache.enc_h1.array().square())).matrix();
  grads.enc_w1 = cache.bag.transpose() * dpre1;
  grads.enc_b1 = dpre1.colwise().sum();

  return grads;
}

OptimizerState OptimizerState::init(const ModelParams& like, double learning_rate, double beta1,
                                    double beta2, double epsilon, bool nesterov) {
  OptimizerState s;
  s.m = ModelParams::zeros_like(like);
  s.v = ModelParams::zeros_like(like);
  s.learning_rate = learning_rate;
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.epsilon = epsilon;
  s.nesterov = nesterov;
  return s;
}

void nadam_step(ModelParams& params, const ModelParams& grads, OptimizerState& state) {
  if (!grads.all_finite()) raise(ErrorKind::numeric, "non-finite gradients in optimizer step");
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(state.beta1, t);
  const double bc2 = 1.0 - std::pow(state.beta2, t);

  const auto p_list = params.tensors();
  const auto g_list = grads.tensors();
  const auto m_list = state.m.tensors();
  const auto v_list = state.v.tensors();
  for (int i = 0; i < ModelParams::kTensorCount; ++i) {
    Mat& p = *p_list[i];
    const Mat& g = *g_list[i];
    Mat& m = *m_list[i];
    Mat& v = *v_list[i];
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v.array() = state.beta2 * v.array() + (1.0 - state.beta2) * g.array().square();
    const Eigen::ArrayXXd m_hat = m.array() / bc1;
    const Eigen::ArrayXXd v_hat = v.array() / bc2;
    Eigen::ArrayXXd direction = m_hat;
    if (state.nesterov)
      direction = state.beta1 * m_hat + ((1.0 - state.beta1) / bc1) * g.array();
    p.array() -= state.learning_rate * direction / (v_hat.sqrt() + state.epsilon);
  }
}

double BinaryRelapseModel::predict(const SubjectRecord& subject) const {
  subject.validate();
  if (subject.feature_dim() != weights.size())
    raise(ErrorKind::invalid_input, "binary model dimension does not match subject features");
  Vec pooled = Vec::Zero(weights.size());
  for (const auto& inst : subject.bag)
    pooled += Eigen::Map<const Vec>(inst.data(), static_cast<Eigen::Index>(inst.size()));
  pooled /= static_cast<double>(subject.bag.size());
  return 1.0 / (1.0 + std::exp(-(weights.dot(pooled) + bias)));
}

BinaryRelapseModel train_binary_model(const std::vector<SubjectRecord>& cohort,
                                      double horizon_months) {
  if (cohort.empty()) raise(ErrorKind::insufficient_data, "empty cohort");
  std::vector<Vec> features;
  std::vector<double> targets;
  for (const auto& subject : cohort) {
    subject.validate();
    if (subject.censored && subject.observed_time < horizon_months) continue;  // label unknowable
    Vec pooled = Vec::Zero(subject.feature_dim());
    for (const auto& inst : subject.bag)
      pooled += Eigen::Map<const Vec>(inst.data(), static_cast<Eigen::Index>(inst.size()));
    pooled /= static_cast<double>(subject.bag.size());
    features.push_back(std::move(pooled));
    targets.push_back(!subject.censored && subject.observed_time < horizon_months ? 1.0 : 0.0);
  }
  if (features.empty())
    raise(ErrorKind::insufficient_data, "all subjects censored before the binary horizon");

  const auto m = static_cast<Eigen::Index>(features.size());
  const Eigen::Index d = features.front().size();
  BinaryRelapseModel model;
  model.weights = Vec::Zero(d);
  model.bias = 0.0;

  const double lr = 0.5;
  const double tol = 1e-6;
  for (int iter = 0; iter < 10000; ++iter) {
    Vec grad_w = Vec::Zero(d);
    double grad_b = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double p =
          1.0 / (1.0 + std::exp(-(model.weights.dot(features[i]) + model.bias)));
      const double delta = p - targets[i];
      grad_w += delta * features[i];
      grad_b += delta;
    }
    grad_w /= static_cast<double>(m);
    grad_b /= static_cast<double>(m);
    const double gmax = std::max(grad_w.cwiseAbs().maxCoeff(), std::fabs(grad_b));
    if (gmax < tol) break;
    model.weights -= lr * grad_w;
    model.bias -= lr * grad_b;
  }
  return model;
}

namespace {

struct PreparedSubject {
  Mat bag;
  DiscreteLabel label;
  double binary_feature = 0.0;
};

std::vector<PreparedSubject> prepare(const std::vector<SubjectRecord>& cohort,
                                     const TimeGrid& grid, const ModelConfig& cfg,
                                     const BinaryRelapseModel* binary_model) {
  std::vector<PreparedSubject> out;
  out.reserve(cohort.size());
  for (const auto& subject : cohort) {
    subject.validate();
    if (subject.feature_dim() != cfg.feature_dim)
      raise(ErrorKind::invalid_input,
            "subject " + subject.id + ": feature dimension does not match model");
    PreparedSubject p;
    p.bag = to_matrix(subject.bag);
    p.label = discretize_label(subject.observed_time, subject.censored, grid);
    if (cfg.use_binary_feature) {
      if (binary_model == nullptr)
        raise(ErrorKind::invalid_input, "binary feature enabled but no binary model given");
      p.binary_feature = binary_model->predict(subject);
    }
    out.push_back(std::move(p));
  }
  return out;
}

double mean_loss(const std::vector<PreparedSubject>& subjects, const TimeGrid& grid,
                 const ModelParams& params, const ModelConfig& cfg, const LossConfig& loss_cfg) {
  double total = 0.0;
  for (const auto& s : subjects) {
    const ForwardResult fwd = forward(s.bag, s.binary_feature, grid, params, cfg);
    total += nll(fwd.hazard, s.label, loss_cfg);
  }
  return total / static_cast<double>(subjects.size());
}

}  // namespace

TrainResult train(const std::vector<SubjectRecord>& cohort_train,
                  const std::vector<SubjectRecord>& cohort_val, const TimeGrid& grid,
                  const ModelConfig& cfg, const LossConfig& loss_cfg, const TrainOptions& opts,
                  const BinaryRelapseModel* binary_model) {
  if (cohort_train.empty() || cohort_val.empty())
    raise(ErrorKind::insufficient_data, "training and validation cohorts must be non-empty");
  if (opts.epochs < 0 || opts.batch_size < 1)
    raise(ErrorKind::invalid_input, "epochs must be >= 0 and batch_size >= 1");

  const auto train_set = prepare(cohort_train, grid, cfg, binary_model);
  const auto val_set = prepare(cohort_val, grid, cfg, binary_model);

  TrainResult result;
  result.params = init_params(cfg);
  if (opts.epochs == 0) return result;

  OptimizerState optimizer = OptimizerState::init(result.params, opts.learning_rate, opts.beta1,
                                                  opts.beta2, opts.adam_epsilon, opts.nesterov);
  ModelParams params = result.params;
  num::Rng shuffle_rng(num::mix_seed(opts.seed, 0x5u));

  double best_val = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= opts.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng.engine());
    double epoch_loss = 0.0;
    bool finite = true;

    std::size_t pos = 0;
    while (pos < order.size() && finite) {
      const std::size_t count =
          std::min<std::size_t>(opts.batch_size, order.size() - pos);
      ModelParams batch_grads = ModelParams::zeros_like(params);
      double batch_loss = 0.0;
      const auto acc_list = batch_grads.tensors();
      for (std::size_t b = 0; b < count; ++b) {
        const auto& s = train_set[order[pos + b]];
        const ForwardResult fwd = forward(s.bag, s.binary_feature, grid, params, cfg);
        batch_loss += nll(fwd.hazard, s.label, loss_cfg);
        const std::vector<double> upstream = nll_gradient(fwd.hazard, s.label, loss_cfg);
        const ModelParams g = backward(fwd.cache, upstream, params, cfg);
        const auto g_list = g.tensors();
        for (int i = 0; i < ModelParams::kTensorCount; ++i) *acc_list[i] += *g_list[i];
      }
      if (!std::isfinite(batch_loss)) {
        finite = false;
        break;
      }
      if (opts.batch_mean) {
        const double inv = 1.0 / static_cast<double>(count);
        for (Mat* m : acc_list) *m *= inv;
      }
      nadam_step(params, batch_grads, optimizer);
      epoch_loss += batch_loss;
      pos += count;
    }

    if (!finite || !params.all_finite()) {
      result.diverged = true;
      break;
    }
    const double train_loss = epoch_loss / static_cast<double>(train_set.size());
    const double val_loss = mean_loss(val_set, grid, params, cfg, loss_cfg);
    result.log.push_back({epoch, train_loss, val_loss});
    if (!std::isfinite(val_loss)) {
      result.diverged = true;
      break;
    }
    if (val_loss < best_val) {
      best_val = val_loss;
      result.params = params;
      result.best_epoch = epoch;
    }
  }
  return result;
}

std::vector<Prediction> predict(const std::vector<SubjectRecord>& cohort,
                                const ModelParams& params, const ModelConfig& cfg,
                                const BinaryRelapseModel* binary_model, const TimeGrid& grid) {
  std::vector<Prediction> out;
  out.reserve(cohort.size());
  for (const auto& subject : cohort) {
    subject.validate();
    double bin = 0.0;
    if (cfg.use_binary_feature) {
      if (binary_model == nullptr)
        raise(ErrorKind::invalid_input, "binary feature enabled but no binary model given");
      bin = binary_model->predict(subject);
    }
    const ForwardResult fwd = forward(to_matrix(subject.bag), bin, grid, params, cfg);
    Prediction p;
    p.survival = survival_from_hazard(fwd.hazard);
    p.risk = risk_score(p.survival, grid);
    p.attention = fwd.attention;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace hazardlab
