#include "pfrl/networks.hpp"

#include <cmath>
#include <random>

#include <Eigen/QR>

#include "pfrl/errors.hpp"

namespace pfrl {
namespace {

Activation parse_activation(const std::string& s) {
  if (s == "elu") return Activation::kElu;
  if (s == "tanh") return Activation::kTanh;
  throw ConfigError("unknown activation '" + s + "'");
}

std::string activation_name(Activation a) {
  return a == Activation::kElu ? "elu" : "tanh";
}

void activate(Activation a, const Matrix& pre, Matrix& out) {
  if (a == Activation::kTanh) {
    out = pre.array().tanh();
  } else {
    out = pre.unaryExpr([](double v) { return v > 0.0 ? v : std::expm1(v); });
  }
}

// Derivative expressed through the activation output.
void activation_grad(Activation a, const Matrix& out, Matrix& d) {
  if (a == Activation::kTanh) {
    d.array() *= 1.0 - out.array().square();
  } else {
    d.array() *= out.unaryExpr([](double v) { return v > 0.0 ? 1.0 : v + 1.0; })
                     .array();
  }
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Matrix orthogonal(int rows, int cols, double gain, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = std::max(rows, cols);
  Matrix a(n, std::min(rows, cols));
  for (int i = 0; i < a.size(); ++i) a.data()[i] = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(n, std::min(rows, cols));
  // Sign correction makes the distribution uniform (Haar).
  const Matrix r = qr.matrixQR().topRows(std::min(rows, cols));
  for (int j = 0; j < q.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  Matrix w = rows >= cols ? q : Matrix(q.transpose());
  return gain * w;
}

}  // namespace

void to_json(nlohmann::json& j, const ActorArch& a) {
  j = {{"input_dim", a.input_dim},
       {"mlp", a.mlp},
       {"lstm", a.lstm},
       {"output_dim", a.output_dim},
       {"activation", activation_name(a.activation)},
       {"init_log_std", a.init_log_std},
       {"head_scale", a.head_scale}};
}

void from_json(const nlohmann::json& j, ActorArch& a) {
  const ActorArch d;
  a.input_dim = j.value("input_dim", d.input_dim);
  a.mlp = j.value("mlp", d.mlp);
  a.lstm = j.value("lstm", d.lstm);
  a.output_dim = j.value("output_dim", d.output_dim);
  a.activation = parse_activation(j.value("activation", std::string("elu")));
  a.init_log_std = j.value("init_log_std", d.init_log_std);
  a.head_scale = j.value("head_scale", d.head_scale);
}

void to_json(nlohmann::json& j, const CriticArch& a) {
  j = {{"input_dim", a.input_dim},
       {"mlp", a.mlp},
       {"activation", activation_name(a.activation)}};
}

void from_json(const nlohmann::json& j, CriticArch& a) {
  const CriticArch d;
  a.input_dim = j.value("input_dim", d.input_dim);
  a.mlp = j.value("mlp", d.mlp);
  a.activation = parse_activation(j.value("activation", std::string("elu")));
}

void HiddenState::reset_column(int b) {
  for (auto& m : h) m.col(b).setZero();
  for (auto& m : c) m.col(b).setZero();
}

HiddenState HiddenState::column(int b) const {
  HiddenState out;
  for (const auto& m : h) out.h.push_back(m.col(b));
  for (const auto& m : c) out.c.push_back(m.col(b));
  return out;
}

void HiddenState::set_column(int b, const HiddenState& single) {
  for (std::size_t l = 0; l < h.size(); ++l) {
    h[l].col(b) = single.h[l].col(0);
    c[l].col(b) = single.c[l].col(0);
  }
}

struct ActorCritic::Cache {
  std::vector<Matrix> trunk_in;   // input of each trunk layer
  std::vector<Matrix> trunk_out;  // activation output of each trunk layer
  std::vector<Matrix> lstm_in;
  std::vector<Matrix> gates;  // rows [i; f; g; o], post-activation
  std::vector<Matrix> cell;
  std::vector<Matrix> tanh_cell;
  std::vector<Matrix> h_prev;  // masked inputs to each step
  std::vector<Matrix> c_prev;
  Matrix head_in;
  Matrix mean;
  std::vector<Matrix> critic_acts;  // critic layer outputs, input first
};

int ActorCritic::add_block(const std::string& name, int rows, int cols) {
  blocks_.push_back({name, rows, cols, num_params_});
  num_params_ += rows * cols;
  return static_cast<int>(blocks_.size()) - 1;
}

Eigen::Map<const Matrix> ActorCritic::block(const Vector& p, int index) const {
  const ParamBlock& b = blocks_[static_cast<std::size_t>(index)];
  return Eigen::Map<const Matrix>(p.data() + b.offset, b.rows, b.cols);
}

Eigen::Map<Matrix> ActorCritic::block(Vector& p, int index) const {
  const ParamBlock& b = blocks_[static_cast<std::size_t>(index)];
  return Eigen::Map<Matrix>(p.data() + b.offset, b.rows, b.cols);
}

ActorCritic::ActorCritic(ActorArch actor, CriticArch critic)
    : actor_(std::move(actor)), critic_(std::move(critic)) {
  if (actor_.input_dim < 1 || actor_.output_dim < 1 || critic_.input_dim < 1) {
    throw InvalidArgument("ActorCritic: dimensions must be positive");
  }
  int in = actor_.input_dim;
  for (std::size_t i = 0; i < actor_.mlp.size(); ++i) {
    const std::string tag = "actor.mlp" + std::to_string(i);
    trunk_w_.push_back(add_block(tag + ".w", actor_.mlp[i], in));
    trunk_b_.push_back(add_block(tag + ".b", actor_.mlp[i], 1));
    in = actor_.mlp[i];
  }
  for (std::size_t l = 0; l < actor_.lstm.size(); ++l) {
    const int h = actor_.lstm[l];
    const std::string tag = "actor.lstm" + std::to_string(l);
    lstm_wx_.push_back(add_block(tag + ".wx", 4 * h, in));
    lstm_wh_.push_back(add_block(tag + ".wh", 4 * h, h));
    lstm_b_.push_back(add_block(tag + ".b", 4 * h, 1));
    in = h;
  }
  head_w_ = add_block("actor.head.w", actor_.output_dim, in);
  head_b_ = add_block("actor.head.b", actor_.output_dim, 1);
  log_std_ = add_block("actor.log_std", actor_.output_dim, 1);

  in = critic_.input_dim;
  for (std::size_t i = 0; i < critic_.mlp.size(); ++i) {
    const std::string tag = "critic.mlp" + std::to_string(i);
    critic_w_.push_back(add_block(tag + ".w", critic_.mlp[i], in));
    critic_b_.push_back(add_block(tag + ".b", critic_.mlp[i], 1));
    in = critic_.mlp[i];
  }
  critic_out_w_ = add_block("critic.out.w", 1, in);
  critic_out_b_ = add_block("critic.out.b", 1, 1);
}

Vector ActorCritic::init_params(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  Vector p = Vector::Zero(num_params_);
  const double trunk_gain = std::sqrt(2.0);
  for (int w : trunk_w_) {
    block(p, w) = orthogonal(blocks_[w].rows, blocks_[w].cols, trunk_gain, rng);
  }
  for (std::size_t l = 0; l < lstm_wx_.size(); ++l) {
    const int h = actor_.lstm[l];
    auto wx = block(p, lstm_wx_[l]);
    auto wh = block(p, lstm_wh_[l]);
    for (int gate = 0; gate < 4; ++gate) {
      wx.middleRows(gate * h, h) = orthogonal(h, static_cast<int>(wx.cols()), 1.0, rng);
      wh.middleRows(gate * h, h) = orthogonal(h, h, 1.0, rng);
    }
    // Forget-gate bias of one keeps early memories alive.
    block(p, lstm_b_[l]).middleRows(h, h).setOnes();
  }
  block(p, head_w_) = orthogonal(blocks_[head_w_].rows, blocks_[head_w_].cols,
                                 actor_.head_scale, rng);
  block(p, log_std_).setConstant(actor_.init_log_std);
  for (int w : critic_w_) {
    block(p, w) = orthogonal(blocks_[w].rows, blocks_[w].cols, trunk_gain, rng);
  }
  block(p, critic_out_w_) =
      orthogonal(1, blocks_[critic_out_w_].cols, 1.0, rng);
  return p;
}

HiddenState ActorCritic::zero_hidden(int batch) const {
  HiddenState s;
  for (int h : actor_.lstm) {
    s.h.push_back(Matrix::Zero(h, batch));
    s.c.push_back(Matrix::Zero(h, batch));
  }
  return s;
}

void ActorCritic::actor_forward(const Vector& params, const Matrix& x,
                                const Matrix* mask, int seq_len, int num_seq,
                                HiddenState& hidden, Matrix& mean,
                                Cache* cache) const {
  Matrix a = x;
  for (std::size_t i = 0; i < trunk_w_.size(); ++i) {
    Matrix pre = block(params, trunk_w_[i]) * a;
    pre.colwise() += block(params, trunk_b_[i]).col(0);
    Matrix out;
    activate(actor_.activation, pre, out);
    if (cache) cache->trunk_in.push_back(std::move(a));
    a = std::move(out);
    if (cache) cache->trunk_out.push_back(a);
  }

  const int n = seq_len * num_seq;
  for (std::size_t l = 0; l < lstm_wx_.size(); ++l) {
    const int h = actor_.lstm[l];
    Matrix gx = block(params, lstm_wx_[l]) * a;
    gx.colwise() += block(params, lstm_b_[l]).col(0);
    const auto wh = block(params, lstm_wh_[l]);

    Matrix out(h, n);
    Matrix gates(4 * h, n), cell(h, n), tanh_cell(h, n), hp(h, n), cp(h, n);
    Matrix h_prev = hidden.h[l];
    Matrix c_prev = hidden.c[l];
    for (int t = 0; t < seq_len; ++t) {
      const int col = t * num_seq;
      if (t > 0 && mask) {
        const auto m = mask->middleCols(col, num_seq).row(0).array();
        h_prev.array().rowwise() *= m;
        c_prev.array().rowwise() *= m;
      }
      Matrix g = gx.middleCols(col, num_seq) + wh * h_prev;
      g.topRows(2 * h) = g.topRows(2 * h).unaryExpr(&sigmoid);
      g.middleRows(2 * h, h) = g.middleRows(2 * h, h).array().tanh();
      g.bottomRows(h) = g.bottomRows(h).unaryExpr(&sigmoid);
      Matrix c = g.middleRows(h, h).cwiseProduct(c_prev) +
                 g.topRows(h).cwiseProduct(g.middleRows(2 * h, h));
      Matrix tc = c.array().tanh();
      Matrix hn = g.bottomRows(h).cwiseProduct(tc);
      if (cache) {
        gates.middleCols(col, num_seq) = g;
        cell.middleCols(col, num_seq) = c;
        tanh_cell.middleCols(col, num_seq) = tc;
        hp.middleCols(col, num_seq) = h_prev;
        cp.middleCols(col, num_seq) = c_prev;
      }
      out.middleCols(col, num_seq) = hn;
      h_prev = std::move(hn);
      c_prev = std::move(c);
    }
    hidden.h[l] = h_prev;
    hidden.c[l] = c_prev;
    if (cache) {
      cache->lstm_in.push_back(std::move(a));
      cache->gates.push_back(std::move(gates));
      cache->cell.push_back(std::move(cell));
      cache->tanh_cell.push_back(std::move(tanh_cell));
      cache->h_prev.push_back(std::move(hp));
      cache->c_prev.push_back(std::move(cp));
    }
    a = std::move(out);
  }

  Matrix pre = block(params, head_w_) * a;
  pre.colwise() += block(params, head_b_).col(0);
  mean = pre.array().tanh();
  if (cache) {
    cache->head_in = std::move(a);
    cache->mean = mean;
  }
}

Matrix ActorCritic::critic_forward(const Vector& params, const Matrix& x,
                                   std::vector<Matrix>* acts) const {
  Matrix a = x;
  for (std::size_t i = 0; i < critic_w_.size(); ++i) {
    Matrix pre = block(params, critic_w_[i]) * a;
    pre.colwise() += block(params, critic_b_[i]).col(0);
    Matrix out;
    activate(critic_.activation, pre, out);
    if (acts) acts->push_back(std::move(a));
    a = std::move(out);
  }
  Matrix v = block(params, critic_out_w_) * a;
  v.array() += block(params, critic_out_b_)(0, 0);
  if (acts) acts->push_back(std::move(a));
  return v;
}

Matrix ActorCritic::actor_step(const Vector& params, const Matrix& x,
                               HiddenState& hidden) const {
  Matrix mean;
  actor_forward(params, x, nullptr, 1, static_cast<int>(x.cols()), hidden, mean,
                nullptr);
  return mean;
}

Vector ActorCritic::log_std(const Vector& params) const {
  return block(params, log_std_).col(0);
}

Matrix ActorCritic::critic(const Vector& params, const Matrix& x) const {
  return critic_forward(params, x, nullptr);
}

PolicyOutputs ActorCritic::forward(const Vector& params,
                                   const SequenceBatch& batch) const {
  PolicyOutputs out;
  HiddenState hidden = batch.initial;
  actor_forward(params, batch.actor_in, &batch.mask, batch.seq_len,
                batch.num_seq, hidden, out.mean, nullptr);
  out.log_std = log_std(params);
  out.value = critic_forward(params, batch.critic_in, nullptr);
  return out;
}

LossAndGradient ActorCritic::gradient(const Vector& params, const LossFn& loss,
                                      const SequenceBatch& batch) const {
  const int n = batch.size();
  const int s = batch.num_seq;
  Cache cache;
  HiddenState hidden = batch.initial;
  LossAndGradient result;
  actor_forward(params, batch.actor_in, &batch.mask, batch.seq_len, s, hidden,
                result.outputs.mean, &cache);
  result.outputs.log_std = log_std(params);
  result.outputs.value =
      critic_forward(params, batch.critic_in, &cache.critic_acts);

  OutputGrads g;
  g.d_mean = Matrix::Zero(actor_.output_dim, n);
  g.d_log_std = Vector::Zero(actor_.output_dim);
  g.d_value = Matrix::Zero(1, n);
  result.grad = Vector::Zero(num_params_);
  result.loss = loss(params, result.outputs, g, result.grad);
  if (!std::isfinite(result.loss)) {
    throw NonFiniteLoss("loss is not finite");
  }
  Vector& grad = result.grad;

  // Head.
  Matrix d_pre = g.d_mean.array() * (1.0 - cache.mean.array().square());
  block(grad, head_w_) += d_pre * cache.head_in.transpose();
  block(grad, head_b_) += d_pre.rowwise().sum();
  block(grad, log_std_) += g.d_log_std;
  Matrix da = block(params, head_w_).transpose() * d_pre;

  // LSTM stack, truncated at the segment start.
  for (int l = static_cast<int>(lstm_wx_.size()) - 1; l >= 0; --l) {
    const int h = actor_.lstm[static_cast<std::size_t>(l)];
    const Matrix& gates = cache.gates[static_cast<std::size_t>(l)];
    const Matrix& cell_prev = cache.c_prev[static_cast<std::size_t>(l)];
    const Matrix& tanh_cell = cache.tanh_cell[static_cast<std::size_t>(l)];
    const auto wh = block(params, lstm_wh_[static_cast<std::size_t>(l)]);

    Matrix d_gates(4 * h, n);
    Matrix dh_carry = Matrix::Zero(h, s);
    Matrix dc_carry = Matrix::Zero(h, s);
    for (int t = batch.seq_len - 1; t >= 0; --t) {
      const int col = t * s;
      const auto gi = gates.middleCols(col, s).topRows(h).array();
      const auto gf = gates.middleCols(col, s).middleRows(h, h).array();
      const auto gg = gates.middleCols(col, s).middleRows(2 * h, h).array();
      const auto go = gates.middleCols(col, s).bottomRows(h).array();
      const auto tc = tanh_cell.middleCols(col, s).array();

      const Matrix dh = da.middleCols(col, s) + dh_carry;
      const Matrix dc = (dh.array() * go * (1.0 - tc.square())).matrix() + dc_carry;
      auto dg = d_gates.middleCols(col, s);
      dg.topRows(h) = (dc.array() * gg * gi * (1.0 - gi)).matrix();
      dg.middleRows(h, h) =
          (dc.array() * cell_prev.middleCols(col, s).array() * gf * (1.0 - gf))
              .matrix();
      dg.middleRows(2 * h, h) = (dc.array() * gi * (1.0 - gg.square())).matrix();
      dg.bottomRows(h) = (dh.array() * tc * go * (1.0 - go)).matrix();

      if (t > 0) {
        dh_carry = wh.transpose() * dg;
        dc_carry = dc.cwiseProduct(gf.matrix());
        const auto m = batch.mask.middleCols(col, s).row(0).array();
        dh_carry.array().rowwise() *= m;
        dc_carry.array().rowwise() *= m;
      }
    }
    const std::size_t li = static_cast<std::size_t>(l);
    block(grad, lstm_wx_[li]) += d_gates * cache.lstm_in[li].transpose();
    block(grad, lstm_wh_[li]) += d_gates * cache.h_prev[li].transpose();
    block(grad, lstm_b_[li]) += d_gates.rowwise().sum();
    da = block(params, lstm_wx_[li]).transpose() * d_gates;
  }

  for (int i = static_cast<int>(trunk_w_.size()) - 1; i >= 0; --i) {
    const std::size_t ii = static_cast<std::size_t>(i);
    activation_grad(actor_.activation, cache.trunk_out[ii], da);
    block(grad, trunk_w_[ii]) += da * cache.trunk_in[ii].transpose();
    block(grad, trunk_b_[ii]) += da.rowwise().sum();
    if (i > 0) da = block(params, trunk_w_[ii]).transpose() * da;
  }

  // Critic.
  const auto& acts = cache.critic_acts;
  block(grad, critic_out_w_) += g.d_value * acts.back().transpose();
  block(grad, critic_out_b_)(0, 0) += g.d_value.sum();
  Matrix dv = block(params, critic_out_w_).transpose() * g.d_value;
  for (int i = static_cast<int>(critic_w_.size()) - 1; i >= 0; --i) {
    const std::size_t ii = static_cast<std::size_t>(i);
    activation_grad(critic_.activation, acts[ii + 1], dv);
    block(grad, critic_w_[ii]) += dv * acts[ii].transpose();
    block(grad, critic_b_[ii]) += dv.rowwise().sum();
    if (i > 0) dv = block(params, critic_w_[ii]).transpose() * dv;
  }
  return result;
}

}  // namespace pfrl
