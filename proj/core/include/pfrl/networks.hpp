#ifndef PFRL_NETWORKS_HPP_
#define PFRL_NETWORKS_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace pfrl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { kElu, kTanh };

struct ActorArch {
  int input_dim = 24;
  std::vector<int> mlp = {64, 64, 64};
  std::vector<int> lstm = {64, 64};  // empty: feed-forward actor
  int output_dim = 6;
  Activation activation = Activation::kElu;
  double init_log_std = -0.5108256237659907;  // log 0.6
  double head_scale = 0.01;

  bool recurrent() const { return !lstm.empty(); }
  bool operator==(const ActorArch&) const = default;
};

struct CriticArch {
  int input_dim = 72;
  std::vector<int> mlp = {64, 64, 64};
  Activation activation = Activation::kElu;

  bool operator==(const CriticArch&) const = default;
};

void to_json(nlohmann::json& j, const ActorArch& a);
void from_json(const nlohmann::json& j, ActorArch& a);
void to_json(nlohmann::json& j, const CriticArch& a);
void from_json(const nlohmann::json& j, CriticArch& a);

// Recurrent memories, one (h, c) pair of (width x batch) matrices per LSTM
// layer. Column b belongs to environment / sequence b.
struct HiddenState {
  std::vector<Matrix> h;
  std::vector<Matrix> c;

  bool empty() const { return h.empty(); }
  int batch() const { return h.empty() ? 0 : static_cast<int>(h[0].cols()); }
  void reset_column(int b);
  HiddenState column(int b) const;
  void set_column(int b, const HiddenState& single);
};

// Time-major batch of S sequences of length L. Column t * S + s holds step t
// of sequence s. mask(0, t * S + s) == 0 resets the hidden state before the
// step (episode start); it is ignored at t = 0 where `initial` applies.
struct SequenceBatch {
  int seq_len = 1;
  int num_seq = 1;
  Matrix actor_in;
  Matrix critic_in;
  Matrix mask;
  HiddenState initial;

  int size() const { return seq_len * num_seq; }
};

struct PolicyOutputs {
  Matrix mean;    // output_dim x N, squashed into [-1, 1]
  Vector log_std; // output_dim
  Matrix value;   // 1 x N
};

struct OutputGrads {
  Matrix d_mean;
  Vector d_log_std;
  Matrix d_value;
};

// Loss on network outputs. Fills the derivative with respect to every output
// and may add direct parameter terms into `d_params` (pre-sized, zeroed).
using LossFn = std::function<double(const Vector& params,
                                    const PolicyOutputs& out, OutputGrads& g,
                                    Vector& d_params)>;

struct LossAndGradient {
  double loss = 0.0;
  Vector grad;
  PolicyOutputs outputs;
};

struct ParamBlock {
  std::string name;
  int rows;
  int cols;
  int offset;
};

// Asymmetric actor-critic with a fixed architecture family: MLP trunk, LSTM
// stack, Gaussian head with state-independent log-std for the actor; MLP to a
// scalar for the critic. Holds only the architecture; parameters live in a
// flat vector owned by the caller so snapshots are plain values.
class ActorCritic {
 public:
  ActorCritic(ActorArch actor, CriticArch critic);

  const ActorArch& actor_arch() const { return actor_; }
  const CriticArch& critic_arch() const { return critic_; }
  int num_params() const { return num_params_; }
  const std::vector<ParamBlock>& layout() const { return blocks_; }

  // Orthogonal trunk weights, zero biases, head scaled by head_scale.
  Vector init_params(std::uint64_t seed) const;

  HiddenState zero_hidden(int batch) const;

  // One step for a batch of environments; advances `hidden` in place.
  Matrix actor_step(const Vector& params, const Matrix& x,
                    HiddenState& hidden) const;
  Vector log_std(const Vector& params) const;
  Matrix critic(const Vector& params, const Matrix& x) const;

  PolicyOutputs forward(const Vector& params, const SequenceBatch& batch) const;

  // Exact reverse-mode gradient of `loss` through both networks, including
  // recurrent paths across time (hidden state at t = 0 is a constant).
  // Throws NonFiniteLoss when the loss is not finite.
  LossAndGradient gradient(const Vector& params, const LossFn& loss,
                           const SequenceBatch& batch) const;

 private:
  struct Cache;
  int add_block(const std::string& name, int rows, int cols);
  Eigen::Map<const Matrix> block(const Vector& p, int index) const;
  Eigen::Map<Matrix> block(Vector& p, int index) const;

  void actor_forward(const Vector& params, const Matrix& x, const Matrix* mask,
                     int seq_len, int num_seq, HiddenState& hidden,
                     Matrix& mean, Cache* cache) const;
  Matrix critic_forward(const Vector& params, const Matrix& x,
                        std::vector<Matrix>* acts) const;

  ActorArch actor_;
  CriticArch critic_;
  std::vector<ParamBlock> blocks_;
  int num_params_ = 0;

  // Block indices.
  std::vector<int> trunk_w_, trunk_b_;
  std::vector<int> lstm_wx_, lstm_wh_, lstm_b_;
  int head_w_ = -1, head_b_ = -1, log_std_ = -1;
  std::vector<int> critic_w_, critic_b_;
  int critic_out_w_ = -1, critic_out_b_ = -1;
};

}  // namespace pfrl

#endif  // PFRL_NETWORKS_HPP_
