#ifndef PFRL_PPO_HPP_
#define PFRL_PPO_HPP_

#include <vector>

#include <nlohmann/json.hpp>

#include "pfrl/env.hpp"
#include "pfrl/networks.hpp"

namespace pfrl {

struct PPOConfig {
  double gamma = 0.998;
  double lambda = 0.95;
  double clip = 0.2;
  int epochs = 8;
  int minibatch = 2048;  // steps; a whole number of segments
  double learning_rate = 1e-3;
  double entropy_coef = 0.0;
  double critic_coef = 2.0;
  int segment_len = 32;
  double max_grad_norm = 1.0;  // <= 0 disables clipping
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  bool normalize_advantages = true;

  void validate() const;
};

void to_json(nlohmann::json& j, const PPOConfig& c);
void from_json(const nlohmann::json& j, PPOConfig& c);

// Time-major storage for `steps` steps of `num_envs` environments. Column
// t * num_envs + e is step t of environment e.
struct RolloutBuffer {
  int num_envs = 0;
  int steps = 0;
  int segment_len = 0;

  Matrix actor_in;
  Matrix critic_in;
  Matrix actions;        // raw Gaussian samples u
  Matrix mask;           // 1 x N; 0 on the first step of an episode
  Vector logp;
  Vector values;
  Vector rewards;
  std::vector<bool> dones;
  Vector bootstrap;      // value after the final step, per environment
  // Hidden state (num_envs columns) before step k * segment_len.
  std::vector<HiddenState> segment_start;

  Vector advantages;
  Vector returns;

  RolloutBuffer() = default;
  RolloutBuffer(int envs, int steps, int segment_len, int actor_dim,
                int critic_dim, int action_dim);

  int size() const { return num_envs * steps; }
  int col(int t, int e) const { return t * num_envs + e; }
  int segments_per_env() const { return steps / segment_len; }
};

// Per-environment GAE into buffer.advantages / buffer.returns.
void compute_advantages(RolloutBuffer& buffer, const PPOConfig& cfg);

struct SegmentRef {
  int env;
  int index;  // segment index within the environment's steps
};

struct Minibatch {
  SequenceBatch batch;
  Matrix actions;
  Vector old_logp;
  Vector advantages;
  Vector returns;
};

Minibatch gather_minibatch(const RolloutBuffer& buffer,
                           const std::vector<SegmentRef>& segments);

struct PPOLossStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_frac = 0.0;
  double approx_kl = 0.0;
};

// Clipped surrogate + critic_coef * squared error - entropy_coef * entropy,
// each averaged over the minibatch. `stats` may be null.
LossFn make_ppo_loss(const Minibatch& mb, const PPOConfig& cfg,
                     PPOLossStats* stats);

struct AdamState {
  Vector m;
  Vector v;
  long t = 0;

  static AdamState Zero(int n) { return {Vector::Zero(n), Vector::Zero(n), 0}; }
};

void adam_step(Vector& params, const Vector& grad, AdamState& state,
               const PPOConfig& cfg);

struct PPOStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_frac = 0.0;
  double approx_kl = 0.0;
  double grad_norm = 0.0;
  int minibatches = 0;
};

// Full update. On NonFiniteLoss, params and adam are restored before the
// exception propagates.
PPOStats ppo_update(const ActorCritic& net, Vector& params, AdamState& adam,
                    RolloutBuffer& buffer, const PPOConfig& cfg, Rng& rng);

}  // namespace pfrl

#endif  // PFRL_PPO_HPP_
