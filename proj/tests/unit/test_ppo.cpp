#include <gtest/gtest.h>

#include <random>

#include "pfrl/errors.hpp"
#include "pfrl/ppo.hpp"

namespace pfrl {
namespace {

struct Fixture {
  ActorCritic net;
  Vector params;
  RolloutBuffer buffer;
};

// Linear actor and critic (no hidden layers) keep every quantity checkable.
Fixture tiny(bool recurrent, std::uint64_t seed) {
  ActorArch a;
  a.input_dim = 3;
  a.mlp = {};
  a.lstm = recurrent ? std::vector<int>{2} : std::vector<int>{};
  a.output_dim = 2;
  a.head_scale = 1.0;
  CriticArch c;
  c.input_dim = 4;
  c.mlp = {};
  Fixture f{ActorCritic(a, c), {}, RolloutBuffer(2, 8, 4, 3, 4, 2)};
  f.params = f.net.init_params(seed);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  RolloutBuffer& b = f.buffer;
  for (int i = 0; i < b.actor_in.size(); ++i) b.actor_in.data()[i] = n(rng);
  for (int i = 0; i < b.critic_in.size(); ++i) b.critic_in.data()[i] = n(rng);
  for (int i = 0; i < b.actions.size(); ++i) b.actions.data()[i] = 0.5 * n(rng);
  for (int i = 0; i < b.size(); ++i) {
    b.rewards[i] = n(rng);
    b.values[i] = n(rng);
    b.logp[i] = -1.5 + 0.1 * n(rng);
  }
  b.dones[static_cast<std::size_t>(b.col(5, 0))] = true;
  b.mask(0, b.col(6, 0)) = 0.0;
  for (auto& h : b.segment_start) h = f.net.zero_hidden(2);
  return f;
}

Minibatch whole(const RolloutBuffer& b) {
  std::vector<SegmentRef> refs;
  for (int e = 0; e < b.num_envs; ++e) {
    for (int k = 0; k < b.segments_per_env(); ++k) refs.push_back({e, k});
  }
  return gather_minibatch(b, refs);
}

void set_current_logp(const ActorCritic& net, const Vector& p, Minibatch& mb) {
  const PolicyOutputs out = net.forward(p, mb.batch);
  for (int i = 0; i < mb.old_logp.size(); ++i) {
    const Vector z = (mb.actions.col(i) - out.mean.col(i)).array() /
                     out.log_std.array().exp();
    mb.old_logp[i] = -0.5 * z.squaredNorm() - out.log_std.sum() -
                     0.5 * z.size() * std::log(2.0 * M_PI);
  }
}

TEST(Ppo, GatherPreservesTimeMajorOrder) {
  Fixture f = tiny(false, 1);
  const Minibatch mb = gather_minibatch(f.buffer, {{1, 1}, {0, 0}});
  ASSERT_EQ(mb.batch.num_seq, 2);
  for (int t = 0; t < 4; ++t) {
    EXPECT_EQ(mb.batch.actor_in.col(t * 2 + 0), f.buffer.actor_in.col(f.buffer.col(4 + t, 1)));
    EXPECT_EQ(mb.batch.actor_in.col(t * 2 + 1), f.buffer.actor_in.col(f.buffer.col(t, 0)));
  }
}

TEST(Ppo, AdvantagesArePerEnvironmentGae) {
  Fixture f = tiny(false, 2);
  PPOConfig cfg;
  cfg.gamma = 0.9;
  cfg.lambda = 0.8;
  f.buffer.bootstrap << 0.3, -0.7;
  compute_advantages(f.buffer, cfg);
  const RolloutBuffer& b = f.buffer;
  for (int e = 0; e < 2; ++e) {
    double carry = 0.0;
    for (int t = 7; t >= 0; --t) {
      const int c = b.col(t, e);
      const bool done = b.dones[static_cast<std::size_t>(c)];
      const double next = t == 7 ? b.bootstrap[e] : b.values[b.col(t + 1, e)];
      const double delta = b.rewards[c] + (done ? 0.0 : cfg.gamma * next) - b.values[c];
      carry = delta + (done ? 0.0 : cfg.gamma * cfg.lambda * carry);
      EXPECT_NEAR(b.advantages[c], carry, 1e-14);
      EXPECT_NEAR(b.returns[c], carry + b.values[c], 1e-14);
    }
  }
}

TEST(Ppo, ZeroAdvantagesGiveZeroPolicyGradient) {
  Fixture f = tiny(true, 3);
  f.buffer.advantages = Vector::Zero(f.buffer.size());
  f.buffer.returns = Vector::Zero(f.buffer.size());
  PPOConfig cfg;
  cfg.critic_coef = 0.0;
  const Minibatch mb = whole(f.buffer);
  const LossAndGradient lg =
      f.net.gradient(f.params, make_ppo_loss(mb, cfg, nullptr), mb.batch);
  EXPECT_EQ(lg.grad.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Ppo, UnitRatioSurrogateIsNegativeMeanAdvantage) {
  Fixture f = tiny(true, 4);
  f.buffer.advantages = Vector::LinSpaced(f.buffer.size(), -1.0, 2.0);
  f.buffer.returns = Vector::Zero(f.buffer.size());
  Minibatch mb = whole(f.buffer);
  set_current_logp(f.net, f.params, mb);
  PPOLossStats stats;
  const PPOConfig cfg;
  f.net.gradient(f.params, make_ppo_loss(mb, cfg, &stats), mb.batch);
  EXPECT_NEAR(stats.policy_loss, -mb.advantages.mean(), 1e-12);
  EXPECT_EQ(stats.clip_frac, 0.0);
  EXPECT_NEAR(stats.approx_kl, 0.0, 1e-12);
}

TEST(Ppo, ClippedSamplesCarryNoGradient) {
  Fixture f = tiny(false, 5);
  f.buffer.advantages = Vector::Ones(f.buffer.size());
  f.buffer.returns = Vector::Zero(f.buffer.size());
  Minibatch mb = whole(f.buffer);
  set_current_logp(f.net, f.params, mb);
  mb.old_logp.array() -= 1.0;  // ratio e > 1 + clip with positive advantage
  PPOConfig cfg;
  cfg.critic_coef = 0.0;
  PPOLossStats stats;
  const LossAndGradient lg =
      f.net.gradient(f.params, make_ppo_loss(mb, cfg, &stats), mb.batch);
  EXPECT_EQ(lg.grad.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(stats.clip_frac, 1.0);
  EXPECT_NEAR(stats.policy_loss, -1.2, 1e-12);

  // With negative advantage the pessimistic branch is the unclipped one.
  mb.advantages = -mb.advantages;
  const LossAndGradient neg =
      f.net.gradient(f.params, make_ppo_loss(mb, cfg, &stats), mb.batch);
  EXPECT_GT(neg.grad.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_NEAR(stats.policy_loss, std::exp(1.0), 1e-12);
}

TEST(Ppo, SingleUpdateMatchesHandSteppedAdam) {
  Fixture f = tiny(true, 6);
  PPOConfig cfg;
  cfg.epochs = 3;
  cfg.segment_len = 4;
  cfg.minibatch = 16;  // the whole rollout in one minibatch
  cfg.normalize_advantages = false;
  cfg.max_grad_norm = 0.0;
  cfg.learning_rate = 1e-2;

  RolloutBuffer expected_buf = f.buffer;
  compute_advantages(expected_buf, cfg);
  Vector p = f.params;
  Vector m = Vector::Zero(p.size()), v = Vector::Zero(p.size());
  for (int t = 1; t <= cfg.epochs; ++t) {
    const Minibatch mb = whole(expected_buf);
    const Vector g =
        f.net.gradient(p, make_ppo_loss(mb, cfg, nullptr), mb.batch).grad;
    for (int i = 0; i < p.size(); ++i) {
      m[i] = 0.9 * m[i] + 0.1 * g[i];
      v[i] = 0.999 * v[i] + 0.001 * g[i] * g[i];
      const double mh = m[i] / (1.0 - std::pow(0.9, t));
      const double vh = v[i] / (1.0 - std::pow(0.999, t));
      p[i] -= 1e-2 * mh / (std::sqrt(vh) + 1e-8);
    }
  }
  // Segment order does not change a full-batch gradient beyond rounding.
  Vector params = f.params;
  AdamState adam = AdamState::Zero(static_cast<int>(params.size()));
  Rng rng(1);
  const PPOStats stats = ppo_update(f.net, params, adam, f.buffer, cfg, rng);
  EXPECT_EQ(stats.minibatches, 3);
  EXPECT_EQ(adam.t, 3);
  EXPECT_LT((params - p).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Ppo, GradientClippingBoundsTheStepInput) {
  Fixture f = tiny(false, 7);
  PPOConfig cfg;
  cfg.epochs = 1;
  cfg.segment_len = 4;
  cfg.minibatch = 16;
  cfg.max_grad_norm = 1e-3;
  cfg.adam_beta1 = 0.0;
  cfg.adam_beta2 = 0.0;
  cfg.adam_eps = 0.0;
  // With both betas zero Adam moves every coordinate by exactly lr * sign(g).
  Vector params = f.params;
  AdamState adam = AdamState::Zero(static_cast<int>(params.size()));
  Rng rng(2);
  const PPOStats stats = ppo_update(f.net, params, adam, f.buffer, cfg, rng);
  EXPECT_GT(stats.grad_norm, cfg.max_grad_norm);
  EXPECT_NEAR(adam.m.norm(), cfg.max_grad_norm, 1e-12);
}

TEST(Ppo, NonFiniteLossRestoresState) {
  Fixture f = tiny(true, 8);
  PPOConfig cfg;
  cfg.epochs = 2;
  cfg.segment_len = 4;
  cfg.minibatch = 8;
  f.buffer.actor_in(0, f.buffer.col(7, 1)) = std::numeric_limits<double>::quiet_NaN();
  Vector params = f.params;
  AdamState adam = AdamState::Zero(static_cast<int>(params.size()));
  adam.t = 5;
  Rng rng(3);
  EXPECT_THROW(ppo_update(f.net, params, adam, f.buffer, cfg, rng), NonFiniteLoss);
  EXPECT_EQ(params, f.params);
  EXPECT_EQ(adam.t, 5);
  EXPECT_EQ(adam.m.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Ppo, ConfigValidation) {
  PPOConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.minibatch = 100;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.gamma = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace pfrl
