#include "pfrl/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <memory>
#include <numeric>

#include "pfrl/errors.hpp"
#include "pfrl/gae.hpp"

namespace pfrl {

void PPOConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0) || !(lambda > 0.0 && lambda <= 1.0)) {
    throw ConfigError("ppo: gamma and lambda must lie in (0, 1]");
  }
  if (!(clip > 0.0)) throw ConfigError("ppo: clip must be > 0");
  if (epochs < 1) throw ConfigError("ppo: epochs must be >= 1");
  if (segment_len < 1) throw ConfigError("ppo: segment_len must be >= 1");
  if (minibatch < segment_len || minibatch % segment_len != 0) {
    throw ConfigError("ppo: minibatch must be a multiple of segment_len");
  }
  if (!(learning_rate > 0.0)) throw ConfigError("ppo: learning_rate must be > 0");
  if (entropy_coef < 0.0 || critic_coef < 0.0) {
    throw ConfigError("ppo: loss coefficients must be >= 0");
  }
}

void to_json(nlohmann::json& j, const PPOConfig& c) {
  j = {{"gamma", c.gamma},
       {"lambda", c.lambda},
       {"clip", c.clip},
       {"epochs", c.epochs},
       {"minibatch", c.minibatch},
       {"learning_rate", c.learning_rate},
       {"entropy_coef", c.entropy_coef},
       {"critic_coef", c.critic_coef},
       {"segment_len", c.segment_len},
       {"max_grad_norm", c.max_grad_norm},
       {"adam_beta1", c.adam_beta1},
       {"adam_beta2", c.adam_beta2},
       {"adam_eps", c.adam_eps},
       {"normalize_advantages", c.normalize_advantages}};
}

void from_json(const nlohmann::json& j, PPOConfig& c) {
  const PPOConfig d;
  c.gamma = j.value("gamma", d.gamma);
  c.lambda = j.value("lambda", d.lambda);
  c.clip = j.value("clip", d.clip);
  c.epochs = j.value("epochs", d.epochs);
  c.minibatch = j.value("minibatch", d.minibatch);
  c.learning_rate = j.value("learning_rate", d.learning_rate);
  c.entropy_coef = j.value("entropy_coef", d.entropy_coef);
  c.critic_coef = j.value("critic_coef", d.critic_coef);
  c.segment_len = j.value("segment_len", d.segment_len);
  c.max_grad_norm = j.value("max_grad_norm", d.max_grad_norm);
  c.adam_beta1 = j.value("adam_beta1", d.adam_beta1);
  c.adam_beta2 = j.value("adam_beta2", d.adam_beta2);
  c.adam_eps = j.value("adam_eps", d.adam_eps);
  c.normalize_advantages =
      j.value("normalize_advantages", d.normalize_advantages);
}

RolloutBuffer::RolloutBuffer(int envs, int steps_, int segment_len_,
                             int actor_dim, int critic_dim, int action_dim)
    : num_envs(envs), steps(steps_), segment_len(segment_len_) {
  if (envs < 1 || steps_ < 1 || segment_len_ < 1 || steps_ % segment_len_) {
    throw InvalidArgument("rollout steps must be a multiple of segment_len");
  }
  const int n = envs * steps_;
  actor_in.resize(actor_dim, n);
  critic_in.resize(critic_dim, n);
  actions.resize(action_dim, n);
  mask = Matrix::Ones(1, n);
  logp.resize(n);
  values.resize(n);
  rewards.resize(n);
  dones.assign(static_cast<std::size_t>(n), false);
  bootstrap = Vector::Zero(envs);
  advantages = Vector::Zero(n);
  returns = Vector::Zero(n);
  segment_start.resize(static_cast<std::size_t>(steps_ / segment_len_));
}

void compute_advantages(RolloutBuffer& buffer, const PPOConfig& cfg) {
  const int n = buffer.size();
  buffer.advantages.resize(n);
  buffer.returns.resize(n);
  std::vector<double> r(static_cast<std::size_t>(buffer.steps));
  std::vector<double> v(r.size());
  std::unique_ptr<bool[]> d(new bool[r.size()]);
  for (int e = 0; e < buffer.num_envs; ++e) {
    for (int t = 0; t < buffer.steps; ++t) {
      const int c = buffer.col(t, e);
      r[static_cast<std::size_t>(t)] = buffer.rewards[c];
      v[static_cast<std::size_t>(t)] = buffer.values[c];
      d[static_cast<std::size_t>(t)] = buffer.dones[static_cast<std::size_t>(c)];
    }
    const GaeResult g =
        compute_gae(r, v, std::span<const bool>(d.get(), r.size()),
                    buffer.bootstrap[e], cfg.gamma, cfg.lambda);
    for (int t = 0; t < buffer.steps; ++t) {
      const int c = buffer.col(t, e);
      buffer.advantages[c] = g.advantages[static_cast<std::size_t>(t)];
      buffer.returns[c] = g.returns[static_cast<std::size_t>(t)];
    }
  }
}

Minibatch gather_minibatch(const RolloutBuffer& buffer,
                           const std::vector<SegmentRef>& segments) {
  const int s = static_cast<int>(segments.size());
  const int len = buffer.segment_len;
  const int n = s * len;
  Minibatch mb;
  SequenceBatch& b = mb.batch;
  b.seq_len = len;
  b.num_seq = s;
  b.actor_in.resize(buffer.actor_in.rows(), n);
  b.critic_in.resize(buffer.critic_in.rows(), n);
  b.mask.resize(1, n);
  mb.actions.resize(buffer.actions.rows(), n);
  mb.old_logp.resize(n);
  mb.advantages.resize(n);
  mb.returns.resize(n);

  const HiddenState& proto = buffer.segment_start.front();
  for (std::size_t l = 0; l < proto.h.size(); ++l) {
    b.initial.h.emplace_back(proto.h[l].rows(), s);
    b.initial.c.emplace_back(proto.c[l].rows(), s);
  }
  for (int i = 0; i < s; ++i) {
    const SegmentRef& ref = segments[static_cast<std::size_t>(i)];
    const HiddenState& start =
        buffer.segment_start[static_cast<std::size_t>(ref.index)];
    for (std::size_t l = 0; l < start.h.size(); ++l) {
      b.initial.h[l].col(i) = start.h[l].col(ref.env);
      b.initial.c[l].col(i) = start.c[l].col(ref.env);
    }
    for (int t = 0; t < len; ++t) {
      const int src = buffer.col(ref.index * len + t, ref.env);
      const int dst = t * s + i;
      b.actor_in.col(dst) = buffer.actor_in.col(src);
      b.critic_in.col(dst) = buffer.critic_in.col(src);
      b.mask(0, dst) = buffer.mask(0, src);
      mb.actions.col(dst) = buffer.actions.col(src);
      mb.old_logp[dst] = buffer.logp[src];
      mb.advantages[dst] = buffer.advantages[src];
      mb.returns[dst] = buffer.returns[src];
    }
  }
  return mb;
}

LossFn make_ppo_loss(const Minibatch& mb, const PPOConfig& cfg,
                     PPOLossStats* stats) {
  return [&mb, cfg, stats](const Vector&, const PolicyOutputs& out,
                           OutputGrads& g, Vector&) {
    const Eigen::Index n = out.mean.cols();
    const Eigen::Index dim = out.mean.rows();
    const double inv_n = 1.0 / static_cast<double>(n);
    const Vector inv_var = (-2.0 * out.log_std).array().exp();
    const double log_norm =
        out.log_std.sum() + 0.5 * dim * std::log(2.0 * std::numbers::pi);

    double policy = 0.0, value = 0.0, kl = 0.0;
    long clipped = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vector diff = mb.actions.col(i) - out.mean.col(i);
      const double logp =
          -0.5 * diff.cwiseProduct(diff).dot(inv_var) - log_norm;
      const double log_ratio = logp - mb.old_logp[i];
      const double ratio = std::exp(log_ratio);
      const double adv = mb.advantages[i];
      const double clipped_ratio =
          std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip);
      const double unclipped_obj = ratio * adv;
      const double clipped_obj = clipped_ratio * adv;
      if (clipped_ratio != ratio) ++clipped;
      kl += (ratio - 1.0) - log_ratio;

      double d_logp = 0.0;
      if (unclipped_obj <= clipped_obj) {
        policy -= unclipped_obj;
        d_logp = -adv * ratio * inv_n;
      } else {
        policy -= clipped_obj;
      }
      if (d_logp != 0.0) {
        // d logp / d mean = diff / var; d logp / d log_std = diff^2 / var - 1.
        g.d_mean.col(i) += d_logp * diff.cwiseProduct(inv_var);
        g.d_log_std.array() +=
            d_logp * (diff.array().square() * inv_var.array() - 1.0);
      }

      const double err = out.value(0, i) - mb.returns[i];
      value += err * err;
      g.d_value(0, i) += cfg.critic_coef * 2.0 * err * inv_n;
    }
    policy *= inv_n;
    value *= inv_n;
    const double entropy =
        out.log_std.sum() + 0.5 * dim * (1.0 + std::log(2.0 * std::numbers::pi));
    if (cfg.entropy_coef != 0.0) g.d_log_std.array() -= cfg.entropy_coef;

    if (stats) {
      stats->policy_loss = policy;
      stats->value_loss = value;
      stats->entropy = entropy;
      stats->clip_frac = static_cast<double>(clipped) * inv_n;
      stats->approx_kl = kl * inv_n;
    }
    return policy + cfg.critic_coef * value - cfg.entropy_coef * entropy;
  };
}

void adam_step(Vector& params, const Vector& grad, AdamState& s,
               const PPOConfig& cfg) {
  ++s.t;
  s.m = cfg.adam_beta1 * s.m + (1.0 - cfg.adam_beta1) * grad;
  s.v = cfg.adam_beta2 * s.v + (1.0 - cfg.adam_beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(s.t));
  const double c2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(s.t));
  params.array() -= cfg.learning_rate * (s.m.array() / c1) /
                    ((s.v.array() / c2).sqrt() + cfg.adam_eps);
}

PPOStats ppo_update(const ActorCritic& net, Vector& params, AdamState& adam,
                    RolloutBuffer& buffer, const PPOConfig& cfg, Rng& rng) {
  cfg.validate();
  if (buffer.segment_len != cfg.segment_len) {
    throw InvalidArgument("ppo_update: buffer segment length differs");
  }
  if (cfg.minibatch > buffer.size()) {
    throw ConfigError("ppo: minibatch larger than the rollout");
  }
  compute_advantages(buffer, cfg);
  if (cfg.normalize_advantages) {
    const double mean = buffer.advantages.mean();
    const double var =
        (buffer.advantages.array() - mean).square().mean();
    buffer.advantages =
        (buffer.advantages.array() - mean) / (std::sqrt(var) + 1e-8);
  }

  std::vector<SegmentRef> all;
  for (int e = 0; e < buffer.num_envs; ++e) {
    for (int k = 0; k < buffer.segments_per_env(); ++k) all.push_back({e, k});
  }
  const std::size_t per_mb =
      static_cast<std::size_t>(cfg.minibatch / cfg.segment_len);

  const Vector saved_params = params;
  const AdamState saved_adam = adam;
  PPOStats total;
  try {
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      std::shuffle(all.begin(), all.end(), rng);
      for (std::size_t start = 0; start + per_mb <= all.size();
           start += per_mb) {
        const std::vector<SegmentRef> chosen(all.begin() + start,
                                             all.begin() + start + per_mb);
        const Minibatch mb = gather_minibatch(buffer, chosen);
        PPOLossStats ls;
        LossAndGradient lg =
            net.gradient(params, make_ppo_loss(mb, cfg, &ls), mb.batch);
        const double norm = lg.grad.norm();
        if (!std::isfinite(norm)) throw NonFiniteLoss("gradient is not finite");
        if (cfg.max_grad_norm > 0.0 && norm > cfg.max_grad_norm) {
          lg.grad *= cfg.max_grad_norm / norm;
        }
        adam_step(params, lg.grad, adam, cfg);

        total.policy_loss += ls.policy_loss;
        total.value_loss += ls.value_loss;
        total.entropy += ls.entropy;
        total.clip_frac += ls.clip_frac;
        total.approx_kl += ls.approx_kl;
        total.grad_norm += norm;
        ++total.minibatches;
      }
    }
  } catch (const NonFiniteLoss&) {
    params = saved_params;
    adam = saved_adam;
    throw;
  }
  if (total.minibatches > 0) {
    const double k = 1.0 / total.minibatches;
    total.policy_loss *= k;
    total.value_loss *= k;
    total.entropy *= k;
    total.clip_frac *= k;
    total.approx_kl *= k;
    total.grad_norm *= k;
  }
  return total;
}

}  // namespace pfrl
