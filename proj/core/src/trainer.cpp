#include "pfrl/trainer.hpp"

#include <memory>
#include <ostream>

#include "pfrl/errors.hpp"
#include "pfrl/util.hpp"

namespace pfrl {
namespace {

Checkpoint make_checkpoint(const RunConfig& cfg, Variant variant,
                           const ActorArch& actor, const Vector& params,
                           std::uint64_t seed, long env_steps,
                           const CurriculumState& cur) {
  Checkpoint ck;
  ck.variant = variant;
  ck.actor = actor;
  ck.critic = cfg.critic;
  ck.translation_scale = cfg.translation_scale;
  ck.limits = cfg.limits;
  ck.params = params;
  ck.extra = {{"seed", seed},
              {"env_steps", env_steps},
              {"noise_mm", cur.n},
              {"config_hash", config_hash(cfg)}};
  return ck;
}

}  // namespace

std::string train_log_header() {
  return "iteration,env_steps,noise_mm,beta,success_rate,episodes,"
         "policy_loss,value_loss,clip_frac,kl";
}

void write_train_log_row(std::ostream& os, const TrainLogRow& r) {
  os << r.iteration << ',' << r.env_steps << ',' << format_double(r.noise_mm)
     << ',' << format_double(r.beta) << ',' << format_double(r.success_rate)
     << ',' << r.episodes << ',' << format_double(r.policy_loss) << ','
     << format_double(r.value_loss) << ',' << format_double(r.clip_frac) << ','
     << format_double(r.kl) << '\n';
}

TrainResult train(const RunConfig& cfg, std::uint64_t seed,
                  const TrainHooks& hooks) {
  cfg.validate();
  const Variant variant = cfg.train.variant;
  TrainResult result;
  result.checkpoint.variant = variant;
  if (!variant_learns(variant)) return result;

  const ActorArch actor = cfg.actor_for(variant);
  const ActorCritic net(actor, cfg.critic);
  Vector params = net.init_params(derive_seed(seed, 1));
  AdamState adam = AdamState::Zero(net.num_params());
  Rng sample_rng(derive_seed(seed, 2));
  Rng shuffle_rng(derive_seed(seed, 3));

  const bool adaptive = variant_uses_curriculum(variant);
  CurriculumState cur = adaptive
                            ? CurriculumState::Start(cfg.curriculum)
                            : CurriculumState::Fixed(cfg.curriculum);

  const int num_envs = cfg.train.num_envs;
  const int steps = cfg.train.rollout_steps;
  const int dim = actor.output_dim;
  auto scene = std::make_shared<const Scene>(cfg.scene, cfg.sample_count);

  std::vector<InsertionEnv> envs;
  std::vector<Observation> obs;
  std::vector<std::uint64_t> episode(static_cast<std::size_t>(num_envs), 0);
  std::vector<bool> first(static_cast<std::size_t>(num_envs), true);
  envs.reserve(static_cast<std::size_t>(num_envs));
  NoiseLevel level = NoiseLevel::FromPlugLevel(cur.n, cfg.env);
  for (int e = 0; e < num_envs; ++e) {
    envs.emplace_back(scene, cfg.env);
    obs.push_back(envs.back().reset(level, derive_seed(seed, 10, e, 0)));
  }
  HiddenState hidden = net.zero_hidden(num_envs);

  Matrix actor_x(kActorInputSize, num_envs);
  Matrix critic_x(kCriticInputSize, num_envs);
  const auto encode_all = [&] {
    for (int e = 0; e < num_envs; ++e) {
      actor_x.col(e) = encode_actor_obs(obs[static_cast<std::size_t>(e)],
                                        cfg.translation_scale);
      critic_x.col(e) = encode_critic_obs(obs[static_cast<std::size_t>(e)],
                                          cfg.translation_scale);
    }
  };

  const long per_iteration = static_cast<long>(num_envs) * steps;
  const int iterations = static_cast<int>(cfg.train.total_steps / per_iteration);
  Vector good_params = params;

  for (int it = 0; it < iterations; ++it) {
    RolloutBuffer buf(num_envs, steps, cfg.ppo.segment_len, kActorInputSize,
                      kCriticInputSize, dim);
    int finished = 0, successes = 0;
    for (int t = 0; t < steps; ++t) {
      if (t % cfg.ppo.segment_len == 0) {
        buf.segment_start[static_cast<std::size_t>(t / cfg.ppo.segment_len)] =
            hidden;
      }
      encode_all();
      const Matrix mean = net.actor_step(params, actor_x, hidden);
      const Vector log_std = net.log_std(params);
      const Matrix values = net.critic(params, critic_x);

      for (int e = 0; e < num_envs; ++e) {
        const auto ei = static_cast<std::size_t>(e);
        const int c = buf.col(t, e);
        const GaussianSample s =
            sample_and_logprob(mean.col(e), log_std, sample_rng);
        const PFBreakdown pf =
            pf_action_breakdown(*scene, obs[ei].plug, obs[ei].socket, cfg.pf);
        const ComposedAction act = compose_action(
            variant, pf, s.u, cur.beta, cfg.pf, cfg.limits, cfg.env);
        const StepResult r = envs[ei].step(act.total, level);

        buf.actor_in.col(c) = actor_x.col(e);
        buf.critic_in.col(c) = critic_x.col(e);
        buf.actions.col(c) = s.u;
        buf.mask(0, c) = first[ei] ? 0.0 : 1.0;
        buf.logp[c] = s.logp;
        buf.values[c] = values(0, e);
        buf.rewards[c] = r.reward;
        buf.dones[static_cast<std::size_t>(c)] = r.done;
        first[ei] = false;
        obs[ei] = r.obs;

        if (r.done) {
          ++finished;
          successes += r.success ? 1 : 0;
          if (adaptive &&
              record_outcome(cur, r.success, cfg.curriculum)) {
            level = NoiseLevel::FromPlugLevel(cur.n, cfg.env);
          }
          ++episode[ei];
          obs[ei] = envs[ei].reset(
              level, derive_seed(seed, 10, static_cast<std::uint64_t>(e),
                                 episode[ei]));
          hidden.reset_column(e);
          first[ei] = true;
        }
      }
    }
    encode_all();
    buf.bootstrap = net.critic(params, critic_x).row(0).transpose();
    result.env_steps += per_iteration;

    PPOStats stats;
    try {
      stats = ppo_update(net, params, adam, buf, cfg.ppo, shuffle_rng);
    } catch (const NonFiniteLoss&) {
      if (hooks.on_checkpoint) {
        hooks.on_checkpoint(make_checkpoint(cfg, variant, actor, good_params,
                                            seed, result.env_steps, cur),
                            it);
      }
      throw;
    }
    good_params = params;

    TrainLogRow row;
    row.iteration = it;
    row.env_steps = result.env_steps;
    row.noise_mm = cur.n;
    row.beta = cur.beta;
    row.episodes = finished;
    row.success_rate =
        finished > 0 ? static_cast<double>(successes) / finished : 0.0;
    row.policy_loss = stats.policy_loss;
    row.value_loss = stats.value_loss;
    row.clip_frac = stats.clip_frac;
    row.kl = stats.approx_kl;
    result.log.push_back(row);
    ++result.iterations;
    if (hooks.on_iteration) hooks.on_iteration(row);
    if (hooks.on_checkpoint && cfg.train.checkpoint_every > 0 &&
        (it + 1) % cfg.train.checkpoint_every == 0) {
      hooks.on_checkpoint(make_checkpoint(cfg, variant, actor, params, seed,
                                          result.env_steps, cur),
                          it);
    }
  }

  result.curriculum = cur;
  result.checkpoint = make_checkpoint(cfg, variant, actor, params, seed,
                                      result.env_steps, cur);
  return result;
}

}  // namespace pfrl
