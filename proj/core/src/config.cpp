#include "pfrl/config.hpp"

#include <algorithm>
#include <fstream>

#include "pfrl/errors.hpp"
#include "pfrl/util.hpp"

namespace pfrl {
namespace {

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void reject_unknown(const nlohmann::json& j, const char* section,
                    std::initializer_list<const char*> keys) {
  if (!j.is_object()) {
    throw ConfigError(std::string("'") + section + "' must be an object");
  }
  for (const auto& [k, _] : j.items()) {
    if (std::none_of(keys.begin(), keys.end(),
                     [&](const char* allowed) { return k == allowed; })) {
      throw ConfigError(std::string("unknown key '") + k + "' in '" + section +
                        "'");
    }
  }
}

}  // namespace

void to_json(nlohmann::json& j, const EnvConfig& c) {
  j = {{"horizon", c.horizon},
       {"socket_xy_range", c.socket_xy_range},
       {"socket_z_range", c.socket_z_range},
       {"socket_yaw_range", c.socket_yaw_range},
       {"plug_xy_range", c.plug_xy_range},
       {"plug_rpy_range", c.plug_rpy_range},
       {"plug_start_height", c.plug_start_height},
       {"plug_noise_max", c.plug_noise_max},
       {"socket_noise_max", c.socket_noise_max},
       {"reward_success", c.reward_success},
       {"penalty_penetration", c.penalty_penetration},
       {"success_tr", c.success_tr},
       {"success_rot", c.success_rot},
       {"penetration_allowance", c.penetration_allowance},
       {"bisection_iterations", c.bisection_iterations},
       {"action_limit_tr", c.action_limit_tr},
       {"action_limit_rot", c.action_limit_rot}};
}

void from_json(const nlohmann::json& j, EnvConfig& c) {
  reject_unknown(j, "env",
                 {"horizon", "socket_xy_range", "socket_z_range",
                  "socket_yaw_range", "plug_xy_range", "plug_rpy_range",
                  "plug_start_height", "plug_noise_max", "socket_noise_max",
                  "reward_success", "penalty_penetration", "success_tr",
                  "success_rot", "penetration_allowance",
                  "bisection_iterations", "action_limit_tr",
                  "action_limit_rot"});
  read(j, "horizon", c.horizon);
  read(j, "socket_xy_range", c.socket_xy_range);
  read(j, "socket_z_range", c.socket_z_range);
  read(j, "socket_yaw_range", c.socket_yaw_range);
  read(j, "plug_xy_range", c.plug_xy_range);
  read(j, "plug_rpy_range", c.plug_rpy_range);
  read(j, "plug_start_height", c.plug_start_height);
  read(j, "plug_noise_max", c.plug_noise_max);
  read(j, "socket_noise_max", c.socket_noise_max);
  read(j, "reward_success", c.reward_success);
  read(j, "penalty_penetration", c.penalty_penetration);
  read(j, "success_tr", c.success_tr);
  read(j, "success_rot", c.success_rot);
  read(j, "penetration_allowance", c.penetration_allowance);
  read(j, "bisection_iterations", c.bisection_iterations);
  read(j, "action_limit_tr", c.action_limit_tr);
  read(j, "action_limit_rot", c.action_limit_rot);
}

void to_json(nlohmann::json& j, const PFConfig& c) {
  j = {{"anchor_count", c.anchor_count},
       {"switch_threshold", c.switch_threshold},
       {"repulsive_threshold", c.repulsive_threshold},
       {"w_tr", c.w_tr},
       {"w_rot", c.w_rot},
       {"max_step_tr", c.max_step_tr},
       {"max_step_rot", c.max_step_rot},
       {"epsilon_d", c.epsilon_d},
       {"repulsive_gain", c.repulsive_gain},
       {"torque_gain", c.torque_gain}};
}

void from_json(const nlohmann::json& j, PFConfig& c) {
  reject_unknown(j, "pf",
                 {"anchor_count", "switch_threshold", "repulsive_threshold",
                  "w_tr", "w_rot", "max_step_tr", "max_step_rot", "epsilon_d",
                  "repulsive_gain", "torque_gain"});
  read(j, "anchor_count", c.anchor_count);
  read(j, "switch_threshold", c.switch_threshold);
  read(j, "repulsive_threshold", c.repulsive_threshold);
  read(j, "w_tr", c.w_tr);
  read(j, "w_rot", c.w_rot);
  read(j, "max_step_tr", c.max_step_tr);
  read(j, "max_step_rot", c.max_step_rot);
  read(j, "epsilon_d", c.epsilon_d);
  read(j, "repulsive_gain", c.repulsive_gain);
  read(j, "torque_gain", c.torque_gain);
}

void RunConfig::validate() const {
  try {
    if (sample_count < 4) throw ConfigError("sample_count must be >= 4");
    (void)make_plug(scene);
    (void)make_socket(scene);
    env.validate(scene);
    pf.validate();
    ppo.validate();
    curriculum.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (std::abs(curriculum.n_max - env.plug_noise_max) > 1e-12) {
    throw ConfigError("curriculum.n_max must equal env.plug_noise_max");
  }
  if (train.num_envs < 1 || train.rollout_steps < 1 || train.total_steps < 1) {
    throw ConfigError("train: num_envs, rollout_steps, total_steps must be >= 1");
  }
  if (train.total_steps < static_cast<long>(train.num_envs) * train.rollout_steps) {
    throw ConfigError("train.total_steps is smaller than one iteration");
  }
  if (train.rollout_steps % ppo.segment_len != 0) {
    throw ConfigError("train.rollout_steps must be a multiple of segment_len");
  }
  if (ppo.minibatch > train.num_envs * train.rollout_steps) {
    throw ConfigError("ppo.minibatch exceeds the rollout size");
  }
  if (!(translation_scale > 0.0)) throw ConfigError("translation_scale > 0");
  if (!(limits.tr > 0.0) || !(limits.rot > 0.0)) {
    throw ConfigError("residual limits must be > 0");
  }
  if (eval.seeds.empty()) throw ConfigError("eval.seeds must not be empty");
  for (double n : eval.noise_levels) {
    if (n < 0.0) throw ConfigError("eval.noise_levels must be >= 0");
  }
  if (field.ny < 1 || field.nz < 1) throw ConfigError("field grid is empty");
}

ActorArch RunConfig::actor_for(Variant v) const {
  ActorArch a = actor;
  a.input_dim = kActorInputSize;
  a.output_dim = variant_action_dim(v);
  return a;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig c;
  try {
    reject_unknown(j, "config",
                   {"scene", "sample_count", "env", "pf", "ppo", "curriculum",
                    "network", "train", "eval", "field", "description"});
    if (j.contains("scene")) {
      const auto& s = j.at("scene");
      c.scene = s.is_string() ? catalog_scene(s.get<std::string>())
                              : s.get<SceneSpec>();
    }
    read(j, "sample_count", c.sample_count);
    if (j.contains("env")) c.env = j.at("env").get<EnvConfig>();
    if (!j.contains("env") || !j.at("env").contains("success_tr")) {
      c.env.success_tr = std::min(1.0, 0.5 * c.scene.tolerance);
    }
    if (j.contains("pf")) c.pf = j.at("pf").get<PFConfig>();
    if (j.contains("ppo")) c.ppo = j.at("ppo").get<PPOConfig>();
    if (j.contains("curriculum")) {
      c.curriculum = j.at("curriculum").get<CurriculumConfig>();
    } else {
      c.curriculum.n_max = c.env.plug_noise_max;
    }
    if (j.contains("network")) {
      const auto& n = j.at("network");
      reject_unknown(n, "network",
                     {"actor", "critic", "translation_scale",
                      "residual_limits"});
      if (n.contains("actor")) c.actor = n.at("actor").get<ActorArch>();
      if (n.contains("critic")) c.critic = n.at("critic").get<CriticArch>();
      read(n, "translation_scale", c.translation_scale);
      if (n.contains("residual_limits")) {
        read(n.at("residual_limits"), "tr", c.limits.tr);
        read(n.at("residual_limits"), "rot", c.limits.rot);
      }
    }
    c.critic.input_dim = kCriticInputSize;
    if (j.contains("train")) {
      const auto& t = j.at("train");
      reject_unknown(t, "train",
                     {"variant", "num_envs", "rollout_steps", "total_steps",
                      "checkpoint_every"});
      if (t.contains("variant")) {
        c.train.variant = parse_variant(t.at("variant").get<std::string>());
      }
      read(t, "num_envs", c.train.num_envs);
      read(t, "rollout_steps", c.train.rollout_steps);
      read(t, "total_steps", c.train.total_steps);
      read(t, "checkpoint_every", c.train.checkpoint_every);
    }
    if (j.contains("eval")) {
      const auto& e = j.at("eval");
      reject_unknown(e, "eval",
                     {"trials", "seeds", "noise_levels", "scenes", "variants",
                      "export_traces"});
      read(e, "trials", c.eval.trials);
      read(e, "seeds", c.eval.seeds);
      read(e, "noise_levels", c.eval.noise_levels);
      read(e, "scenes", c.eval.scenes);
      read(e, "export_traces", c.eval.export_traces);
      if (e.contains("variants")) {
        c.eval.variants.clear();
        for (const auto& v : e.at("variants")) {
          c.eval.variants.push_back(parse_variant(v.get<std::string>()));
        }
      }
    }
    if (j.contains("field")) {
      const auto& f = j.at("field");
      reject_unknown(f, "field",
                     {"x", "y_min", "y_max", "z_min", "z_max", "ny", "nz"});
      read(f, "x", c.field.x);
      read(f, "y_min", c.field.y_min);
      read(f, "y_max", c.field.y_max);
      read(f, "z_min", c.field.z_min);
      read(f, "z_max", c.field.z_max);
      read(f, "ny", c.field.ny);
      read(f, "nz", c.field.nz);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const UnknownVariant& e) {
    throw ConfigError(e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  c.validate();
  return c;
}

nlohmann::json run_config_to_json(const RunConfig& c) {
  nlohmann::json variants = nlohmann::json::array();
  for (Variant v : c.eval.variants) variants.push_back(variant_name(v));
  return {
      {"scene", c.scene},
      {"sample_count", c.sample_count},
      {"env", c.env},
      {"pf", c.pf},
      {"ppo", c.ppo},
      {"curriculum", c.curriculum},
      {"network",
       {{"actor", c.actor},
        {"critic", c.critic},
        {"translation_scale", c.translation_scale},
        {"residual_limits", {{"tr", c.limits.tr}, {"rot", c.limits.rot}}}}},
      {"train",
       {{"variant", variant_name(c.train.variant)},
        {"num_envs", c.train.num_envs},
        {"rollout_steps", c.train.rollout_steps},
        {"total_steps", c.train.total_steps},
        {"checkpoint_every", c.train.checkpoint_every}}},
      {"eval",
       {{"trials", c.eval.trials},
        {"seeds", c.eval.seeds},
        {"noise_levels", c.eval.noise_levels},
        {"scenes", c.eval.scenes},
        {"variants", variants},
        {"export_traces", c.eval.export_traces}}},
      {"field",
       {{"x", c.field.x},
        {"y_min", c.field.y_min},
        {"y_max", c.field.y_max},
        {"z_min", c.field.z_min},
        {"z_max", c.field.z_max},
        {"ny", c.field.ny},
        {"nz", c.field.nz}}}};
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is, nullptr, true, true);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

std::string config_hash(const RunConfig& c) {
  return hex64(fnv1a64(run_config_to_json(c).dump()));
}

}  // namespace pfrl
