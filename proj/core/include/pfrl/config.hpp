#ifndef PFRL_CONFIG_HPP_
#define PFRL_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pfrl/curriculum.hpp"
#include "pfrl/env.hpp"
#include "pfrl/networks.hpp"
#include "pfrl/policy.hpp"
#include "pfrl/potential_field.hpp"
#include "pfrl/ppo.hpp"
#include "pfrl/scene.hpp"

namespace pfrl {

struct TrainSettings {
  Variant variant = Variant::kFull;
  int num_envs = 64;
  int rollout_steps = 256;      // per environment per iteration
  long total_steps = 2'000'000; // upper bound on environment steps, whole iterations only
  int checkpoint_every = 0;     // iterations; 0 keeps only the final one
};

struct EvalSettings {
  int trials = 200;  // episodes per seed
  std::vector<std::uint64_t> seeds = {0};
  std::vector<double> noise_levels = {0.0, 1.0, 5.0};  // mm and deg
  std::vector<std::string> scenes;  // catalog names; empty: the run scene
  std::vector<Variant> variants = {Variant::kPfOnly};
  int export_traces = 0;  // traces written per cell
};

struct FieldSettings {
  double x = 0.0;  // socket-frame plane offset, mm
  double y_min = -15.0, y_max = 15.0;
  double z_min = -25.0, z_max = 20.0;
  int ny = 31, nz = 46;
};

struct RunConfig {
  SceneSpec scene;
  int sample_count = 1000;
  EnvConfig env;
  PFConfig pf;
  PPOConfig ppo;
  CurriculumConfig curriculum;
  ActorArch actor;
  CriticArch critic;
  ResidualLimits limits;
  double translation_scale = kDefaultTranslationScale;
  TrainSettings train;
  EvalSettings eval;
  FieldSettings field;

  // Throws ConfigError on any inconsistency.
  void validate() const;
  // Actor architecture with the head width the variant needs.
  ActorArch actor_for(Variant v) const;
};

// Schema (every key optional; defaults above):
// {
//   "scene": "easy_cylinder" | {SceneSpec fields, optional "catalog" base},
//   "sample_count": 1000,
//   "env": {...}, "pf": {...}, "ppo": {...}, "curriculum": {...},
//   "network": {"actor": {...}, "critic": {...}, "translation_scale": 100,
//               "residual_limits": {"tr": 2, "rot": 2}},
//   "train": {"variant", "num_envs", "rollout_steps", "total_steps",
//             "checkpoint_every"},
//   "eval": {"trials", "seeds", "noise_levels", "scenes", "variants",
//            "export_traces"},
//   "field": {"x", "y_min", "y_max", "z_min", "z_max", "ny", "nz"}
// }
// When env.success_tr is absent it becomes min(1 mm, tolerance / 2).
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json run_config_to_json(const RunConfig& c);
RunConfig load_run_config(const std::filesystem::path& path);

// FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const RunConfig& c);

void to_json(nlohmann::json& j, const EnvConfig& c);
void from_json(const nlohmann::json& j, EnvConfig& c);
void to_json(nlohmann::json& j, const PFConfig& c);
void from_json(const nlohmann::json& j, PFConfig& c);

}  // namespace pfrl

#endif  // PFRL_CONFIG_HPP_
