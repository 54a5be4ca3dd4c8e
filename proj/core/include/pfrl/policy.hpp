#ifndef PFRL_POLICY_HPP_
#define PFRL_POLICY_HPP_

#include <string>
#include <string_view>

#include "pfrl/env.hpp"
#include "pfrl/networks.hpp"
#include "pfrl/potential_field.hpp"

namespace pfrl {

constexpr int kPoseEncodingSize = 12;
constexpr int kActorInputSize = 2 * kPoseEncodingSize;
constexpr int kCriticInputSize = 6 * kPoseEncodingSize;
constexpr double kDefaultTranslationScale = 100.0;  // mm

// translation / scale, then the row-major rotation matrix.
Eigen::Matrix<double, kPoseEncodingSize, 1> encode_pose(
    const Pose& pose, double translation_scale = kDefaultTranslationScale);

// [observed plug, observed socket]
Vector encode_actor_obs(const Observation& obs,
                        double translation_scale = kDefaultTranslationScale);
// [observed plug, observed socket, true plug, true socket, observed relative,
//  true relative]; relative = socket-frame pose of the plug.
Vector encode_critic_obs(const Observation& obs,
                         double translation_scale = kDefaultTranslationScale);

struct GaussianSample {
  Vector u;
  double logp;
};

// Diagonal Gaussian log-density.
double gaussian_logprob(const Vector& u, const Vector& mean,
                        const Vector& log_std);
GaussianSample sample_and_logprob(const Vector& mean, const Vector& log_std,
                                  Rng& rng);

struct ResidualLimits {
  double tr = 2.0;   // mm
  double rot = 2.0;  // deg
};

// Scales u (clamped to [-1, 1]) componentwise onto the residual limits.
Twist decode_residual(const Vector& u, const ResidualLimits& limits);

// a_pf + beta * a_rl, then the environment's per-axis clamp.
Twist combine_residual(const Twist& a_pf, const Twist& a_rl, double beta,
                       const EnvConfig& env);

enum class Variant {
  kPfOnly,
  kPfResidualNoCurriculum,
  kPfLearnedW,
  kPfResidualLearnedBeta,
  kFull,
};

std::string_view variant_name(Variant v);
Variant parse_variant(std::string_view name);
// Width of the Gaussian head; 0 for pf_only.
int variant_action_dim(Variant v);
bool variant_learns(Variant v);
// Whether the noise level follows the success-driven curriculum.
bool variant_uses_curriculum(Variant v);

// Sigmoid applied to a clamped head output: maps [-1, 1] into (0, 1).
double squash_unit_to_weight(double u);

struct ComposedAction {
  Twist pf;
  Twist rl;     // already scaled by the effective beta
  Twist total;
  double w_tr = 0.0;
  double w_rot = 0.0;
  double beta = 0.0;
};

// Turns one head output into the executed action for a variant. `u` is
// ignored for pf_only; `beta` is the scheduled residual scale (unused by the
// learned-beta and learned-w variants).
ComposedAction compose_action(Variant variant, const PFBreakdown& pf,
                              const Vector& u, double beta,
                              const PFConfig& pf_cfg,
                              const ResidualLimits& limits,
                              const EnvConfig& env);

}  // namespace pfrl

#endif  // PFRL_POLICY_HPP_
