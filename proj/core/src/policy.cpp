#include "pfrl/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pfrl/errors.hpp"

namespace pfrl {
namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);
constexpr double kWeightSlope = 4.0;

}  // namespace

double gaussian_logprob(const Vector& u, const Vector& mean,
                        const Vector& log_std) {
  double logp = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double z = (u[i] - mean[i]) * std::exp(-log_std[i]);
    logp += -0.5 * z * z - log_std[i] - kHalfLog2Pi;
  }
  return logp;
}

GaussianSample sample_and_logprob(const Vector& mean, const Vector& log_std,
                                  Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  GaussianSample s;
  s.u.resize(mean.size());
  for (Eigen::Index i = 0; i < mean.size(); ++i) {
    s.u[i] = mean[i] + std::exp(log_std[i]) * normal(rng);
  }
  s.logp = gaussian_logprob(s.u, mean, log_std);
  return s;
}

Twist decode_residual(const Vector& u, const ResidualLimits& limits) {
  if (u.size() < 6) throw InvalidArgument("decode_residual: need 6 values");
  Twist t;
  for (int i = 0; i < 3; ++i) {
    t.translation[i] = std::clamp(u[i], -1.0, 1.0) * limits.tr;
    t.rotation_deg[i] = std::clamp(u[3 + i], -1.0, 1.0) * limits.rot;
  }
  return t;
}

Twist combine_residual(const Twist& a_pf, const Twist& a_rl, double beta,
                       const EnvConfig& env) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw InvalidArgument("combine_residual: beta must lie in [0, 1]");
  }
  if (beta == 0.0) return clamp_action(a_pf, env);
  return clamp_action(a_pf + a_rl * beta, env);
}

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kPfOnly:
      return "pf_only";
    case Variant::kPfResidualNoCurriculum:
      return "pf_residual_no_curriculum";
    case Variant::kPfLearnedW:
      return "pf_plus_learned_w";
    case Variant::kPfResidualLearnedBeta:
      return "pf_residual_learned_beta";
    case Variant::kFull:
      return "full";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::kPfOnly, Variant::kPfResidualNoCurriculum,
                    Variant::kPfLearnedW, Variant::kPfResidualLearnedBeta,
                    Variant::kFull}) {
    if (variant_name(v) == name) return v;
  }
  throw UnknownVariant("unknown variant '" + std::string(name) + "'");
}

int variant_action_dim(Variant v) {
  switch (v) {
    case Variant::kPfOnly:
      return 0;
    case Variant::kPfLearnedW:
      return 2;
    case Variant::kPfResidualLearnedBeta:
      return 7;
    case Variant::kPfResidualNoCurriculum:
    case Variant::kFull:
      return 6;
  }
  return 0;
}

bool variant_learns(Variant v) { return v != Variant::kPfOnly; }

bool variant_uses_curriculum(Variant v) {
  return v == Variant::kFull || v == Variant::kPfLearnedW ||
         v == Variant::kPfResidualLearnedBeta;
}

double squash_unit_to_weight(double u) {
  return 1.0 / (1.0 + std::exp(-kWeightSlope * std::clamp(u, -1.0, 1.0)));
}

ComposedAction compose_action(Variant variant, const PFBreakdown& pf,
                              const Vector& u, double beta,
                              const PFConfig& pf_cfg,
                              const ResidualLimits& limits,
                              const EnvConfig& env) {
  ComposedAction a;
  a.pf = pf.combined;
  a.w_tr = pf_cfg.w_tr;
  a.w_rot = pf_cfg.w_rot;
  switch (variant) {
    case Variant::kPfOnly:
      a.total = clamp_action(a.pf, env);
      return a;
    case Variant::kPfLearnedW:
      a.w_tr = squash_unit_to_weight(u[0]);
      a.w_rot = squash_unit_to_weight(u[1]);
      a.pf = blend_pf(pf.attractive, pf.repulsive, a.w_tr, a.w_rot, pf_cfg);
      a.total = clamp_action(a.pf, env);
      return a;
    case Variant::kPfResidualLearnedBeta:
      a.beta = squash_unit_to_weight(u[6]);
      break;
    case Variant::kPfResidualNoCurriculum:
    case Variant::kFull:
      a.beta = beta;
      break;
  }
  const Twist residual = decode_residual(u, limits);
  a.rl = residual * a.beta;
  a.total = combine_residual(a.pf, residual, a.beta, env);
  return a;
}

}  // namespace pfrl
