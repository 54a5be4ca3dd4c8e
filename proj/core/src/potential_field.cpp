#include "pfrl/potential_field.hpp"

#include <cmath>
#include <limits>

#include "pfrl/errors.hpp"

namespace pfrl {

void PFConfig::validate() const {
  if (anchor_count < 2) throw InvalidArgument("PFConfig: k must be >= 2");
  if (!(w_tr >= 0.0 && w_tr <= 1.0) || !(w_rot >= 0.0 && w_rot <= 1.0)) {
    throw InvalidArgument("PFConfig: weights must lie in [0, 1]");
  }
  if (!(epsilon_d > 0.0) || !(repulsive_threshold > epsilon_d)) {
    throw InvalidArgument("PFConfig: need th > epsilon_d > 0");
  }
  if (!(max_step_tr > 0.0) || !(max_step_rot > 0.0)) {
    throw InvalidArgument("PFConfig: max steps must be > 0");
  }
  if (!(switch_threshold >= 0.0) || !(torque_gain >= 0.0)) {
    throw InvalidArgument("PFConfig: negative switch threshold or torque gain");
  }
}

NearestAnchor nearest_anchor(const AnchorPath& path, const Pose& obs) {
  if (path.anchors.empty()) throw InvalidArgument("nearest_anchor: empty path");
  NearestAnchor best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < path.anchors.size(); ++i) {
    const double d = (path.anchors[i].translation() - obs.translation()).norm();
    if (d <= best.distance) best = {i, d};
  }
  return best;
}

namespace {

Twist clamp_twist(const Twist& t, const PFConfig& cfg) {
  return {clamp_norm(t.translation, cfg.max_step_tr),
          clamp_norm(t.rotation_deg, cfg.max_step_rot)};
}

}  // namespace

Twist attractive_action(const AnchorPath& path, const Pose& obs,
                        const PFConfig& cfg) {
  const NearestAnchor cl = nearest_anchor(path, obs);
  std::size_t target = cl.index;
  if (cl.distance <= cfg.switch_threshold) {
    target = std::min(cl.index + 1, path.anchors.size() - 1);
  }
  return clamp_twist(pose_delta(obs, path.anchors[target]), cfg);
}

Twist repulsive_action(std::span<const Vec3> plug_samples, const Pose& obs_plug,
                       const SocketModel& socket, const PFConfig& cfg) {
  const ClosestPair pair = closest_pair(plug_samples, obs_plug, socket);
  if (pair.distance > cfg.repulsive_threshold) return Twist::Zero();

  // Outward normal scaled by 1/d: equals v / d^2 for separated pairs and
  // saturates at 1/epsilon_d once the witness touches or penetrates.
  const Vec3 force =
      cfg.repulsive_gain * pair.normal / std::max(pair.distance, cfg.epsilon_d);
  const Vec3 lever = pair.plug_point - obs_plug.translation();
  Twist out;
  out.translation = clamp_norm(force, cfg.max_step_tr);
  out.rotation_deg =
      clamp_norm(cfg.torque_gain * lever.cross(force), cfg.max_step_rot);
  return out;
}

Twist repulsive_action(const Scene& scene, const Pose& obs_plug,
                       const SocketModel& socket, const PFConfig& cfg) {
  return repulsive_action(scene.samples, obs_plug, socket, cfg);
}

Twist blend_pf(const Twist& attractive, const Twist& repulsive, double w_tr,
               double w_rot, const PFConfig& cfg) {
  Twist out;
  out.translation =
      w_tr * attractive.translation + (1.0 - w_tr) * repulsive.translation;
  out.rotation_deg =
      w_rot * attractive.rotation_deg + (1.0 - w_rot) * repulsive.rotation_deg;
  return clamp_twist(out, cfg);
}

PFBreakdown pf_breakdown(const AnchorPath& path, std::span<const Vec3> samples,
                         const SocketModel& socket, const Pose& obs_plug,
                         const PFConfig& cfg) {
  PFBreakdown b;
  b.attractive = attractive_action(path, obs_plug, cfg);
  b.repulsive = repulsive_action(samples, obs_plug, socket, cfg);
  b.combined = blend_pf(b.attractive, b.repulsive, cfg.w_tr, cfg.w_rot, cfg);
  return b;
}

PFBreakdown pf_action_breakdown(const Scene& scene, const Pose& obs_plug,
                                const Pose& obs_socket, const PFConfig& cfg) {
  const SocketModel observed = scene.socket.with_base(obs_socket);
  const AnchorPath path = medial_anchor_path(
      observed, scene.spec.retract_height, cfg.anchor_count);
  return pf_breakdown(path, scene.samples, observed, obs_plug, cfg);
}

Twist pf_action(const Scene& scene, const Pose& obs_plug, const Pose& obs_socket,
                const PFConfig& cfg) {
  return pf_action_breakdown(scene, obs_plug, obs_socket, cfg).combined;
}

}  // namespace pfrl
