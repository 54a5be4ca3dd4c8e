#ifndef PFRL_POTENTIAL_FIELD_HPP_
#define PFRL_POTENTIAL_FIELD_HPP_

#include <cstddef>
#include <span>

#include "pfrl/geometry.hpp"
#include "pfrl/scene.hpp"

namespace pfrl {

struct PFConfig {
  int anchor_count = 30;          // k
  double switch_threshold = 3.0;  // mm; anchor proximity radius
  double repulsive_threshold = 1.0;  // th, mm
  double w_tr = 0.33;
  double w_rot = 0.0;
  double max_step_tr = 2.0;   // mm
  double max_step_rot = 2.0;  // deg
  double epsilon_d = 0.01;    // mm
  double repulsive_gain = 0.3;  // mm^2; force = gain * n / max(d, epsilon_d)
  double torque_gain = 0.05;  // deg per (mm x normalised force)

  void validate() const;
};

struct NearestAnchor {
  std::size_t index;
  double distance;  // mm, translational
};

// Translational nearest anchor; ties go to the higher index.
NearestAnchor nearest_anchor(const AnchorPath& path, const Pose& obs);

Twist attractive_action(const AnchorPath& path, const Pose& obs,
                        const PFConfig& cfg);

Twist repulsive_action(std::span<const Vec3> plug_samples, const Pose& obs_plug,
                       const SocketModel& socket, const PFConfig& cfg);
Twist repulsive_action(const Scene& scene, const Pose& obs_plug,
                       const SocketModel& socket, const PFConfig& cfg);

struct PFBreakdown {
  Twist attractive;
  Twist repulsive;
  Twist combined;
};

// Full controller. `socket` must already carry the observed socket pose and
// `path` must have been built from it.
PFBreakdown pf_breakdown(const AnchorPath& path, std::span<const Vec3> samples,
                         const SocketModel& socket, const Pose& obs_plug,
                         const PFConfig& cfg);

// Convenience wrapper that builds the anchor path from the observed socket
// pose.
Twist pf_action(const Scene& scene, const Pose& obs_plug, const Pose& obs_socket,
                const PFConfig& cfg);
PFBreakdown pf_action_breakdown(const Scene& scene, const Pose& obs_plug,
                                const Pose& obs_socket, const PFConfig& cfg);

// Convex combination of attractive and repulsive parts with explicit weights,
// then the final step clamp. Used by the learned-weight variant.
Twist blend_pf(const Twist& attractive, const Twist& repulsive, double w_tr,
               double w_rot, const PFConfig& cfg);

}  // namespace pfrl

#endif  // PFRL_POTENTIAL_FIELD_HPP_
