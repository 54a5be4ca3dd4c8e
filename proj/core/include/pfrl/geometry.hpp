#ifndef PFRL_GEOMETRY_HPP_
#define PFRL_GEOMETRY_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "pfrl/pose.hpp"
#include "pfrl/shapes.hpp"

namespace pfrl {

// Prism-shaped plug. Its frame sits at the bottom-face centroid with +z
// running up the plug axis; the solid spans z in [0, height].
class PlugModel {
 public:
  PlugModel(CrossSection section, double height);

  const CrossSection& section() const { return section_; }
  double height() const { return height_; }

  // Signed distance in the plug frame, negative inside.
  double sdf(const Vec3& p) const;

 private:
  CrossSection section_;
  double height_;
};

// Block with a prismatic cavity cut from its top face. The socket frame sits
// at the centre of the top face ("tip") with +z pointing out of the cavity.
// The cavity spans z in [-depth, 0]; the block spans z in [-depth - floor, 0].
class SocketModel {
 public:
  // `tolerance` is cavity dimension minus plug dimension (total clearance);
  // the cavity is the plug section grown by tolerance / 2 on every side.
  SocketModel(const CrossSection& plug_section, double tolerance, double depth,
              double outer_x, double outer_y, double floor_thickness,
              Pose base = Pose::Identity());

  const CrossSection& cavity() const { return cavity_; }
  double tolerance() const { return tolerance_; }
  double depth() const { return depth_; }
  double outer_x() const { return outer_x_; }
  double outer_y() const { return outer_y_; }
  double floor_thickness() const { return floor_; }
  const Pose& base() const { return base_; }

  SocketModel with_base(const Pose& base) const;

  // Fully inserted plug pose: plug bottom on the cavity floor, socket
  // orientation.
  Pose goal_pose() const;

  // Signed distance to the socket solid in the socket frame.
  double local_sdf(const Vec3& p) const;
  // Outward unit normal of the socket solid (central differences).
  Vec3 local_normal(const Vec3& p) const;

  double sdf(const Vec3& world_point) const {
    return local_sdf(base_inv_ * world_point);
  }

 private:
  CrossSection cavity_;
  double tolerance_;
  double depth_;
  double outer_x_;
  double outer_y_;
  double floor_;
  Pose base_;
  Pose base_inv_;
};

// Ordered anchors from the retract pose (index 0) to the goal (last).
struct AnchorPath {
  std::vector<Pose> anchors;

  std::size_t size() const { return anchors.size(); }
  const Pose& goal() const { return anchors.back(); }
};

struct ClosestPair {
  Vec3 plug_point;     // world frame, on the plug surface
  Vec3 socket_point;   // world frame, projection onto the socket surface
  Vec3 normal;         // outward socket normal at socket_point
  double distance;     // max(0, signed_distance)
  double signed_distance;
};

// Socket SDF at a world-frame point; positive outside the solid.
double socket_sdf(const SocketModel& socket, const Vec3& point);

// Deterministic quasi-uniform samples of the plug boundary in the plug frame.
// Bottom-face vertices (four rim points for a cylinder) come first, then a
// ring along the bottom rim, then area-proportional face samples.
std::vector<Vec3> sample_surface(const PlugModel& plug, int m,
                                 std::uint64_t seed = 0);

ClosestPair closest_pair(std::span<const Vec3> plug_samples,
                         const Pose& plug_pose, const SocketModel& socket);
ClosestPair closest_pair(const PlugModel& plug, const Pose& plug_pose,
                         const SocketModel& socket, int m,
                         std::uint64_t seed = 0);

double penetration_depth(std::span<const Vec3> plug_samples,
                         const Pose& plug_pose, const SocketModel& socket);
double penetration_depth(const PlugModel& plug, const Pose& plug_pose,
                         const SocketModel& socket, int m,
                         std::uint64_t seed = 0);

// Straight path down the cavity axis from `retract_height` above the socket
// tip to the goal pose, discretised into k anchors.
AnchorPath medial_anchor_path(const SocketModel& socket, double retract_height,
                              int k);

}  // namespace pfrl

#endif  // PFRL_GEOMETRY_HPP_
