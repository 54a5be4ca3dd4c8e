#ifndef PFRL_POSE_HPP_
#define PFRL_POSE_HPP_

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace pfrl {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Rigid SE(3) transform. Translation in millimeters, rotation as an
// orthonormal matrix with det +1. Construction validates the rotation; every
// operation below preserves it.
class Pose {
 public:
  Pose() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}
  Pose(const Mat3& rotation, const Vec3& translation);

  static Pose Identity() { return Pose(); }
  static Pose FromTranslation(const Vec3& t) { return Pose(Mat3::Identity(), t); }
  // Roll/pitch/yaw in degrees, applied as Rz(yaw) * Ry(pitch) * Rx(roll).
  static Pose FromRpyDeg(const Vec3& translation, double roll, double pitch,
                         double yaw);

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  Vec3 operator*(const Vec3& point) const {
    return rotation_ * point + translation_;
  }
  Pose operator*(const Pose& other) const;
  Pose inverse() const;

  // 4x4 homogeneous matrix, mostly for tests and debugging.
  Eigen::Matrix4d matrix() const;

  bool operator==(const Pose& other) const = default;

 private:
  struct Unchecked {};
  Pose(Unchecked, const Mat3& rotation, const Vec3& translation)
      : rotation_(rotation), translation_(translation) {}

  Mat3 rotation_;
  Vec3 translation_;
};

// SE(3) increment: translation in mm and an axis-angle rotation vector in
// degrees, both expressed in the world frame.
struct Twist {
  Vec3 translation = Vec3::Zero();
  Vec3 rotation_deg = Vec3::Zero();

  static Twist Zero() { return {}; }

  Twist operator+(const Twist& o) const {
    return {translation + o.translation, rotation_deg + o.rotation_deg};
  }
  Twist operator*(double s) const { return {translation * s, rotation_deg * s}; }
  bool operator==(const Twist& o) const = default;

  Eigen::Matrix<double, 6, 1> vector() const;
  static Twist FromVector(const Eigen::Matrix<double, 6, 1>& v);
};

Pose compose(const Pose& a, const Pose& b);
Pose invert(const Pose& p);

// Rotation matrix for an axis-angle vector given in degrees.
Mat3 exp_rotation_deg(const Vec3& rotation_deg);
// Inverse of exp_rotation_deg; angle in [0, 180].
Vec3 log_rotation_deg(const Mat3& rotation);
// Geodesic angle between two rotations, degrees.
double rotation_distance_deg(const Mat3& a, const Mat3& b);

// The increment that carries `from` onto `to` when applied with apply_twist.
Twist pose_delta(const Pose& from, const Pose& to);
// Rotates about the pose's own origin (world-frame axis), then translates.
Pose apply_twist(const Pose& pose, const Twist& twist);

// Scales the vector down so that its norm does not exceed `limit`.
Vec3 clamp_norm(const Vec3& v, double limit);

// Max-abs deviation of R^T R from identity.
double orthonormality_error(const Mat3& r);

}  // namespace pfrl

#endif  // PFRL_POSE_HPP_
