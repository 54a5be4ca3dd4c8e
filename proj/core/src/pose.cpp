#include "pfrl/pose.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pfrl/errors.hpp"

namespace pfrl {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kOrthoTolerance = 1e-9;

}  // namespace

Pose::Pose(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw InvalidArgument("Pose: non-finite entries");
  }
  const double err = orthonormality_error(rotation);
  if (err >= kOrthoTolerance || rotation.determinant() <= 0.0) {
    std::ostringstream msg;
    msg << "Pose: rotation is not a proper orthonormal matrix (error " << err
        << ")";
    throw InvalidArgument(msg.str());
  }
}

Pose Pose::FromRpyDeg(const Vec3& translation, double roll, double pitch,
                      double yaw) {
  const Mat3 r = (Eigen::AngleAxisd(yaw * kDegToRad, Vec3::UnitZ()) *
                  Eigen::AngleAxisd(pitch * kDegToRad, Vec3::UnitY()) *
                  Eigen::AngleAxisd(roll * kDegToRad, Vec3::UnitX()))
                     .toRotationMatrix();
  return Pose(r, translation);
}

Pose Pose::operator*(const Pose& other) const {
  return Pose(Unchecked{}, rotation_ * other.rotation_,
              rotation_ * other.translation_ + translation_);
}

Pose Pose::inverse() const {
  const Mat3 rt = rotation_.transpose();
  return Pose(Unchecked{}, rt, -(rt * translation_));
}

Eigen::Matrix4d Pose::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

Eigen::Matrix<double, 6, 1> Twist::vector() const {
  Eigen::Matrix<double, 6, 1> v;
  v << translation, rotation_deg;
  return v;
}

Twist Twist::FromVector(const Eigen::Matrix<double, 6, 1>& v) {
  return {v.head<3>(), v.tail<3>()};
}

Pose compose(const Pose& a, const Pose& b) { return a * b; }
Pose invert(const Pose& p) { return p.inverse(); }

Mat3 exp_rotation_deg(const Vec3& rotation_deg) {
  const double angle = rotation_deg.norm();
  if (angle == 0.0) return Mat3::Identity();
  return Eigen::AngleAxisd(angle * kDegToRad, rotation_deg / angle)
      .toRotationMatrix();
}

Vec3 log_rotation_deg(const Mat3& rotation) {
  // Quaternion route keeps precision at both small angles and near 180 deg.
  Eigen::Quaterniond q(rotation);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const double s = q.vec().norm();
  if (s == 0.0) return Vec3::Zero();
  const double angle = 2.0 * std::atan2(s, q.w());
  return q.vec() / s * (angle * kRadToDeg);
}

double rotation_distance_deg(const Mat3& a, const Mat3& b) {
  return log_rotation_deg(a * b.transpose()).norm();
}

Twist pose_delta(const Pose& from, const Pose& to) {
  return {to.translation() - from.translation(),
          log_rotation_deg(to.rotation() * from.rotation().transpose())};
}

Pose apply_twist(const Pose& pose, const Twist& twist) {
  return Pose(exp_rotation_deg(twist.rotation_deg) * pose.rotation(),
              pose.translation() + twist.translation);
}

Vec3 clamp_norm(const Vec3& v, double limit) {
  const double n = v.norm();
  if (n <= limit || n == 0.0) return v;
  return v * (limit / n);
}

double orthonormality_error(const Mat3& r) {
  return (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
}

}  // namespace pfrl
