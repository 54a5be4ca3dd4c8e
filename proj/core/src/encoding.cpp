#include <Eigen/Core>

#include "pfrl/errors.hpp"
#include "pfrl/policy.hpp"

namespace pfrl {

Eigen::Matrix<double, kPoseEncodingSize, 1> encode_pose(
    const Pose& pose, double translation_scale) {
  Eigen::Matrix<double, kPoseEncodingSize, 1> e;
  e.head<3>() = pose.translation() / translation_scale;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) e[3 + 3 * r + c] = pose.rotation()(r, c);
  }
  return e;
}

Vector encode_actor_obs(const Observation& obs, double translation_scale) {
  Vector x(kActorInputSize);
  x.segment<kPoseEncodingSize>(0) = encode_pose(obs.plug, translation_scale);
  x.segment<kPoseEncodingSize>(kPoseEncodingSize) =
      encode_pose(obs.socket, translation_scale);
  return x;
}

Vector encode_critic_obs(const Observation& obs, double translation_scale) {
  if (!obs.privileged) {
    throw MissingPrivilegedData("critic encoding needs ground-truth poses");
  }
  const Privileged& gt = *obs.privileged;
  const Pose blocks[6] = {obs.plug,
                          obs.socket,
                          gt.plug,
                          gt.socket,
                          obs.socket.inverse() * obs.plug,
                          gt.socket.inverse() * gt.plug};
  Vector x(kCriticInputSize);
  for (int i = 0; i < 6; ++i) {
    x.segment<kPoseEncodingSize>(i * kPoseEncodingSize) =
        encode_pose(blocks[i], translation_scale);
  }
  return x;
}

}  // namespace pfrl
