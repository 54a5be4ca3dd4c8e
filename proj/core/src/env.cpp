#include "pfrl/env.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "pfrl/errors.hpp"
#include "pfrl/util.hpp"

namespace pfrl {

void EnvConfig::validate(const SceneSpec& scene) const {
  if (horizon < 1) throw InvalidArgument("EnvConfig: horizon must be >= 1");
  const double ranges[] = {socket_xy_range, socket_z_range,  socket_yaw_range,
                           plug_xy_range,   plug_rpy_range,  plug_start_height,
                           plug_noise_max,  socket_noise_max, penalty_penetration,
                           penetration_allowance};
  for (double r : ranges) {
    if (!(r >= 0.0)) throw InvalidArgument("EnvConfig: ranges must be >= 0");
  }
  if (!(success_tr > 0.0) || !(success_rot > 0.0)) {
    throw InvalidArgument("EnvConfig: success tolerances must be > 0");
  }
  if (!(success_tr < scene.tolerance)) {
    throw InvalidArgument("EnvConfig: success_tr must be below the scene tolerance");
  }
  if (!(action_limit_tr > 0.0) || !(action_limit_rot > 0.0)) {
    throw InvalidArgument("EnvConfig: action limits must be > 0");
  }
  if (bisection_iterations < 1 || bisection_iterations > 20) {
    throw InvalidArgument("EnvConfig: bisection iterations must be in [1, 20]");
  }
}

NoiseLevel NoiseLevel::FromPlugLevel(double n, const EnvConfig& cfg) {
  const double socket = std::min(n, cfg.socket_noise_max);
  return {n, n, socket, socket};
}

Pose apply_noise(const Pose& pose, double max_tr, double max_rot_deg, Rng& rng) {
  if (max_tr < 0.0 || max_rot_deg < 0.0) {
    throw InvalidArgument("apply_noise: bounds must be >= 0");
  }
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double u[6];
  for (double& x : u) x = unit(rng);
  // Draws are always consumed so trajectories stay aligned across levels.
  if (max_tr == 0.0 && max_rot_deg == 0.0) return pose;
  const Vec3 dt = Vec3(u[0], u[1], u[2]) * max_tr;
  const Pose rot = Pose::FromRpyDeg(Vec3::Zero(), u[3] * max_rot_deg,
                                    u[4] * max_rot_deg, u[5] * max_rot_deg);
  return Pose(rot.rotation() * pose.rotation(), pose.translation() + dt);
}

Twist clamp_action(const Twist& a, const EnvConfig& cfg) {
  Twist out;
  out.translation =
      a.translation.cwiseMax(-cfg.action_limit_tr).cwiseMin(cfg.action_limit_tr);
  out.rotation_deg = a.rotation_deg.cwiseMax(-cfg.action_limit_rot)
                         .cwiseMin(cfg.action_limit_rot);
  return out;
}

ContactResult resolve_contact(std::span<const Vec3> plug_samples,
                              const SocketModel& socket, const Pose& from,
                              const Pose& candidate, double allowance,
                              int iterations) {
  const double pen = penetration_depth(plug_samples, candidate, socket);
  if (pen <= allowance) return {candidate, pen};

  // Keep the commanded rotation if the start translation admits it; a
  // rotation that cannot be admitted at all is dropped.
  Mat3 rotation = candidate.rotation();
  double start_pen =
      penetration_depth(plug_samples, Pose(rotation, from.translation()), socket);
  if (start_pen > allowance) {
    rotation = from.rotation();
    start_pen = penetration_depth(plug_samples, from, socket);
    if (start_pen > allowance) return {from, start_pen};
  }

  const Vec3 start = from.translation();
  const Vec3 delta = candidate.translation() - start;
  double lo = 0.0, hi = 1.0, lo_pen = start_pen;
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double p =
        penetration_depth(plug_samples, Pose(rotation, start + mid * delta), socket);
    if (p <= allowance) {
      lo = mid;
      lo_pen = p;
    } else {
      hi = mid;
    }
  }
  return {Pose(rotation, start + lo * delta), lo_pen};
}

bool check_success(const Pose& plug, const Pose& goal, double eps_tr,
                   double eps_rot_deg, double penetration, double allowance) {
  return (plug.translation() - goal.translation()).norm() <= eps_tr &&
         rotation_distance_deg(plug.rotation(), goal.rotation()) <= eps_rot_deg &&
         penetration <= allowance;
}

InsertionEnv::InsertionEnv(std::shared_ptr<const Scene> scene, EnvConfig cfg)
    : scene_(std::move(scene)), cfg_(cfg), socket_(scene_->socket) {
  cfg_.validate(scene_->spec);
}

Observation InsertionEnv::observe(const NoiseLevel& level) {
  Observation obs{apply_noise(state_.plug, level.plug_tr, level.plug_rot, rng_),
                  apply_noise(state_.socket, level.socket_tr, level.socket_rot,
                              rng_),
                  Privileged{state_.plug, state_.socket}};
  return obs;
}

Observation InsertionEnv::reset(const NoiseLevel& level, std::uint64_t seed) {
  rng_.seed(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> half(0.0, 1.0);

  const Pose& nominal = scene_->spec.base;
  const Vec3 socket_offset(unit(rng_) * cfg_.socket_xy_range,
                           unit(rng_) * cfg_.socket_xy_range,
                           half(rng_) * cfg_.socket_z_range);
  const double socket_yaw = unit(rng_) * cfg_.socket_yaw_range;
  const Pose socket_pose =
      Pose(Pose::FromRpyDeg(Vec3::Zero(), 0.0, 0.0, socket_yaw).rotation() *
               nominal.rotation(),
           nominal.translation() + socket_offset);

  const double dx = unit(rng_) * cfg_.plug_xy_range;
  const double dy = unit(rng_) * cfg_.plug_xy_range;
  const double roll = unit(rng_) * cfg_.plug_rpy_range;
  const double pitch = unit(rng_) * cfg_.plug_rpy_range;
  const double yaw = unit(rng_) * cfg_.plug_rpy_range;
  const Vec3 tip = socket_pose.translation();
  const Vec3 up = socket_pose.rotation().col(2);
  const Pose plug_pose(
      Pose::FromRpyDeg(Vec3::Zero(), roll, pitch, yaw).rotation() *
          socket_pose.rotation(),
      tip + Vec3(dx, dy, 0.0) + up * cfg_.plug_start_height);

  socket_ = scene_->socket.with_base(socket_pose);
  state_ = EpisodeState{};
  state_.plug = plug_pose;
  state_.socket = socket_pose;
  state_.penetration = penetration_depth(scene_->samples, plug_pose, socket_);
  return observe(level);
}

StepResult InsertionEnv::step(const Twist& action, const NoiseLevel& level) {
  if (state_.terminal()) {
    throw SteppedTerminalEpisode("step called on a finished episode");
  }
  StepResult out;
  out.applied = clamp_action(action, cfg_);
  const Pose candidate = apply_twist(state_.plug, out.applied);
  const ContactResult contact =
      resolve_contact(scene_->samples, socket_, state_.plug, candidate,
                      cfg_.penetration_allowance, cfg_.bisection_iterations);

  state_.plug = contact.pose;
  state_.penetration = contact.penetration;
  state_.cumulative_penetration += contact.penetration;
  ++state_.step_count;

  out.penetration = contact.penetration;
  out.success = check_success(state_.plug, goal(), cfg_.success_tr,
                              cfg_.success_rot, contact.penetration,
                              cfg_.penetration_allowance);
  double reward = 0.0;
  if (out.success) reward += cfg_.reward_success;
  if (contact.penetration > 0.0) {
    reward -= cfg_.penalty_penetration * contact.penetration;
  }
  out.reward = reward;
  if (out.success) {
    state_.outcome = Outcome::kSuccess;
  } else if (state_.step_count >= cfg_.horizon) {
    state_.outcome = Outcome::kTimeout;
  }
  out.done = state_.terminal();
  out.obs = observe(level);
  return out;
}

std::string trace_csv_header() {
  std::string h = "step";
  const char* axes[] = {"x", "y", "z"};
  for (const char* prefix : {"true", "obs"}) {
    for (const char* a : axes) h += std::string(",") + prefix + "_t" + a;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        h += std::string(",") + prefix + "_r" + std::to_string(r) +
             std::to_string(c);
      }
    }
  }
  for (const char* prefix : {"pf", "rl", "total"}) {
    for (const char* a : axes) h += std::string(",") + prefix + "_d" + a;
    for (const char* a : axes) h += std::string(",") + prefix + "_r" + a;
  }
  h += ",reward,penetration,done";
  return h;
}

namespace {

void put_pose(std::ostream& os, const Pose& p) {
  for (int i = 0; i < 3; ++i) os << ',' << format_double(p.translation()[i]);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) os << ',' << format_double(p.rotation()(r, c));
  }
}

void put_twist(std::ostream& os, const Twist& t) {
  for (int i = 0; i < 3; ++i) os << ',' << format_double(t.translation[i]);
  for (int i = 0; i < 3; ++i) os << ',' << format_double(t.rotation_deg[i]);
}

}  // namespace

void write_trace_csv(std::ostream& os, std::span<const TraceRow> rows) {
  os << trace_csv_header() << '\n';
  for (const TraceRow& row : rows) {
    os << row.step;
    put_pose(os, row.true_plug);
    put_pose(os, row.observed_plug);
    put_twist(os, row.a_pf);
    put_twist(os, row.a_rl);
    put_twist(os, row.a_total);
    os << ',' << format_double(row.reward) << ','
       << format_double(row.penetration) << ',' << (row.done ? 1 : 0) << '\n';
  }
}

}  // namespace pfrl
