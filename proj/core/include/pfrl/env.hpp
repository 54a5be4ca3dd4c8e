#ifndef PFRL_ENV_HPP_
#define PFRL_ENV_HPP_

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pfrl/pose.hpp"
#include "pfrl/scene.hpp"

namespace pfrl {

using Rng = std::mt19937_64;

struct EnvConfig {
  int horizon = 256;

  // Socket randomisation around the scene's nominal base pose.
  double socket_xy_range = 100.0;  // +- mm
  double socket_z_range = 50.0;    // [0, range] mm
  double socket_yaw_range = 5.0;   // +- deg
  // Plug start relative to the socket tip.
  double plug_xy_range = 10.0;     // +- mm
  double plug_rpy_range = 15.0;    // +- deg on roll, pitch and yaw
  double plug_start_height = 10.0; // mm above the tip

  double plug_noise_max = 5.0;    // mm and deg
  double socket_noise_max = 1.0;  // mm and deg

  double reward_success = 1.0;
  double penalty_penetration = 0.01;  // per mm per step
  double success_tr = 1.0;           // mm
  double success_rot = 2.0;          // deg
  double penetration_allowance = 1.0;  // mm
  int bisection_iterations = 20;

  double action_limit_tr = 2.0;   // per-axis, mm
  double action_limit_rot = 2.0;  // per-axis, deg

  void validate(const SceneSpec& scene) const;
};

// Per-step observation noise bounds (uniform, symmetric).
struct NoiseLevel {
  double plug_tr = 0.0;
  double plug_rot = 0.0;
  double socket_tr = 0.0;
  double socket_rot = 0.0;

  static NoiseLevel None() { return {}; }
  // Curriculum level n: plug noise n mm / n deg, socket noise min(n, socket
  // max) so the zero level is noise free and the top level matches training.
  static NoiseLevel FromPlugLevel(double n, const EnvConfig& cfg);
};

struct Privileged {
  Pose plug;
  Pose socket;
};

struct Observation {
  Pose plug;
  Pose socket;
  std::optional<Privileged> privileged;
};

enum class Outcome { kRunning, kSuccess, kTimeout };

struct EpisodeState {
  Pose plug;
  Pose socket;
  int step_count = 0;
  double cumulative_penetration = 0.0;
  double penetration = 0.0;
  Outcome outcome = Outcome::kRunning;

  bool terminal() const { return outcome != Outcome::kRunning; }
  bool operator==(const EpisodeState&) const = default;
};

struct StepResult {
  Observation obs;
  double reward = 0.0;
  bool done = false;
  bool success = false;
  double penetration = 0.0;
  Twist applied;  // action after the per-axis clamp
};

struct ContactResult {
  Pose pose;
  double penetration;
};

Pose apply_noise(const Pose& pose, double max_tr, double max_rot_deg, Rng& rng);

// Per-axis clamp to the environment's action limits.
Twist clamp_action(const Twist& a, const EnvConfig& cfg);

// Quasi-static contact: accept the candidate when its penetration is within
// the allowance, otherwise bisect the translation back towards `from`.
ContactResult resolve_contact(std::span<const Vec3> plug_samples,
                              const SocketModel& socket, const Pose& from,
                              const Pose& candidate, double allowance,
                              int iterations = 20);

bool check_success(const Pose& plug, const Pose& goal, double eps_tr,
                   double eps_rot_deg, double penetration = 0.0,
                   double allowance = std::numeric_limits<double>::infinity());

class InsertionEnv {
 public:
  InsertionEnv(std::shared_ptr<const Scene> scene, EnvConfig cfg);

  Observation reset(const NoiseLevel& level, std::uint64_t seed);
  StepResult step(const Twist& action, const NoiseLevel& level);

  const EpisodeState& state() const { return state_; }
  const Scene& scene() const { return *scene_; }
  const EnvConfig& config() const { return cfg_; }
  // Socket model at the true socket pose of the current episode.
  const SocketModel& socket() const { return socket_; }
  Pose goal() const { return socket_.goal_pose(); }

 private:
  Observation observe(const NoiseLevel& level);

  std::shared_ptr<const Scene> scene_;
  EnvConfig cfg_;
  SocketModel socket_;
  EpisodeState state_;
  Rng rng_;
};

// One row of an episode trace: 12-value poses are translation then the
// row-major rotation matrix.
struct TraceRow {
  int step = 0;
  Pose true_plug;
  Pose observed_plug;
  Twist a_pf;
  Twist a_rl;
  Twist a_total;
  double reward = 0.0;
  double penetration = 0.0;
  bool done = false;
};

std::string trace_csv_header();
void write_trace_csv(std::ostream& os, std::span<const TraceRow> rows);

}  // namespace pfrl

#endif  // PFRL_ENV_HPP_
