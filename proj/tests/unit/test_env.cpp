#include <gtest/gtest.h>

#include <memory>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "pfrl/env.hpp"
#include "pfrl/errors.hpp"
#include "pfrl/potential_field.hpp"

namespace pfrl {
namespace {

std::shared_ptr<const Scene> easy() {
  static const auto scene =
      std::make_shared<const Scene>(catalog_scene("easy_cylinder"), 1000);
  return scene;
}

// Socket at the nominal pose and the plug straight above the tip.
EnvConfig fixed_start() {
  EnvConfig c;
  c.socket_xy_range = c.socket_z_range = c.socket_yaw_range = 0.0;
  c.plug_xy_range = c.plug_rpy_range = 0.0;
  return c;
}

Vec3 rpy_of(const Mat3& r) {
  return Vec3(std::atan2(r(2, 1), r(2, 2)), -std::asin(r(2, 0)),
              std::atan2(r(1, 0), r(0, 0))) *
         180.0 / M_PI;
}

TEST(Reset, SocketOffsetsAreUniform) {
  InsertionEnv env(easy(), EnvConfig{});
  std::vector<double> xs;
  for (int i = 0; i < 10000; ++i) {
    env.reset(NoiseLevel::None(), 500000 + i);
    xs.push_back(env.state().socket.translation().x());
  }
  for (double x : xs) {
    EXPECT_GE(x, -100.0);
    EXPECT_LE(x, 100.0);
  }
  EXPECT_GT(oracle::ks_uniform_pvalue(xs, -100.0, 100.0), 0.01);
}

TEST(Reset, PlugStartsAboveTip) {
  InsertionEnv env(easy(), EnvConfig{});
  for (int i = 0; i < 50; ++i) {
    env.reset(NoiseLevel::None(), i);
    // Lateral offsets are drawn in the world frame around the tip.
    const Vec3 local =
        env.state().plug.translation() - env.state().socket.translation();
    EXPECT_NEAR(local.z(), 10.0, 1e-9);
    EXPECT_LE(std::abs(local.x()), 10.0 + 1e-9);
    EXPECT_LE(std::abs(local.y()), 10.0 + 1e-9);
  }
}

TEST(Reset, ZeroNoiseObservationIsGroundTruth) {
  InsertionEnv env(easy(), EnvConfig{});
  const Observation obs = env.reset(NoiseLevel::None(), 3);
  EXPECT_EQ(obs.plug, env.state().plug);
  EXPECT_EQ(obs.socket, env.state().socket);
  ASSERT_TRUE(obs.privileged.has_value());
  EXPECT_EQ(obs.privileged->plug, env.state().plug);
}

TEST(Reset, SameSeedSameState) {
  InsertionEnv a(easy(), EnvConfig{}), b(easy(), EnvConfig{});
  a.reset(NoiseLevel::FromPlugLevel(2.0, EnvConfig{}), 99);
  b.reset(NoiseLevel::FromPlugLevel(2.0, EnvConfig{}), 99);
  EXPECT_EQ(a.state(), b.state());
}

TEST(ApplyNoise, ZeroBoundsIsIdentity) {
  Rng rng(1);
  const Pose p = Pose::FromRpyDeg(Vec3(1, 2, 3), 4, 5, 6);
  EXPECT_EQ(apply_noise(p, 0.0, 0.0, rng), p);
}

TEST(ApplyNoise, BoundedCentredAndUniform) {
  Rng rng(2);
  const Pose p = Pose::FromRpyDeg(Vec3(10, -20, 30), 3, -4, 50);
  std::vector<double> axis[6];
  for (int i = 0; i < 100000; ++i) {
    const Pose q = apply_noise(p, 5.0, 5.0, rng);
    const Vec3 dt = q.translation() - p.translation();
    const Vec3 dr = rpy_of(q.rotation() * p.rotation().transpose());
    for (int k = 0; k < 3; ++k) {
      axis[k].push_back(dt[k]);
      axis[3 + k].push_back(dr[k]);
    }
  }
  for (int k = 0; k < 6; ++k) {
    double mean = 0.0;
    for (double v : axis[k]) {
      EXPECT_LE(std::abs(v), 5.0 + 1e-9);
      mean += v;
    }
    mean /= static_cast<double>(axis[k].size());
    EXPECT_LT(std::abs(mean), 0.1) << "axis " << k;
    EXPECT_GT(oracle::ks_uniform_pvalue(axis[k], -5.0, 5.0), 0.01)
        << "axis " << k;
  }
}

TEST(ApplyNoise, FreshDrawsEveryCall) {
  Rng rng(3);
  const Pose p;
  EXPECT_FALSE(apply_noise(p, 1.0, 1.0, rng) == apply_noise(p, 1.0, 1.0, rng));
}

TEST(Step, SuccessPaysRewardAndTerminates) {
  PFConfig pf;
  pf.w_rot = 0.5;
  InsertionEnv env(easy(), EnvConfig{});
  Observation obs = env.reset(NoiseLevel::None(), 17);
  StepResult r;
  do {
    r = env.step(pf_action(*easy(), obs.plug, obs.socket, pf), NoiseLevel::None());
    obs = r.obs;
  } while (!r.done);
  ASSERT_TRUE(r.success);
  EXPECT_EQ(env.state().outcome, Outcome::kSuccess);
  EXPECT_EQ(r.reward, 1.0 - EnvConfig{}.penalty_penetration * r.penetration);
  EXPECT_THROW(env.step(Twist::Zero(), NoiseLevel::None()),
               SteppedTerminalEpisode);
}

TEST(Step, FaceOverlapIsPenalised) {
  const EnvConfig cfg = fixed_start();
  InsertionEnv env(easy(), cfg);
  env.reset(NoiseLevel::None(), 1);
  for (int i = 0; i < 15; ++i) env.step({Vec3(2, 0, 0), Vec3::Zero()}, {});
  for (int i = 0; i < 5; ++i) {
    const StepResult r = env.step({Vec3(0, 0, -2), Vec3::Zero()}, {});
    ASSERT_EQ(r.reward, 0.0);
  }
  ASSERT_NEAR(env.state().plug.translation().z(), 0.0, 1e-9);
  const StepResult r = env.step({Vec3(0, 0, -0.5), Vec3::Zero()}, {});
  EXPECT_NEAR(r.penetration, 0.5, 1e-9);
  EXPECT_NEAR(r.reward, -cfg.penalty_penetration * 0.5, 1e-12);
  EXPECT_FALSE(r.done);
}

TEST(Step, TimesOutAtHorizon) {
  InsertionEnv env(easy(), EnvConfig{});
  env.reset(NoiseLevel::None(), 5);
  StepResult r;
  for (int i = 0; i < 256; ++i) {
    ASSERT_FALSE(env.state().terminal());
    r = env.step(Twist::Zero(), NoiseLevel::None());
  }
  EXPECT_TRUE(r.done);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(env.state().outcome, Outcome::kTimeout);
  EXPECT_EQ(env.state().step_count, 256);
}

TEST(Step, ClampsActionsPerAxis) {
  InsertionEnv env(easy(), fixed_start());
  env.reset(NoiseLevel::None(), 1);
  const StepResult r = env.step({Vec3(5, -0.5, -9), Vec3(3, -3, 0.1)}, {});
  EXPECT_EQ(r.applied.translation, Vec3(2, -0.5, -2));
  EXPECT_EQ(r.applied.rotation_deg, Vec3(2, -2, 0.1));
}

TEST(ResolveContact, FreeSpaceUnchanged) {
  const Scene& s = *easy();
  const Pose from = Pose::FromTranslation(Vec3(0, 0, 20));
  const Pose to = Pose::FromTranslation(Vec3(0.5, 0, 18));
  const ContactResult c = resolve_contact(s.samples, s.socket, from, to, 1.0);
  EXPECT_EQ(c.pose, to);
  EXPECT_EQ(c.penetration, 0.0);
}

TEST(ResolveContact, BisectsDownIntoFace) {
  const Scene& s = *easy();
  const Pose from = Pose::FromTranslation(Vec3(30, 0, 0.5));
  const Pose to = Pose::FromTranslation(Vec3(30, 0, -1.5));
  const ContactResult c = resolve_contact(s.samples, s.socket, from, to, 1.0);
  EXPECT_LE(c.penetration, 1.0 + 1e-3);
  // Analytic face height: the bottom stops one allowance below z = 0.
  EXPECT_NEAR(c.pose.translation().z(), -1.0, 1e-3);
  EXPECT_EQ(c.pose.rotation(), to.rotation());
}

TEST(ResolveContact, AllowanceIsInclusive) {
  const Scene& s = *easy();
  const Pose from = Pose::FromTranslation(Vec3(30, 0, 0));
  const Pose to = Pose::FromTranslation(Vec3(30, 0, -1.0));
  const ContactResult c = resolve_contact(s.samples, s.socket, from, to, 1.0);
  EXPECT_EQ(c.pose, to);
  EXPECT_EQ(c.penetration, 1.0);
}

TEST(CheckSuccess, Predicates) {
  const Pose goal = Pose::FromRpyDeg(Vec3(1, 2, 3), 0, 0, 10);
  EXPECT_TRUE(check_success(goal, goal, 1.0, 2.0));
  const Pose off(goal.rotation(), goal.translation() + Vec3(1.01, 0, 0));
  EXPECT_FALSE(check_success(off, goal, 1.0, 2.0));

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> t(-1.5, 1.5), a(-3.0, 3.0),
      pen(0.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const Pose p = goal * Pose::FromRpyDeg(Vec3(t(rng), t(rng), t(rng)), a(rng),
                                           a(rng), a(rng));
    const double penetration = pen(rng);
    const double dt = (p.translation() - goal.translation()).norm();
    const Mat3 rel = p.rotation() * goal.rotation().transpose();
    const double angle =
        std::acos(std::clamp((rel.trace() - 1.0) / 2.0, -1.0, 1.0)) * 180.0 / M_PI;
    const bool expected = dt <= 1.0 && angle <= 2.0 && penetration <= 1.0;
    EXPECT_EQ(check_success(p, goal, 1.0, 2.0, penetration, 1.0), expected);
  }
}

TEST(Invariants, SparseRewardSocketFixedAndDeterministic) {
  PFConfig pf;
  pf.w_rot = 0.5;
  const NoiseLevel level = NoiseLevel::FromPlugLevel(3.0, EnvConfig{});
  for (int ep = 0; ep < 20; ++ep) {
    InsertionEnv a(easy(), EnvConfig{}), b(easy(), EnvConfig{});
    Observation oa = a.reset(level, 40 + ep);
    Observation ob = b.reset(level, 40 + ep);
    const Pose socket = a.state().socket;
    Pose last_obs = oa.plug;
    while (!a.state().terminal()) {
      const Twist act = pf_action(*easy(), oa.plug, oa.socket, pf);
      const StepResult ra = a.step(act, level);
      const StepResult rb = b.step(act, level);
      EXPECT_EQ(a.state(), b.state());
      EXPECT_EQ(ra.obs.plug, rb.obs.plug);
      EXPECT_EQ(a.state().socket, socket);
      EXPECT_LE(ra.penetration, EnvConfig{}.penetration_allowance + 1e-3);
      if (!ra.success && ra.penetration == 0.0) EXPECT_EQ(ra.reward, 0.0);
      EXPECT_FALSE(ra.obs.plug == last_obs);
      last_obs = ra.obs.plug;
      oa = ra.obs;
    }
  }
}

TEST(EnvConfig, SuccessToleranceBelowClearance) {
  EnvConfig c;
  c.success_tr = 2.0;
  EXPECT_THROW(c.validate(catalog_scene("easy_cylinder")), InvalidArgument);
  c.success_tr = 0.2;
  EXPECT_NO_THROW(c.validate(catalog_scene("small_round_8")));
  c.horizon = 0;
  EXPECT_THROW(c.validate(catalog_scene("easy_cylinder")), InvalidArgument);
}

TEST(Trace, CsvHasOneColumnPerField) {
  TraceRow row;
  row.step = 3;
  std::ostringstream os;
  write_trace_csv(os, std::vector<TraceRow>{row});
  std::istringstream is(os.str());
  std::string header, line;
  std::getline(is, header);
  std::getline(is, line);
  const auto commas = [](const std::string& s) {
    return std::count(s.begin(), s.end(), ',');
  };
  EXPECT_EQ(commas(header), 1 + 12 + 12 + 18 + 3 - 1);
  EXPECT_EQ(commas(line), commas(header));
}

}  // namespace
}  // namespace pfrl
