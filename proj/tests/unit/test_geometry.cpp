#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "pfrl/errors.hpp"
#include "pfrl/geometry.hpp"
#include "pfrl/scene.hpp"

namespace pfrl {
namespace {

SocketModel deep_round_socket() {
  // Cavity radius 25 mm, deep enough that mid-depth is wall-limited.
  return SocketModel(CrossSection::Circle(24.0), 2.0, 60.0, 100.0, 100.0, 10.0);
}

TEST(SocketSdf, AxisAtMidDepthIsCavityRadius) {
  const SocketModel s = deep_round_socket();
  EXPECT_NEAR(socket_sdf(s, Vec3(0, 0, -30)), 25.0, 1e-12);
}

TEST(SocketSdf, ZeroOnCavityWall) {
  const SocketModel s = deep_round_socket();
  EXPECT_NEAR(socket_sdf(s, Vec3(25, 0, -30)), 0.0, 1e-9);
  EXPECT_NEAR(socket_sdf(s, Vec3(0, -25, -10)), 0.0, 1e-9);
}

TEST(SocketSdf, FollowsBasePose) {
  const Pose base = Pose::FromRpyDeg(Vec3(10, -20, 5), 0, 0, 30);
  const SocketModel s = deep_round_socket().with_base(base);
  EXPECT_NEAR(s.sdf(base * Vec3(0, 0, -30)), 25.0, 1e-9);
}

TEST(SocketSdf, MatchesDenseSurfaceSamples) {
  const SceneSpec spec = catalog_scene("small_round_8");
  const SocketModel socket = make_socket(spec);
  const double r = 0.5 * (spec.plug_dims[0] + spec.tolerance);
  const auto cloud = oracle::round_socket_surface(
      r, spec.cavity_depth, spec.floor_thickness, 0.5 * spec.outer_x,
      0.5 * spec.outer_y, 0.085);
  ASSERT_LE(cloud.size(), 1'000'000u);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> xy(-25.0, 25.0), z(-25.0, 5.0);
  std::uniform_real_distribution<double> near(-6.0, 6.0);
  for (int i = 0; i < 60; ++i) {
    // Half the queries in the block's neighbourhood, half near the cavity.
    const Vec3 p = i % 2 ? Vec3(xy(rng), xy(rng), z(rng))
                         : Vec3(near(rng), near(rng), z(rng));
    const double d = socket.local_sdf(p);
    EXPECT_NEAR(std::abs(d), oracle::min_distance(cloud, p), 0.1)
        << p.transpose();
  }
}

TEST(SocketSdf, IsOneLipschitz) {
  const SocketModel socket = make_socket(catalog_scene("easy_box"));
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-70.0, 70.0);
  std::uniform_real_distribution<double> step(-3.0, 3.0);
  for (int i = 0; i < 10000; ++i) {
    const Vec3 a(u(rng), u(rng), u(rng) * 0.5);
    const Vec3 b = i % 2 ? Vec3(u(rng), u(rng), u(rng) * 0.5)
                         : Vec3(a + Vec3(step(rng), step(rng), step(rng)));
    EXPECT_LE(std::abs(socket.local_sdf(a) - socket.local_sdf(b)),
              (a - b).norm() + 1e-9);
  }
}

TEST(SocketModel, RejectsBadDimensions) {
  EXPECT_THROW(SocketModel(CrossSection::Circle(10), 0.0, 10, 50, 50, 5),
               InvalidArgument);
  EXPECT_THROW(SocketModel(CrossSection::Circle(30), 1.0, 10, 50, 50, 5),
               InvalidArgument);
}

TEST(SocketModel, GoalPoseIsPenetrationFree) {
  for (const SceneSpec& spec : scene_catalog()) {
    const Scene scene(spec, 1000);
    EXPECT_EQ(penetration_depth(scene.samples, scene.socket.goal_pose(),
                                scene.socket),
              0.0)
        << spec.name;
  }
}

TEST(SampleSurface, SmallBoxIncludesBottomCorners) {
  const PlugModel plug(CrossSection::Rectangle(20, 10), 30);
  const auto s = sample_surface(plug, 8, 1);
  ASSERT_EQ(s.size(), 8u);
  for (const Vec3& corner : {Vec3(10, 5, 0), Vec3(-10, 5, 0), Vec3(-10, -5, 0),
                             Vec3(10, -5, 0)}) {
    const bool found = std::any_of(s.begin(), s.end(), [&](const Vec3& p) {
      return (p - corner).norm() < 1e-12;
    });
    EXPECT_TRUE(found) << corner.transpose();
  }
}

TEST(SampleSurface, PointsLieOnTheSurface) {
  for (const char* name : {"easy_cylinder", "easy_box", "easy_triangle"}) {
    const PlugModel plug = make_plug(catalog_scene(name));
    for (const Vec3& p : sample_surface(plug, 1000, 3)) {
      EXPECT_LT(std::abs(plug.sdf(p)), 1e-6) << name;
    }
  }
}

TEST(SampleSurface, FaceCountsFollowArea) {
  for (const char* name : {"easy_cylinder", "easy_box", "easy_triangle"}) {
    const PlugModel plug = make_plug(catalog_scene(name));
    const double h = plug.height();
    const auto s = sample_surface(plug, 1000, 5);
    int bottom = 0, top = 0, side = 0;
    for (const Vec3& p : s) {
      if (p.z() == h) {
        ++top;
      } else if (p.z() == 0.0 && plug.section().sdf(p.head<2>()) < -1e-9) {
        ++bottom;
      } else {
        ++side;
      }
    }
    const double cap = plug.section().area();
    const double wall = plug.section().perimeter() * h;
    const double total = 2.0 * cap + wall;
    const double n = static_cast<double>(s.size());
    EXPECT_NEAR(bottom / (n * cap / total), 1.0, 0.2) << name;
    EXPECT_NEAR(top / (n * cap / total), 1.0, 0.2) << name;
    EXPECT_NEAR(side / (n * wall / total), 1.0, 0.2) << name;
  }
}

TEST(SampleSurface, DeterministicForSeed) {
  const PlugModel plug = make_plug(catalog_scene("easy_triangle"));
  EXPECT_EQ(sample_surface(plug, 500, 9), sample_surface(plug, 500, 9));
  EXPECT_THROW(sample_surface(plug, 3, 9), InvalidArgument);
}

TEST(ClosestPair, CentredPlugSeesUniformGap) {
  const Scene scene(catalog_scene("easy_cylinder"), 1000);
  const Pose pose =
      scene.socket.goal_pose() * Pose::FromTranslation(Vec3(0, 0, 5));
  const ClosestPair c = closest_pair(scene.samples, pose, scene.socket);
  EXPECT_NEAR(c.distance, 1.0, 0.05);
  EXPECT_EQ(penetration_depth(scene.samples, pose, scene.socket), 0.0);
}

TEST(ClosestPair, TouchingWallGivesZero) {
  const Scene scene(catalog_scene("easy_cylinder"), 1000);
  const Pose pose =
      scene.socket.goal_pose() * Pose::FromTranslation(Vec3(1.0, 0, 5));
  EXPECT_NEAR(closest_pair(scene.samples, pose, scene.socket).distance, 0.0,
              0.05);
}

TEST(ClosestPair, WitnessPointsAreConsistent) {
  const Scene scene(catalog_scene("easy_box"), 1000);
  const Pose pose = Pose::FromRpyDeg(Vec3(3, -2, 4), 2, -1, 3);
  const ClosestPair c = closest_pair(scene.samples, pose, scene.socket);
  EXPECT_NEAR((c.plug_point - c.socket_point).norm(), c.distance, 1e-6);
  EXPECT_NEAR(scene.socket.sdf(c.socket_point), 0.0, 1e-6);
}

TEST(ClosestPair, MatchesDenseOracle) {
  const SceneSpec spec = catalog_scene("easy_cylinder");
  const Scene scene(spec, 1000);
  const auto dense =
      oracle::random_cylinder_surface(25.0, spec.plug_height, 100000, 77);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> off(-3.0, 3.0), z(-8.0, 8.0),
      tilt(-3.0, 3.0);
  for (int i = 0; i < 20; ++i) {
    const Pose pose = Pose::FromRpyDeg(Vec3(off(rng), off(rng), z(rng)),
                                       tilt(rng), tilt(rng), tilt(rng));
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& p : dense) best = std::min(best, scene.socket.sdf(pose * p));
    EXPECT_NEAR(closest_pair(scene.samples, pose, scene.socket).distance,
                std::max(best, 0.0), 0.2);
  }
}

TEST(ClosestPair, DistanceShrinksAlongWitnessDirection) {
  const Scene scene(catalog_scene("easy_box"), 1000);
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> off(-0.8, 0.8), z(-15.0, 10.0),
      tilt(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    Pose pose = Pose::FromRpyDeg(Vec3(off(rng), off(rng), z(rng)), tilt(rng),
                                 tilt(rng), tilt(rng));
    ClosestPair c = closest_pair(scene.samples, pose, scene.socket);
    const Vec3 toward = -c.normal;
    for (int k = 0; k < 10 && c.distance > 0.0; ++k) {
      pose = Pose(pose.rotation(), pose.translation() + 0.1 * toward);
      const ClosestPair next = closest_pair(scene.samples, pose, scene.socket);
      EXPECT_LE(next.distance, c.distance + 1e-9);
      c = next;
    }
  }
}

TEST(ClosestPair, DegenerateWhenBuriedInMaterial) {
  const SocketModel block(CrossSection::Circle(10.0), 1.0, 10.0, 400.0, 400.0,
                          300.0);
  const PlugModel plug(CrossSection::Circle(10.0), 20.0);
  const Pose buried = Pose::FromTranslation(Vec3(0, 0, -150));
  EXPECT_THROW(closest_pair(plug, buried, block, 200, 1), DegenerateGeometry);
}

TEST(Penetration, ZeroWhenCentredOrAbove) {
  const Scene scene(catalog_scene("easy_cylinder"), 1000);
  EXPECT_EQ(penetration_depth(scene.samples, scene.socket.goal_pose(),
                              scene.socket),
            0.0);
  EXPECT_EQ(penetration_depth(scene.samples,
                              Pose::FromTranslation(Vec3(0, 0, 10)),
                              scene.socket),
            0.0);
}

TEST(Penetration, LoweredOntoTopFaceMatchesPlaneOverlap) {
  const Scene scene(catalog_scene("easy_cylinder"), 1000);
  // Far enough sideways that the lowest points rest on the flat top face.
  const Pose pose = Pose::FromTranslation(Vec3(30, 0, -0.5));
  EXPECT_NEAR(penetration_depth(scene.samples, pose, scene.socket), 0.5, 0.05);
}

TEST(Penetration, ZeroIffPositiveDistance) {
  const Scene scene(catalog_scene("easy_triangle"), 1000);
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> off(-2.0, 2.0), z(-10.0, 5.0),
      tilt(-4.0, 4.0);
  for (int i = 0; i < 200; ++i) {
    const Pose pose = Pose::FromRpyDeg(Vec3(off(rng), off(rng), z(rng)),
                                       tilt(rng), tilt(rng), tilt(rng));
    const double pen = penetration_depth(scene.samples, pose, scene.socket);
    const ClosestPair c = closest_pair(scene.samples, pose, scene.socket);
    if (c.signed_distance == 0.0) continue;  // exact contact
    EXPECT_EQ(pen == 0.0, c.distance > 0.0);
  }
}

TEST(MedialAnchors, TwoAnchorsAreEndpoints) {
  const SocketModel s = make_socket(catalog_scene("easy_cylinder"));
  const AnchorPath path = medial_anchor_path(s, 10.0, 2);
  ASSERT_EQ(path.size(), 2u);
  EXPECT_EQ(path.anchors[1], s.goal_pose());
  EXPECT_LT((path.anchors[0].translation() - Vec3(0, 0, 10)).norm(), 1e-12);
}

TEST(MedialAnchors, UniformSpacing) {
  const Pose base = Pose::FromRpyDeg(Vec3(40, -30, 12), 0, 0, 4);
  const SocketModel s = make_socket(catalog_scene("easy_cylinder")).with_base(base);
  const AnchorPath path = medial_anchor_path(s, 10.0, 30);
  ASSERT_EQ(path.size(), 30u);
  const double spacing = (25.0 + 10.0) / 29.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    EXPECT_NEAR((path.anchors[i].translation() -
                 path.anchors[i - 1].translation()).norm(),
                spacing, 1e-9);
    EXPECT_EQ(path.anchors[i].rotation(), s.goal_pose().rotation());
  }
}

TEST(MedialAnchors, EquidistantFromOpposingBoxWalls) {
  const Pose base = Pose::FromRpyDeg(Vec3(-17, 8, 3), 0, 0, -3.5);
  const SocketModel s = make_socket(catalog_scene("medium_box")).with_base(base);
  const double half = 0.5 * (50.0 + 1.0);
  for (const Pose& a : medial_anchor_path(s, 10.0, 30).anchors) {
    const Vec3 local = base.inverse() * a.translation();
    EXPECT_NEAR(half - local.x(), half + local.x(), 1e-9);
    EXPECT_NEAR(half - local.y(), half + local.y(), 1e-9);
  }
}

TEST(MedialAnchors, RejectsBadArguments) {
  const SocketModel s = make_socket(catalog_scene("easy_cylinder"));
  EXPECT_THROW(medial_anchor_path(s, 10.0, 1), InvalidArgument);
  EXPECT_THROW(medial_anchor_path(s, 0.0, 5), InvalidArgument);
}

}  // namespace
}  // namespace pfrl
