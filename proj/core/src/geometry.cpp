#include "pfrl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "pfrl/errors.hpp"

namespace pfrl {
namespace {

constexpr double kNormalStep = 1e-6;

// R2 low-discrepancy sequence (generalised golden ratio in 2D).
constexpr double kR2a = 0.7548776662466927;
constexpr double kR2b = 0.5698402909980532;

double frac(double x) { return x - std::floor(x); }

struct SequenceShift {
  double u, v;
};

SequenceShift draw_shift(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  return {u, unit(rng)};
}

// Points strictly inside the planar section, from a shifted R2 sequence.
void fill_face(const CrossSection& section, double z, int count,
               SequenceShift shift, std::vector<Vec3>& out) {
  const double r = section.bounding_radius();
  for (long n = 1; count > 0; ++n) {
    const double u = frac(shift.u + n * kR2a);
    const double v = frac(shift.v + n * kR2b);
    const Vec2 q((2.0 * u - 1.0) * r, (2.0 * v - 1.0) * r);
    if (section.sdf(q) < 0.0) {
      out.emplace_back(q.x(), q.y(), z);
      --count;
    }
  }
}

}  // namespace

PlugModel::PlugModel(CrossSection section, double height)
    : section_(std::move(section)), height_(height) {
  if (!(height > 0.0)) throw InvalidArgument("plug height must be > 0");
}

double PlugModel::sdf(const Vec3& p) const {
  const double d2 = section_.sdf(p.head<2>());
  const double dz = std::max(-p.z(), p.z() - height_);
  if (d2 <= 0.0 && dz <= 0.0) return std::max(d2, dz);
  return std::hypot(std::max(d2, 0.0), std::max(dz, 0.0));
}

SocketModel::SocketModel(const CrossSection& plug_section, double tolerance,
                         double depth, double outer_x, double outer_y,
                         double floor_thickness, Pose base)
    : cavity_(plug_section),
      tolerance_(tolerance),
      depth_(depth),
      outer_x_(outer_x),
      outer_y_(outer_y),
      floor_(floor_thickness),
      base_(base),
      base_inv_(base.inverse()) {
  if (!(tolerance > 0.0)) throw InvalidArgument("socket tolerance must be > 0");
  if (!(depth > 0.0) || !(floor_thickness > 0.0)) {
    throw InvalidArgument("socket depth and floor must be > 0");
  }
  cavity_ = plug_section.grown(0.5 * tolerance);
  if (cavity_.bounding_radius() >= 0.5 * std::min(outer_x, outer_y)) {
    throw InvalidArgument("cavity does not fit inside the outer block");
  }
}

SocketModel SocketModel::with_base(const Pose& base) const {
  SocketModel copy = *this;
  copy.base_ = base;
  copy.base_inv_ = base.inverse();
  return copy;
}

Pose SocketModel::goal_pose() const {
  return base_ * Pose::FromTranslation(Vec3(0.0, 0.0, -depth_));
}

double SocketModel::local_sdf(const Vec3& p) const {
  const Vec2 q = p.head<2>();
  const double z = p.z();
  const double bottom = -(depth_ + floor_);
  const double hx = 0.5 * outer_x_, hy = 0.5 * outer_y_;

  const Vec2 dq(std::abs(q.x()) - hx, std::abs(q.y()) - hy);
  const double d_outer =
      dq.cwiseMax(0.0).norm() + std::min(std::max(dq.x(), dq.y()), 0.0);
  const double d_cavity = cavity_.sdf(q);

  const bool inside_block = d_outer <= 0.0 && z >= bottom && z <= 0.0;
  const bool inside = inside_block && (z <= -depth_ || d_cavity >= 0.0);

  if (!inside) {
    // Solid = floor slab  U  (outer \ cavity) extruded over the cavity depth.
    const double floor_dz = std::max({bottom - z, z + depth_, 0.0});
    const double to_floor = std::hypot(std::max(d_outer, 0.0), floor_dz);
    double wall_d2 = 0.0;
    if (d_outer > 0.0) {
      wall_d2 = d_outer;
    } else if (d_cavity < 0.0) {
      wall_d2 = -d_cavity;
    }
    const double wall_dz = std::max({-depth_ - z, z, 0.0});
    const double to_wall = std::hypot(wall_d2, wall_dz);
    return std::min(to_floor, to_wall);
  }

  // Inside: distance to the complement (block exterior or cavity column).
  const double to_exterior = std::min({-d_outer, z - bottom, -z});
  const double to_cavity =
      std::hypot(std::max(d_cavity, 0.0), std::max(-depth_ - z, 0.0));
  return -std::min(to_exterior, to_cavity);
}

Vec3 SocketModel::local_normal(const Vec3& p) const {
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    Vec3 a = p, b = p;
    a[i] += kNormalStep;
    b[i] -= kNormalStep;
    g[i] = (local_sdf(a) - local_sdf(b)) / (2.0 * kNormalStep);
  }
  const double n = g.norm();
  if (n == 0.0) return Vec3::UnitZ();
  return g / n;
}

double socket_sdf(const SocketModel& socket, const Vec3& point) {
  return socket.sdf(point);
}

std::vector<Vec3> sample_surface(const PlugModel& plug, int m,
                                 std::uint64_t seed) {
  if (m < 4) throw InvalidArgument("sample_surface: m must be >= 4");
  const CrossSection& section = plug.section();
  const double perimeter = section.perimeter();

  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(m));
  if (section.primitive() == Primitive::kCylinder) {
    for (int j = 0; j < 4; ++j) {
      const Vec2 q = section.boundary_point(perimeter * j / 4.0);
      out.emplace_back(q.x(), q.y(), 0.0);
    }
  } else {
    for (const Vec2& v : section.vertices()) out.emplace_back(v.x(), v.y(), 0.0);
  }
  if (static_cast<int>(out.size()) >= m) {
    out.resize(static_cast<std::size_t>(m));
    return out;
  }

  std::mt19937_64 rng(seed);
  const int rest = m - static_cast<int>(out.size());
  const int n_rim = rest / 10;
  const int n_faces = rest - n_rim;

  const double rim_offset = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  for (int i = 0; i < n_rim; ++i) {
    const Vec2 q = section.boundary_point(perimeter * (rim_offset + i) / n_rim);
    out.emplace_back(q.x(), q.y(), 0.0);
  }

  // Largest-remainder apportionment over bottom, top and side faces.
  const double areas[3] = {section.area(), section.area(),
                           perimeter * plug.height()};
  const double total = areas[0] + areas[1] + areas[2];
  int counts[3];
  double remainders[3];
  int assigned = 0;
  for (int f = 0; f < 3; ++f) {
    const double exact = n_faces * areas[f] / total;
    counts[f] = static_cast<int>(std::floor(exact));
    remainders[f] = exact - counts[f];
    assigned += counts[f];
  }
  while (assigned < n_faces) {
    const int f = static_cast<int>(std::max_element(remainders, remainders + 3) -
                                   remainders);
    ++counts[f];
    remainders[f] = -1.0;
    ++assigned;
  }

  fill_face(section, 0.0, counts[0], draw_shift(rng), out);
  fill_face(section, plug.height(), counts[1], draw_shift(rng), out);

  const SequenceShift side = draw_shift(rng);
  for (long n = 1, left = counts[2]; left > 0; ++n) {
    const double u = frac(side.u + n * kR2a);
    const double v = frac(side.v + n * kR2b);
    if (v <= 0.0) continue;
    const Vec2 q = section.boundary_point(u * perimeter);
    out.emplace_back(q.x(), q.y(), v * plug.height());
    --left;
  }
  return out;
}

ClosestPair closest_pair(std::span<const Vec3> plug_samples,
                         const Pose& plug_pose, const SocketModel& socket) {
  if (plug_samples.empty()) throw InvalidArgument("closest_pair: no samples");
  const Pose to_local = socket.base().inverse() * plug_pose;
  const Mat3& r = to_local.rotation();
  const Vec3& t = to_local.translation();

  double best = std::numeric_limits<double>::infinity();
  Vec3 best_local = Vec3::Zero();
  std::size_t best_index = 0;
  for (std::size_t i = 0; i < plug_samples.size(); ++i) {
    const Vec3 p = r * plug_samples[i] + t;
    const double d = socket.local_sdf(p);
    if (d < best) {
      best = d;
      best_local = p;
      best_index = i;
    }
  }
  // Only worth scanning for the shallowest sample when the minimiser itself
  // is already deeper than the cavity.
  double shallowest = -std::numeric_limits<double>::infinity();
  if (best < -socket.depth()) {
    for (const Vec3& s : plug_samples) {
      shallowest = std::max(shallowest, socket.local_sdf(r * s + t));
    }
    if (shallowest < -socket.depth()) {
      throw DegenerateGeometry(
          "closest_pair: every plug sample penetrates deeper than the cavity");
    }
  }

  const Vec3 normal_local = socket.local_normal(best_local);
  const Vec3 socket_local = best_local - best * normal_local;
  const Pose& base = socket.base();
  return ClosestPair{plug_pose * plug_samples[best_index], base * socket_local,
                     base.rotation() * normal_local, std::max(best, 0.0), best};
}

ClosestPair closest_pair(const PlugModel& plug, const Pose& plug_pose,
                         const SocketModel& socket, int m, std::uint64_t seed) {
  const std::vector<Vec3> samples = sample_surface(plug, m, seed);
  return closest_pair(samples, plug_pose, socket);
}

double penetration_depth(std::span<const Vec3> plug_samples,
                         const Pose& plug_pose, const SocketModel& socket) {
  const Pose to_local = socket.base().inverse() * plug_pose;
  const Mat3& r = to_local.rotation();
  const Vec3& t = to_local.translation();
  double worst = 0.0;
  for (const Vec3& s : plug_samples) {
    worst = std::max(worst, -socket.local_sdf(r * s + t));
  }
  return worst;
}

double penetration_depth(const PlugModel& plug, const Pose& plug_pose,
                         const SocketModel& socket, int m, std::uint64_t seed) {
  const std::vector<Vec3> samples = sample_surface(plug, m, seed);
  return penetration_depth(samples, plug_pose, socket);
}

AnchorPath medial_anchor_path(const SocketModel& socket, double retract_height,
                              int k) {
  if (k < 2) throw InvalidArgument("medial_anchor_path: k must be >= 2");
  if (!(retract_height > 0.0)) {
    throw InvalidArgument("medial_anchor_path: retract height must be > 0");
  }
  const Pose goal = socket.goal_pose();
  const Vec3 axis = socket.base().rotation().col(2);
  const Vec3 top = goal.translation() + axis * (socket.depth() + retract_height);
  const Vec3 span = goal.translation() - top;

  AnchorPath path;
  path.anchors.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k - 1; ++i) {
    const double s = static_cast<double>(i) / (k - 1);
    path.anchors.emplace_back(goal.rotation(), top + span * s);
  }
  path.anchors.push_back(goal);
  return path;
}

}  // namespace pfrl
