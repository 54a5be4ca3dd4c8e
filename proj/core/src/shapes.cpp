#include "pfrl/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pfrl/errors.hpp"

namespace pfrl {

std::string_view primitive_name(Primitive p) {
  switch (p) {
    case Primitive::kCylinder:
      return "cylinder";
    case Primitive::kBox:
      return "box";
    case Primitive::kTriangularPrism:
      return "triangular_prism";
  }
  return "unknown";
}

Primitive parse_primitive(std::string_view name) {
  if (name == "cylinder") return Primitive::kCylinder;
  if (name == "box") return Primitive::kBox;
  if (name == "triangular_prism" || name == "triangle") {
    return Primitive::kTriangularPrism;
  }
  throw InvalidArgument("unknown primitive '" + std::string(name) + "'");
}

CrossSection CrossSection::Circle(double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("circle radius must be > 0");
  CrossSection c;
  c.primitive_ = Primitive::kCylinder;
  c.radius_ = radius;
  c.dims_ = {2.0 * radius};
  return c;
}

CrossSection CrossSection::Rectangle(double width_x, double width_y) {
  if (!(width_x > 0.0) || !(width_y > 0.0)) {
    throw InvalidArgument("rectangle widths must be > 0");
  }
  CrossSection c;
  c.primitive_ = Primitive::kBox;
  c.dims_ = {width_x, width_y};
  const double hx = 0.5 * width_x, hy = 0.5 * width_y;
  c.vertices_ = {{-hx, -hy}, {hx, -hy}, {hx, hy}, {-hx, hy}};
  c.finish_polygon();
  return c;
}

CrossSection CrossSection::Triangle(double side) {
  if (!(side > 0.0)) throw InvalidArgument("triangle side must be > 0");
  CrossSection c;
  c.primitive_ = Primitive::kTriangularPrism;
  c.dims_ = {side};
  const double circumradius = side / std::sqrt(3.0);
  for (int i = 0; i < 3; ++i) {
    const double a = std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * i / 3.0;
    c.vertices_.emplace_back(circumradius * std::cos(a),
                             circumradius * std::sin(a));
  }
  c.finish_polygon();
  return c;
}

void CrossSection::finish_polygon() {
  const std::size_t n = vertices_.size();
  edge_normals_.clear();
  edge_offsets_.clear();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e = vertices_[(i + 1) % n] - vertices_[i];
    const Vec2 normal = Vec2(e.y(), -e.x()).normalized();
    edge_normals_.push_back(normal);
    edge_offsets_.push_back(normal.dot(vertices_[i]));
  }
}

double CrossSection::sdf(const Vec2& q) const {
  if (primitive_ == Primitive::kCylinder) return q.norm() - radius_;
  if (primitive_ == Primitive::kBox) {
    const double hx = 0.5 * dims_[0], hy = 0.5 * dims_[1];
    const Vec2 d(std::abs(q.x()) - hx, std::abs(q.y()) - hy);
    const Vec2 outside = d.cwiseMax(0.0);
    return outside.norm() + std::min(std::max(d.x(), d.y()), 0.0);
  }
  // Convex polygon: interior distance is the nearest supporting line, exterior
  // distance the nearest edge segment.
  double max_line = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    max_line = std::max(max_line, edge_normals_[i].dot(q) - edge_offsets_[i]);
  }
  if (max_line <= 0.0) return max_line;
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = vertices_[i];
    const Vec2 e = vertices_[(i + 1) % n] - a;
    const double t = std::clamp((q - a).dot(e) / e.squaredNorm(), 0.0, 1.0);
    best = std::min(best, (q - a - t * e).norm());
  }
  return best;
}

double CrossSection::area() const {
  if (primitive_ == Primitive::kCylinder) {
    return std::numbers::pi * radius_ * radius_;
  }
  double twice = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = vertices_[i];
    const Vec2& b = vertices_[(i + 1) % n];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * twice;
}

double CrossSection::perimeter() const {
  if (primitive_ == Primitive::kCylinder) {
    return 2.0 * std::numbers::pi * radius_;
  }
  double total = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    total += (vertices_[(i + 1) % n] - vertices_[i]).norm();
  }
  return total;
}

Vec2 CrossSection::boundary_point(double s) const {
  const double p = perimeter();
  s = std::fmod(s, p);
  if (s < 0.0) s += p;
  if (primitive_ == Primitive::kCylinder) {
    const double a = s / radius_;
    return {radius_ * std::cos(a), radius_ * std::sin(a)};
  }
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = vertices_[i];
    const Vec2 e = vertices_[(i + 1) % n] - a;
    const double len = e.norm();
    if (s <= len || i + 1 == n) return a + e * (std::min(s, len) / len);
    s -= len;
  }
  return vertices_.front();
}

double CrossSection::bounding_radius() const {
  if (primitive_ == Primitive::kCylinder) return radius_;
  double r = 0.0;
  for (const Vec2& v : vertices_) r = std::max(r, v.cwiseAbs().maxCoeff());
  return r;
}

CrossSection CrossSection::grown(double gap) const {
  switch (primitive_) {
    case Primitive::kCylinder:
      return Circle(radius_ + gap);
    case Primitive::kBox:
      return Rectangle(dims_[0] + 2.0 * gap, dims_[1] + 2.0 * gap);
    case Primitive::kTriangularPrism:
      // Offsetting every edge by `gap` grows the inradius by `gap`.
      return Triangle(dims_[0] + 2.0 * std::sqrt(3.0) * gap);
  }
  return *this;
}

}  // namespace pfrl
