#ifndef PFRL_SHAPES_HPP_
#define PFRL_SHAPES_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "pfrl/pose.hpp"

namespace pfrl {

enum class Primitive { kCylinder, kBox, kTriangularPrism };

std::string_view primitive_name(Primitive p);
Primitive parse_primitive(std::string_view name);

// Planar cross-section of a plug or cavity, centered on its centroid.
// Cylinders are a disk of `radius`; boxes and triangular prisms are convex
// polygons (counter-clockwise vertices).
class CrossSection {
 public:
  static CrossSection Circle(double radius);
  static CrossSection Rectangle(double width_x, double width_y);
  // Equilateral triangle with the given side, one vertex on +y.
  static CrossSection Triangle(double side);

  Primitive primitive() const { return primitive_; }
  // Characteristic dimensions as written in configs: {diameter},
  // {width_x, width_y} or {side}.
  const std::vector<double>& dimensions() const { return dims_; }

  // Signed distance in the plane; negative inside.
  double sdf(const Vec2& q) const;
  double area() const;
  double perimeter() const;
  // Point on the boundary at arc length s in [0, perimeter).
  Vec2 boundary_point(double s) const;
  const std::vector<Vec2>& vertices() const { return vertices_; }
  // Half-width of the section's bounding square.
  double bounding_radius() const;

  // Section grown outward by `gap` on every side (uniform clearance).
  CrossSection grown(double gap) const;

 private:
  CrossSection() = default;
  void finish_polygon();

  Primitive primitive_ = Primitive::kCylinder;
  std::vector<double> dims_;
  double radius_ = 0.0;
  std::vector<Vec2> vertices_;
  std::vector<Vec2> edge_normals_;
  std::vector<double> edge_offsets_;
};

}  // namespace pfrl

#endif  // PFRL_SHAPES_HPP_
