#include "pfrl/scene.hpp"

#include <cmath>
#include <numbers>

#include "pfrl/errors.hpp"

namespace pfrl {

CrossSection make_section(Primitive primitive, const std::vector<double>& dims) {
  switch (primitive) {
    case Primitive::kCylinder:
      if (dims.size() != 1) throw InvalidArgument("cylinder needs {diameter}");
      return CrossSection::Circle(0.5 * dims[0]);
    case Primitive::kBox:
      if (dims.size() == 1) return CrossSection::Rectangle(dims[0], dims[0]);
      if (dims.size() != 2) throw InvalidArgument("box needs {width_x, width_y}");
      return CrossSection::Rectangle(dims[0], dims[1]);
    case Primitive::kTriangularPrism:
      if (dims.size() != 1) throw InvalidArgument("triangular_prism needs {side}");
      return CrossSection::Triangle(dims[0]);
  }
  throw InvalidArgument("unknown primitive");
}

PlugModel make_plug(const SceneSpec& spec) {
  return PlugModel(make_section(spec.primitive, spec.plug_dims),
                   spec.plug_height);
}

SocketModel make_socket(const SceneSpec& spec) {
  return SocketModel(make_section(spec.primitive, spec.plug_dims),
                     spec.tolerance, spec.cavity_depth, spec.outer_x,
                     spec.outer_y, spec.floor_thickness, spec.base);
}

nlohmann::json pose_to_json(const Pose& p) {
  const Vec3 ypr = p.rotation().eulerAngles(2, 1, 0) * (180.0 / std::numbers::pi);
  return {{"translation", {p.translation().x(), p.translation().y(),
                           p.translation().z()}},
          {"rpy_deg", {ypr[2], ypr[1], ypr[0]}}};
}

Pose pose_from_json(const nlohmann::json& j) {
  Vec3 t = Vec3::Zero();
  Vec3 rpy = Vec3::Zero();
  if (j.contains("translation")) {
    const auto v = j.at("translation").get<std::vector<double>>();
    if (v.size() != 3) throw ConfigError("pose translation needs 3 values");
    t = Vec3(v[0], v[1], v[2]);
  }
  if (j.contains("rpy_deg")) {
    const auto v = j.at("rpy_deg").get<std::vector<double>>();
    if (v.size() != 3) throw ConfigError("pose rpy_deg needs 3 values");
    rpy = Vec3(v[0], v[1], v[2]);
  }
  return Pose::FromRpyDeg(t, rpy[0], rpy[1], rpy[2]);
}

void to_json(nlohmann::json& j, const SceneSpec& s) {
  j = {{"name", s.name},
       {"tier", s.tier},
       {"primitive", std::string(primitive_name(s.primitive))},
       {"plug_dims", s.plug_dims},
       {"plug_height", s.plug_height},
       {"tolerance", s.tolerance},
       {"cavity_depth", s.cavity_depth},
       {"outer", {s.outer_x, s.outer_y}},
       {"floor_thickness", s.floor_thickness},
       {"retract_height", s.retract_height},
       {"base_pose", pose_to_json(s.base)},
       {"sample_seed", s.sample_seed}};
}

void from_json(const nlohmann::json& j, SceneSpec& s) {
  SceneSpec d;
  if (j.contains("catalog")) d = catalog_scene(j.at("catalog").get<std::string>());
  s = d;
  s.name = j.value("name", d.name);
  s.tier = j.value("tier", d.tier);
  if (j.contains("primitive")) {
    s.primitive = parse_primitive(j.at("primitive").get<std::string>());
  }
  s.plug_dims = j.value("plug_dims", d.plug_dims);
  s.plug_height = j.value("plug_height", d.plug_height);
  s.tolerance = j.value("tolerance", d.tolerance);
  s.cavity_depth = j.value("cavity_depth", d.cavity_depth);
  if (j.contains("outer")) {
    const auto outer = j.at("outer").get<std::vector<double>>();
    if (outer.size() != 2) throw ConfigError("scene outer needs 2 values");
    s.outer_x = outer[0];
    s.outer_y = outer[1];
  }
  s.floor_thickness = j.value("floor_thickness", d.floor_thickness);
  s.retract_height = j.value("retract_height", d.retract_height);
  if (j.contains("base_pose")) s.base = pose_from_json(j.at("base_pose"));
  s.sample_seed = j.value("sample_seed", d.sample_seed);
  // Validates dimensions eagerly so bad configs fail at load time.
  make_socket(s);
  make_plug(s);
}

namespace {

SceneSpec middle(const std::string& shape, Primitive p, const std::string& tier,
                 double tolerance) {
  SceneSpec s;
  s.name = tier + "_" + shape;
  s.tier = tier;
  s.primitive = p;
  s.plug_dims = p == Primitive::kBox ? std::vector<double>{50.0, 50.0}
                                     : std::vector<double>{50.0};
  s.plug_height = 60.0;
  s.tolerance = tolerance;
  s.cavity_depth = 25.0;
  s.outer_x = s.outer_y = 100.0;
  s.floor_thickness = 10.0;
  return s;
}

SceneSpec small(const std::string& shape, Primitive p, double width,
                double tolerance) {
  SceneSpec s;
  s.name = "small_" + shape + "_" + std::to_string(static_cast<int>(width));
  s.tier = "small";
  s.primitive = p;
  s.plug_dims = p == Primitive::kBox ? std::vector<double>{width, width}
                                     : std::vector<double>{width};
  s.plug_height = 25.0;
  s.tolerance = tolerance;
  s.cavity_depth = 15.0;
  s.outer_x = s.outer_y = 40.0;
  s.floor_thickness = 5.0;
  return s;
}

}  // namespace

const std::vector<SceneSpec>& scene_catalog() {
  static const std::vector<SceneSpec> catalog = [] {
    std::vector<SceneSpec> c;
    const std::pair<const char*, double> tiers[] = {
        {"easy", 2.0}, {"medium", 1.0}, {"hard", 0.1}};
    for (const auto& [tier, tol] : tiers) {
      c.push_back(middle("cylinder", Primitive::kCylinder, tier, tol));
      c.push_back(middle("box", Primitive::kBox, tier, tol));
      c.push_back(middle("triangle", Primitive::kTriangularPrism, tier, tol));
    }
    const std::pair<double, double> pegs[] = {{8.0, 0.5}, {12.0, 0.55},
                                              {16.0, 0.6}};
    for (const auto& [w, tol] : pegs) {
      c.push_back(small("round", Primitive::kCylinder, w, tol));
      c.push_back(small("rect", Primitive::kBox, w, tol));
    }
    return c;
  }();
  return catalog;
}

SceneSpec catalog_scene(const std::string& name) {
  for (const SceneSpec& s : scene_catalog()) {
    if (s.name == name) return s;
  }
  throw ConfigError("unknown catalog scene '" + name + "'");
}

Scene::Scene(SceneSpec spec_in, int sample_count)
    : spec(std::move(spec_in)),
      plug(make_plug(spec)),
      socket(make_socket(spec)),
      samples(sample_surface(plug, sample_count, spec.sample_seed)) {}

}  // namespace pfrl
