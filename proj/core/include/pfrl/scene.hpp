#ifndef PFRL_SCENE_HPP_
#define PFRL_SCENE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pfrl/geometry.hpp"

namespace pfrl {

// Parametric plug/socket pair. Dimensions in mm:
//   cylinder          plug_dims = {diameter}
//   box               plug_dims = {width_x, width_y}
//   triangular_prism  plug_dims = {side}
struct SceneSpec {
  std::string name = "easy_cylinder";
  std::string tier = "easy";
  Primitive primitive = Primitive::kCylinder;
  std::vector<double> plug_dims = {50.0};
  double plug_height = 60.0;
  double tolerance = 2.0;
  double cavity_depth = 25.0;
  double outer_x = 90.0;
  double outer_y = 90.0;
  double floor_thickness = 10.0;
  double retract_height = 10.0;
  Pose base;  // nominal socket pose; episodes randomise around it
  std::uint64_t sample_seed = 7;
};

CrossSection make_section(Primitive primitive, const std::vector<double>& dims);
PlugModel make_plug(const SceneSpec& spec);
SocketModel make_socket(const SceneSpec& spec);

void to_json(nlohmann::json& j, const SceneSpec& s);
void from_json(const nlohmann::json& j, SceneSpec& s);

// Pose <-> {"translation": [x,y,z], "rpy_deg": [r,p,y]}.
nlohmann::json pose_to_json(const Pose& p);
Pose pose_from_json(const nlohmann::json& j);

// Built-in scenes: middle-size cylinder/box/triangle objects at Easy (2 mm),
// Medium (1 mm) and Hard (0.1 mm) tolerance, plus small 8/12/16 mm round and
// rectangular pegs at 0.5-0.6 mm.
const std::vector<SceneSpec>& scene_catalog();
SceneSpec catalog_scene(const std::string& name);

// Geometry plus the cached plug surface samples shared by every query.
struct Scene {
  Scene(SceneSpec spec, int sample_count);

  SceneSpec spec;
  PlugModel plug;
  SocketModel socket;
  std::vector<Vec3> samples;
};

}  // namespace pfrl

#endif  // PFRL_SCENE_HPP_
