#include "posesynth/config.h"

#include <fstream>
#include <iterator>
#include <set>

#include <fmt/format.h>

#include "json.hpp"
#include "posesynth/errors.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace posesynth {
namespace {

std::string Join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void RejectUnknown(const json& obj, const std::string& prefix, std::set<std::string> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(Join(prefix, key), "unknown key");
  }
}

const json& RequireObject(const json& parent, const std::string& key, const std::string& prefix) {
  if (!parent.contains(key)) throw ConfigError(Join(prefix, key), "missing");
  const json& v = parent.at(key);
  if (!v.is_object()) throw ConfigError(Join(prefix, key), "must be an object");
  return v;
}

double GetNumber(const json& obj, const std::string& key, const std::string& prefix, double fallback,
                 bool required = false) {
  if (!obj.contains(key)) {
    if (required) throw ConfigError(Join(prefix, key), "missing");
    return fallback;
  }
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(Join(prefix, key), "must be a number");
  return v.get<double>();
}

std::int64_t GetInteger(const json& obj, const std::string& key, const std::string& prefix,
                        std::int64_t fallback, bool required = false) {
  if (!obj.contains(key)) {
    if (required) throw ConfigError(Join(prefix, key), "missing");
    return fallback;
  }
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(Join(prefix, key), "must be an integer");
  return v.get<std::int64_t>();
}

std::string GetString(const json& obj, const std::string& key, const std::string& prefix,
                      const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(Join(prefix, key), "must be a string");
  return v.get<std::string>();
}

int ToInt(std::int64_t v, const std::string& field) {
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError(field, "out of range");
  }
  return static_cast<int>(v);
}

// Re-throws library validation failures as field-level config errors.
template <typename Fn>
void Check(const std::string& field, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError(field, e.what());
  }
}

}  // namespace

GenerationConfig ParseGenerationConfig(const std::string& json_text, const fs::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("<document>", "must be a JSON object");
  RejectUnknown(root, "",
                {"scene", "camera", "grid", "orientation", "render", "holdout_every", "max_poses",
                 "output"});
  GenerationConfig cfg;
  const auto resolve = [&](const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  };

  // scene
  const json& scene = RequireObject(root, "scene", "");
  RejectUnknown(scene, "scene", {"cloud", "procedural", "seed"});
  const bool has_cloud = scene.contains("cloud");
  const bool has_proc = scene.contains("procedural");
  if (has_cloud == has_proc) {
    throw ConfigError("scene", "exactly one of 'cloud' or 'procedural' must be given");
  }
  if (has_cloud) {
    cfg.cloud_path_text = GetString(scene, "cloud", "scene", "");
    if (cfg.cloud_path_text.empty()) throw ConfigError("scene.cloud", "must be a nonempty path");
    cfg.cloud_path = resolve(cfg.cloud_path_text);
    if (scene.contains("seed")) throw ConfigError("scene.seed", "only valid with 'procedural'");
  } else {
    const json& p = RequireObject(scene, "procedural", "scene");
    RejectUnknown(p, "scene.procedural", {"width", "height", "depth", "points"});
    RoomSpec room;
    room.width = GetNumber(p, "width", "scene.procedural", room.width);
    room.height = GetNumber(p, "height", "scene.procedural", room.height);
    room.depth = GetNumber(p, "depth", "scene.procedural", room.depth);
    const auto points = GetInteger(p, "points", "scene.procedural",
                                   static_cast<std::int64_t>(room.point_count));
    if (points < 1) throw ConfigError("scene.procedural.points", "must be >= 1");
    room.point_count = static_cast<std::size_t>(points);
    for (const auto& [name, v] : {std::pair{"width", room.width}, {"height", room.height},
                                  {"depth", room.depth}}) {
      if (!(v > 0.0)) throw ConfigError(std::string("scene.procedural.") + name, "must be > 0");
    }
    cfg.procedural = room;
    const auto seed = GetInteger(scene, "seed", "scene", 0);
    if (seed < 0) throw ConfigError("scene.seed", "must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(seed);
  }

  // camera
  const json& cam = RequireObject(root, "camera", "");
  RejectUnknown(cam, "camera", {"fov_deg", "width", "height", "fx", "fy", "cx", "cy"});
  const int width = ToInt(GetInteger(cam, "width", "camera", 0, true), "camera.width");
  const int height = ToInt(GetInteger(cam, "height", "camera", 0, true), "camera.height");
  if (width < 1) throw ConfigError("camera.width", "must be >= 1");
  if (height < 1) throw ConfigError("camera.height", "must be >= 1");
  if (cam.contains("fov_deg")) {
    for (const char* k : {"fx", "fy", "cx", "cy"}) {
      if (cam.contains(k)) throw ConfigError(std::string("camera.") + k, "conflicts with fov_deg");
    }
    cfg.fov_deg = GetNumber(cam, "fov_deg", "camera", 0.0);
    Check("camera.fov_deg", [&] { cfg.intrinsics = IntrinsicsFromFov(*cfg.fov_deg, width, height); });
  } else {
    cfg.intrinsics.fx = GetNumber(cam, "fx", "camera", 0.0, true);
    cfg.intrinsics.fy = GetNumber(cam, "fy", "camera", 0.0, true);
    cfg.intrinsics.cx = GetNumber(cam, "cx", "camera", width / 2.0);
    cfg.intrinsics.cy = GetNumber(cam, "cy", "camera", height / 2.0);
    cfg.intrinsics.width = width;
    cfg.intrinsics.height = height;
    Check("camera", [&] { cfg.intrinsics.Validate(); });
  }

  // grid
  if (root.contains("grid")) {
    const json& g = RequireObject(root, "grid", "");
    RejectUnknown(g, "grid", {"origin", "step_x", "step_z", "count_x", "count_z", "height_y"});
    if (g.contains("origin")) {
      const json& o = g.at("origin");
      if (!o.is_array() || o.size() != 3 || !o[0].is_number() || !o[1].is_number() ||
          !o[2].is_number()) {
        throw ConfigError("grid.origin", "must be an array of 3 numbers");
      }
      cfg.grid.origin = Vec3(o[0].get<double>(), o[1].get<double>(), o[2].get<double>());
      cfg.grid_origin_given = true;
    }
    cfg.grid.step_x = GetNumber(g, "step_x", "grid", cfg.grid.step_x);
    cfg.grid.step_z = GetNumber(g, "step_z", "grid", cfg.grid.step_z);
    cfg.grid.count_x = ToInt(GetInteger(g, "count_x", "grid", cfg.grid.count_x), "grid.count_x");
    cfg.grid.count_z = ToInt(GetInteger(g, "count_z", "grid", cfg.grid.count_z), "grid.count_z");
    cfg.grid.height_y = GetNumber(g, "height_y", "grid", cfg.grid.height_y);
  }
  cfg.grid.Validate();

  // orientation
  if (root.contains("orientation")) {
    const json& o = RequireObject(root, "orientation", "");
    RejectUnknown(o, "orientation", {"yaw_count", "pitch_values", "roll"});
    cfg.orientation.yaw_count =
        ToInt(GetInteger(o, "yaw_count", "orientation", cfg.orientation.yaw_count),
              "orientation.yaw_count");
    if (o.contains("pitch_values")) {
      const json& p = o.at("pitch_values");
      if (!p.is_array()) throw ConfigError("orientation.pitch_values", "must be an array");
      cfg.orientation.pitch_values.clear();
      for (const auto& v : p) {
        if (!v.is_number()) throw ConfigError("orientation.pitch_values", "must hold numbers");
        cfg.orientation.pitch_values.push_back(v.get<double>());
      }
    }
    cfg.orientation.roll = GetNumber(o, "roll", "orientation", cfg.orientation.roll);
  }
  cfg.orientation.Validate();

  // render
  if (root.contains("render")) {
    const json& r = RequireObject(root, "render", "");
    RejectUnknown(r, "render", {"splat_radius_px", "reference_depth", "max_splat_px",
                                "near_plane", "skybox", "shader"});
    cfg.render.splat_radius_px = GetNumber(r, "splat_radius_px", "render", cfg.render.splat_radius_px);
    cfg.render.reference_depth = GetNumber(r, "reference_depth", "render", cfg.render.reference_depth);
    cfg.render.max_splat_px = GetNumber(r, "max_splat_px", "render", cfg.render.max_splat_px);
    cfg.render.near_plane = GetNumber(r, "near_plane", "render", cfg.render.near_plane);
    cfg.render.skybox = GetString(r, "skybox", "render", cfg.render.skybox);
    cfg.render.shader = GetString(r, "shader", "render", cfg.render.shader);
  }
  cfg.render.Validate();

  const auto holdout = GetInteger(root, "holdout_every", "", 0);
  if (holdout < 0 || holdout == 1) {
    throw ConfigError("holdout_every", "must be 0 (no holdout) or >= 2");
  }
  cfg.holdout_every = ToInt(holdout, "holdout_every");
  const auto cap = GetInteger(root, "max_poses", "", static_cast<std::int64_t>(kDefaultPoseCap));
  if (cap < 1) throw ConfigError("max_poses", "must be >= 1");
  cfg.max_poses = static_cast<std::size_t>(cap);
  if (PoseCount(cfg.grid, cfg.orientation) > cfg.max_poses) {
    throw ConfigError("max_poses", fmt::format("grid x orientation yields {} poses",
                                               PoseCount(cfg.grid, cfg.orientation)));
  }
  if (root.contains("output")) {
    const std::string out = GetString(root, "output", "", "");
    if (out.empty()) throw ConfigError("output", "must be a nonempty path");
    cfg.output = resolve(out);
  }
  return cfg;
}

GenerationConfig LoadGenerationConfig(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return ParseGenerationConfig(text, path.parent_path());
}

PointCloud LoadScene(const GenerationConfig& config) {
  if (config.cloud_path) return LoadPly(*config.cloud_path);
  return ProceduralRoom(config.seed, *config.procedural);
}

GridSpec ResolveGrid(const GenerationConfig& config, const PointCloud& cloud) {
  GridSpec grid = config.grid;
  if (!config.grid_origin_given) grid.origin = CenteredGridOrigin(BoundingBox(cloud), grid);
  return grid;
}

std::string EchoConfig(const GenerationConfig& config, const GridSpec& resolved_grid) {
  json j;
  if (config.cloud_path) {
    j["scene"] = {{"cloud", config.cloud_path_text}};
  } else {
    const RoomSpec& r = *config.procedural;
    j["scene"] = {{"procedural",
                   {{"width", r.width}, {"height", r.height}, {"depth", r.depth},
                    {"points", r.point_count}}},
                  {"seed", config.seed}};
  }
  const Intrinsics& in = config.intrinsics;
  j["camera"] = {{"fx", in.fx}, {"fy", in.fy}, {"cx", in.cx}, {"cy", in.cy},
                 {"width", in.width}, {"height", in.height}};
  if (config.fov_deg) j["camera_fov_deg"] = *config.fov_deg;
  const GridSpec& g = resolved_grid;
  j["grid"] = {{"origin", {g.origin.x(), g.origin.y(), g.origin.z()}},
               {"origin_auto", !config.grid_origin_given},
               {"step_x", g.step_x}, {"step_z", g.step_z}, {"count_x", g.count_x},
               {"count_z", g.count_z}, {"height_y", g.height_y}};
  j["orientation"] = {{"yaw_count", config.orientation.yaw_count},
                      {"pitch_values", config.orientation.pitch_values},
                      {"roll", config.orientation.roll}};
  const RenderOptions& r = config.render;
  j["render"] = {{"splat_radius_px", r.splat_radius_px}, {"reference_depth", r.reference_depth},
                 {"max_splat_px", r.max_splat_px}, {"near_plane", r.near_plane},
                 {"skybox", r.skybox}, {"shader", r.shader}};
  j["holdout_every"] = config.holdout_every;
  j["max_poses"] = config.max_poses;
  j["pose_count"] = PoseCount(config.grid, config.orientation);
  return j.dump(2) + "\n";
}

std::string ConfigDefaultsHelp() {
  const GridSpec g;
  const OrientationSpec o;
  const RenderOptions r;
  std::string pitches;
  for (double p : o.pitch_values) pitches += fmt::format("{}{}", pitches.empty() ? "" : ", ", p);
  std::string skyboxes, shaders;
  for (const auto& id : SkyboxIds()) skyboxes += (skyboxes.empty() ? "" : "|") + id;
  for (const auto& id : ShaderIds()) shaders += (shaders.empty() ? "" : "|") + id;
  return fmt::format(
      "Config keys (JSON) and defaults:\n"
      "  scene.cloud | scene.procedural{{width=10,height=4,depth=10,points=100000}} + scene.seed=0\n"
      "  camera.width, camera.height (required) + camera.fov_deg | camera.fx,fy[,cx,cy]\n"
      "  grid.origin=auto (centered on the cloud footprint, on its floor)\n"
      "  grid.step_x={} grid.step_z={} grid.count_x={} grid.count_z={} grid.height_y={}\n"
      "  orientation.yaw_count={} orientation.pitch_values=[{}] orientation.roll={}\n"
      "  render.splat_radius_px={} render.reference_depth={} render.max_splat_px={}\n"
      "  render.near_plane={} render.skybox={} ({}) render.shader={} ({})\n"
      "  holdout_every=0 (no testB) max_poses={} output=<required here or via --output>\n",
      g.step_x, g.step_z, g.count_x, g.count_z, g.height_y, o.yaw_count, pitches, o.roll,
      r.splat_radius_px, r.reference_depth, r.max_splat_px, r.near_plane, r.skybox, skyboxes,
      r.shader, shaders, kDefaultPoseCap);
}

}  // namespace posesynth
