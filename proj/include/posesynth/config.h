#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "posesynth/camera.h"
#include "posesynth/dataset.h"
#include "posesynth/pointcloud.h"
#include "posesynth/renderer.h"
#include "posesynth/sampler.h"

namespace posesynth {

// Everything that determines a generated dataset. Parsed from one JSON
// document:
//
// {
//   "scene":  {"cloud": "scene.ply"}
//          or {"procedural": {"width": 10, "height": 4, "depth": 10,
//                             "points": 100000}, "seed": 7},
//   "camera": {"fov_deg": 90, "width": 224, "height": 224}
//          or {"fx": .., "fy": .., "cx": .., "cy": .., "width": .., "height": ..},
//   "grid": {"origin": [x, y, z], "step_x": 1, "step_z": 1, "count_x": 1,
//            "count_z": 1, "height_y": 1.6},          origin optional
//   "orientation": {"yaw_count": 8, "pitch_values": [-10, 0, 10], "roll": 0},
//   "render": {"splat_radius_px": 1.5, "reference_depth": 2, "max_splat_px": 12,
//              "near_plane": 0.01, "skybox": "noon", "shader": "identity"},
//   "holdout_every": 0,
//   "max_poses": 10000000,
//   "output": "dataset"
// }
//
// Unknown keys are rejected. Relative paths resolve against the directory of
// the config file.
struct GenerationConfig {
  std::optional<std::filesystem::path> cloud_path;
  std::string cloud_path_text;  // as written, for the echo
  std::optional<RoomSpec> procedural;
  std::uint64_t seed = 0;

  std::optional<double> fov_deg;
  Intrinsics intrinsics;

  GridSpec grid;
  bool grid_origin_given = false;
  OrientationSpec orientation;
  RenderOptions render;
  int holdout_every = 0;
  std::size_t max_poses = kDefaultPoseCap;
  std::optional<std::filesystem::path> output;
};

// Throws ConfigError naming the offending field (e.g. "grid.step_x").
GenerationConfig ParseGenerationConfig(const std::string& json_text,
                                       const std::filesystem::path& base_dir = {});
GenerationConfig LoadGenerationConfig(const std::filesystem::path& path);

// Loads the PLY file or builds the procedural scene.
PointCloud LoadScene(const GenerationConfig& config);

// Grid with its origin filled in (centered over the cloud when the config
// omitted it).
GridSpec ResolveGrid(const GenerationConfig& config, const PointCloud& cloud);

// Pretty-printed JSON of the fully resolved config, defaults included. The
// output location is left out so identical datasets get identical echoes.
std::string EchoConfig(const GenerationConfig& config, const GridSpec& resolved_grid);

// Human-readable list of config keys and defaults, for --help.
std::string ConfigDefaultsHelp();

}  // namespace posesynth
