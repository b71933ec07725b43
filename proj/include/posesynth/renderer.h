#pragma once

#include <string>
#include <vector>

#include "posesynth/camera.h"
#include "posesynth/geometry.h"
#include "posesynth/image.h"
#include "posesynth/pointcloud.h"

namespace posesynth {

// Analytic sky-box: a vertical gradient from the horizon to the zenith for
// rays pointing upward, a flat ground color otherwise.
struct SkyboxPreset {
  std::string id;
  Color horizon{0, 0, 0};
  Color zenith{0, 0, 0};
  Color ground{0, 0, 0};
};

// Per-pixel color transform simulating illumination:
//   c' = (1 - s) * 255 * (tint * c / 255)^gamma + s * haze
struct ShaderPreset {
  std::string id;
  std::array<double, 3> tint{1.0, 1.0, 1.0};
  double gamma = 1.0;
  std::array<double, 3> haze_color{0.0, 0.0, 0.0};
  double haze_strength = 0.0;

  void Validate() const;
};

// Built-in presets: sky-boxes "none", "noon", "dusk"; shaders "identity",
// "noon", "dusk", "overcast". Lookups throw ConfigError for unknown ids.
const SkyboxPreset& GetSkybox(const std::string& id);
const ShaderPreset& GetShader(const std::string& id);
std::vector<std::string> SkyboxIds();
std::vector<std::string> ShaderIds();

struct RenderOptions {
  // Splat radius in pixels for a point at reference_depth; scales with
  // 1 / depth, floored at 1 px and capped at max_splat_px.
  double splat_radius_px = 1.5;
  double reference_depth = 2.0;
  double max_splat_px = 12.0;
  double near_plane = kDefaultNearPlane;
  std::string skybox = "noon";
  std::string shader = "identity";

  void Validate() const;
};

// Splat radius (pixels) of a point at `depth`.
double SplatRadius(const RenderOptions& opts, double depth);

Image FillSkybox(const Intrinsics& intr, const Pose& pose, const SkyboxPreset& preset);
Image FillSkybox(const Intrinsics& intr, const Pose& pose, const std::string& preset_id);

// Z-buffered disc splats over the sky-box. The nearest point wins each pixel,
// ties go to the lowest point index, so the result does not depend on
// `threads`. Shader presets are not applied here.
Image SplatRender(const PointCloud& cloud, const Intrinsics& intr, const Pose& pose,
                  const RenderOptions& opts, int threads = 1);

Image ApplyShader(const Image& img, const ShaderPreset& preset);

// Isotropic bilinear rescale so the image covers the target, followed by a
// central crop. Never mirrors.
Image CenterCropResize(const Image& img, int target_width, int target_height);

}  // namespace posesynth
