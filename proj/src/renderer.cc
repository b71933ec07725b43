#include "posesynth/renderer.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "posesynth/errors.h"
#include "posesynth/parallel.h"

namespace posesynth {
namespace {

const std::vector<SkyboxPreset>& Skyboxes() {
  static const std::vector<SkyboxPreset> presets{
      {"none", {0, 0, 0}, {0, 0, 0}, {0, 0, 0}},
      {"noon", {200, 225, 245}, {60, 120, 210}, {105, 100, 90}},
      {"dusk", {250, 150, 80}, {40, 30, 80}, {50, 40, 38}},
  };
  return presets;
}

const std::vector<ShaderPreset>& Shaders() {
  static const std::vector<ShaderPreset> presets{
      {"identity", {1.0, 1.0, 1.0}, 1.0, {0.0, 0.0, 0.0}, 0.0},
      {"noon", {1.05, 1.05, 1.0}, 0.9, {255.0, 250.0, 235.0}, 0.05},
      {"dusk", {1.0, 0.6, 0.4}, 1.1, {60.0, 30.0, 70.0}, 0.15},
      {"overcast", {0.85, 0.88, 0.92}, 1.0, {170.0, 175.0, 180.0}, 0.35},
  };
  return presets;
}

std::uint8_t ClampToByte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
}

struct Splat {
  int x = 0;  // center pixel
  int y = 0;
  double radius = 0.0;
  double depth = 0.0;
  std::uint32_t index = 0;
};

// Pixels covered by a splat are the integer offsets (dx, dy) with
// dx^2 + dy^2 <= radius^2. Returns the largest |dx| for row offset dy, or -1.
int HalfWidth(double radius, int dy) {
  const double r2 = radius * radius;
  const double rem = r2 - static_cast<double>(dy) * dy;
  if (rem < 0.0) return -1;
  int h = static_cast<int>(std::sqrt(rem));
  while (static_cast<double>(h + 1) * (h + 1) + static_cast<double>(dy) * dy <= r2) ++h;
  while (h >= 0 && static_cast<double>(h) * h + static_cast<double>(dy) * dy > r2) --h;
  return h;
}

class DepthBuffer {
 public:
  DepthBuffer(int width, int height)
      : width_(width),
        depth_(static_cast<std::size_t>(width) * height, std::numeric_limits<double>::infinity()),
        index_(static_cast<std::size_t>(width) * height, kEmpty) {}

  static constexpr std::uint32_t kEmpty = std::numeric_limits<std::uint32_t>::max();

  // Draws the rows of `s` that fall in [row_begin, row_end).
  void Draw(const Splat& s, int row_begin, int row_end) {
    const int reach = static_cast<int>(std::floor(s.radius));
    const int y0 = std::max(s.y - reach, row_begin);
    const int y1 = std::min(s.y + reach, row_end - 1);
    for (int y = y0; y <= y1; ++y) {
      const int half = HalfWidth(s.radius, y - s.y);
      if (half < 0) continue;
      const int x0 = std::max(s.x - half, 0);
      const int x1 = std::min(s.x + half, width_ - 1);
      const std::size_t row = static_cast<std::size_t>(y) * width_;
      for (int x = x0; x <= x1; ++x) {
        const std::size_t k = row + x;
        if (s.depth < depth_[k] || (s.depth == depth_[k] && s.index < index_[k])) {
          depth_[k] = s.depth;
          index_[k] = s.index;
        }
      }
    }
  }

  std::uint32_t Winner(std::size_t k) const { return index_[k]; }

 private:
  int width_;
  std::vector<double> depth_;
  std::vector<std::uint32_t> index_;
};

}  // namespace

void ShaderPreset::Validate() const {
  for (double t : tint) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("shader.tint", "must be >= 0");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("shader.gamma", "must be > 0");
  if (!(haze_strength >= 0.0 && haze_strength <= 1.0)) {
    throw ConfigError("shader.haze_strength", "must lie in [0, 1]");
  }
}

const SkyboxPreset& GetSkybox(const std::string& id) {
  for (const auto& p : Skyboxes()) {
    if (p.id == id) return p;
  }
  throw ConfigError("render.skybox", "unknown sky-box preset '" + id + "'");
}

const ShaderPreset& GetShader(const std::string& id) {
  for (const auto& p : Shaders()) {
    if (p.id == id) return p;
  }
  throw ConfigError("render.shader", "unknown shader preset '" + id + "'");
}

std::vector<std::string> SkyboxIds() {
  std::vector<std::string> ids;
  for (const auto& p : Skyboxes()) ids.push_back(p.id);
  return ids;
}

std::vector<std::string> ShaderIds() {
  std::vector<std::string> ids;
  for (const auto& p : Shaders()) ids.push_back(p.id);
  return ids;
}

void RenderOptions::Validate() const {
  if (!(splat_radius_px >= 0.0) || !std::isfinite(splat_radius_px)) {
    throw ConfigError("render.splat_radius_px", "must be >= 0");
  }
  if (!(reference_depth >= 0.0) || !std::isfinite(reference_depth)) {
    throw ConfigError("render.reference_depth", "must be >= 0");
  }
  if (!(max_splat_px >= 1.0) || !std::isfinite(max_splat_px)) {
    throw ConfigError("render.max_splat_px", "must be >= 1");
  }
  if (!(near_plane > 0.0) || !std::isfinite(near_plane)) {
    throw ConfigError("render.near_plane", "must be > 0");
  }
  GetSkybox(skybox);
  GetShader(shader);
}

double SplatRadius(const RenderOptions& opts, double depth) {
  return std::clamp(opts.splat_radius_px * opts.reference_depth / depth, 1.0, opts.max_splat_px);
}

Image FillSkybox(const Intrinsics& intr, const Pose& pose, const SkyboxPreset& preset) {
  intr.Validate();
  Image img(intr.width, intr.height, preset.ground);
  // World "up" is -Y, so the up component of a camera ray d is -(R d).y. Row 1
  // of R depends only on pitch and roll, which makes the fill exactly
  // invariant to yaw.
  const RotationMatrix r = EulerToRotation(NormalizeOrientation(pose.orientation));
  const Eigen::RowVector3d up_row = -r.row(1);
  for (int y = 0; y < intr.height; ++y) {
    const double dy = (y - intr.cy) / intr.fy;
    for (int x = 0; x < intr.width; ++x) {
      const Vec3 d((x - intr.cx) / intr.fx, dy, 1.0);
      const double up = up_row.dot(d);
      if (!(up > 0.0)) continue;
      const double elevation = std::asin(std::min(up / d.norm(), 1.0));
      const double t = elevation / (std::numbers::pi / 2.0);
      Color c;
      for (int k = 0; k < 3; ++k) {
        c[k] = ClampToByte(preset.horizon[k] + (preset.zenith[k] - preset.horizon[k]) * t);
      }
      img.Set(x, y, c);
    }
  }
  return img;
}

Image FillSkybox(const Intrinsics& intr, const Pose& pose, const std::string& preset_id) {
  return FillSkybox(intr, pose, GetSkybox(preset_id));
}

Image SplatRender(const PointCloud& cloud, const Intrinsics& intr, const Pose& pose,
                  const RenderOptions& opts, int threads) {
  opts.Validate();
  if (cloud.size() >= DepthBuffer::kEmpty) throw InvalidArgument("point cloud too large");
  Image img = FillSkybox(intr, pose, opts.skybox);
  const ViewTransform view = PoseToView(pose);

  const auto make_splat = [&](std::size_t i, Splat* out) {
    const auto proj = Project(intr, view, cloud.positions[i].cast<double>(), opts.near_plane);
    if (!proj) return false;
    out->x = static_cast<int>(std::lround(proj->u));
    out->y = static_cast<int>(std::lround(proj->v));
    out->radius = SplatRadius(opts, proj->depth);
    out->depth = proj->depth;
    out->index = static_cast<std::uint32_t>(i);
    return true;
  };

  DepthBuffer zbuf(intr.width, intr.height);
  if (threads <= 1) {
    Splat s;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (make_splat(i, &s)) zbuf.Draw(s, 0, intr.height);
    }
  } else {
    // Project in parallel, then give each thread a band of rows. The depth
    // test is a strict total order on (depth, index), so bands and point
    // order do not affect the result.
    std::vector<Splat> splats(cloud.size());
    std::vector<std::uint8_t> visible(cloud.size(), 0);
    ParallelFor(cloud.size(), threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) visible[i] = make_splat(i, &splats[i]);
    });
    ParallelFor(static_cast<std::size_t>(intr.height), threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = 0; i < splats.size(); ++i) {
        if (visible[i]) zbuf.Draw(splats[i], static_cast<int>(begin), static_cast<int>(end));
      }
    });
  }

  const std::size_t n = static_cast<std::size_t>(intr.width) * intr.height;
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint32_t winner = zbuf.Winner(k);
    if (winner == DepthBuffer::kEmpty) continue;
    const Color& c = cloud.colors[winner];
    img.pixels[3 * k] = c[0];
    img.pixels[3 * k + 1] = c[1];
    img.pixels[3 * k + 2] = c[2];
  }
  return img;
}

Image ApplyShader(const Image& img, const ShaderPreset& preset) {
  preset.Validate();
  // 256-entry lookup per channel; the formula depends only on the byte value.
  std::array<std::array<std::uint8_t, 256>, 3> lut;
  const double s = preset.haze_strength;
  for (int k = 0; k < 3; ++k) {
    for (int c = 0; c < 256; ++c) {
      const double lit = 255.0 * std::pow(preset.tint[k] * (c / 255.0), preset.gamma);
      lut[k][c] = ClampToByte((1.0 - s) * lit + s * preset.haze_color[k]);
    }
  }
  Image out = img;
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    out.pixels[i] = lut[i % 3][out.pixels[i]];
  }
  return out;
}

Image CenterCropResize(const Image& img, int target_width, int target_height) {
  if (target_width < 1 || target_height < 1) {
    throw InvalidArgument("center crop target must be at least 1x1");
  }
  if (img.width < 1 || img.height < 1) throw InvalidArgument("cannot resize an empty image");
  const double scale = std::max(static_cast<double>(target_width) / img.width,
                                static_cast<double>(target_height) / img.height);
  const int scaled_w = std::max<int>(target_width, static_cast<int>(std::lround(img.width * scale)));
  const int scaled_h = std::max<int>(target_height, static_cast<int>(std::lround(img.height * scale)));
  const double sx = static_cast<double>(scaled_w) / img.width;
  const double sy = static_cast<double>(scaled_h) / img.height;
  const int off_x = (scaled_w - target_width) / 2;
  const int off_y = (scaled_h - target_height) / 2;

  Image out(target_width, target_height);
  for (int y = 0; y < target_height; ++y) {
    const double src_y = (y + off_y + 0.5) / sy - 0.5;
    const int y0 = static_cast<int>(std::floor(src_y));
    const double fy = src_y - y0;
    const int ya = std::clamp(y0, 0, img.height - 1);
    const int yb = std::clamp(y0 + 1, 0, img.height - 1);
    for (int x = 0; x < target_width; ++x) {
      const double src_x = (x + off_x + 0.5) / sx - 0.5;
      const int x0 = static_cast<int>(std::floor(src_x));
      const double fx = src_x - x0;
      const int xa = std::clamp(x0, 0, img.width - 1);
      const int xb = std::clamp(x0 + 1, 0, img.width - 1);
      for (int k = 0; k < 3; ++k) {
        const double top = (1.0 - fx) * img.at(xa, ya)[k] + fx * img.at(xb, ya)[k];
        const double bottom = (1.0 - fx) * img.at(xa, yb)[k] + fx * img.at(xb, yb)[k];
        out.at(x, y)[k] = ClampToByte((1.0 - fy) * top + fy * bottom);
      }
    }
  }
  return out;
}

}  // namespace posesynth
