#include "posesynth/sampler.h"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "posesynth/errors.h"

namespace posesynth {

void GridSpec::Validate() const {
  if (!origin.allFinite()) throw ConfigError("grid.origin", "must be finite");
  if (!(step_x > 0.0) || !std::isfinite(step_x)) throw ConfigError("grid.step_x", "must be > 0");
  if (!(step_z > 0.0) || !std::isfinite(step_z)) throw ConfigError("grid.step_z", "must be > 0");
  if (count_x < 1) throw ConfigError("grid.count_x", "must be >= 1");
  if (count_z < 1) throw ConfigError("grid.count_z", "must be >= 1");
  if (!std::isfinite(height_y)) throw ConfigError("grid.height_y", "must be finite");
}

void OrientationSpec::Validate() const {
  if (yaw_count < 1) throw ConfigError("orientation.yaw_count", "must be >= 1");
  if (pitch_values.empty()) throw ConfigError("orientation.pitch_values", "must not be empty");
  for (double p : pitch_values) {
    if (!(p >= -90.0 && p <= 90.0)) {
      throw ConfigError("orientation.pitch_values", fmt::format("{} outside [-90, 90]", p));
    }
  }
  if (!std::isfinite(roll)) throw ConfigError("orientation.roll", "must be finite");
}

std::vector<Vec3> GridPositions(const GridSpec& spec) {
  spec.Validate();
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(spec.count_x) * spec.count_z);
  for (int j = 0; j < spec.count_z; ++j) {
    for (int i = 0; i < spec.count_x; ++i) {
      out.push_back(spec.origin + Vec3(i * spec.step_x, -spec.height_y, j * spec.step_z));
    }
  }
  return out;
}

std::vector<Orientation> OrientationSphere(const OrientationSpec& spec) {
  spec.Validate();
  std::vector<Orientation> out;
  out.reserve(static_cast<std::size_t>(spec.yaw_count) * spec.pitch_values.size());
  const double step = 360.0 / spec.yaw_count;
  for (double pitch : spec.pitch_values) {
    for (int k = 0; k < spec.yaw_count; ++k) {
      out.push_back(NormalizeOrientation({pitch, k * step, spec.roll}));
    }
  }
  return out;
}

std::size_t PoseCount(const GridSpec& grid, const OrientationSpec& orient) {
  const auto positions = static_cast<unsigned __int128>(grid.count_x) * grid.count_z;
  const auto total = positions * static_cast<unsigned>(orient.yaw_count) * orient.pitch_values.size();
  if (total > std::numeric_limits<std::size_t>::max()) return std::numeric_limits<std::size_t>::max();
  return static_cast<std::size_t>(total);
}

std::vector<Pose> EnumeratePoses(const GridSpec& grid, const OrientationSpec& orient,
                                 std::size_t cap) {
  grid.Validate();
  orient.Validate();
  const std::size_t n = PoseCount(grid, orient);
  if (n > cap) {
    throw CapacityError(fmt::format("{} poses requested, cap is {}", n, cap));
  }
  const auto positions = GridPositions(grid);
  const auto orientations = OrientationSphere(orient);
  std::vector<Pose> poses;
  poses.reserve(n);
  for (const auto& p : positions) {
    for (const auto& o : orientations) poses.push_back(Pose{p, o});
  }
  return poses;
}

Vec3 CenteredGridOrigin(const Aabb& box, const GridSpec& spec) {
  const Vec3 c = box.Center();
  return Vec3(c.x() - 0.5 * (spec.count_x - 1) * spec.step_x, box.max.y(),
              c.z() - 0.5 * (spec.count_z - 1) * spec.step_z);
}

}  // namespace posesynth
