#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "posesynth/geometry.h"
#include "posesynth/pointcloud.h"

namespace posesynth {

// Translation grid of virtual camera positions. The grid lies in the XZ
// plane through `origin`; cameras sit height_y above it (i.e. at
// origin.y - height_y, since up is -Y).
struct GridSpec {
  Vec3 origin = Vec3::Zero();
  double step_x = 1.0;
  double step_z = 1.0;
  int count_x = 1;
  int count_z = 1;
  double height_y = 1.6;

  void Validate() const;
};

// Headings sampled at every grid position.
struct OrientationSpec {
  int yaw_count = 8;
  std::vector<double> pitch_values{-10.0, 0.0, 10.0};
  double roll = 0.0;

  void Validate() const;
};

inline constexpr std::size_t kDefaultPoseCap = 10'000'000;

// Positions ordered with i (along X) varying fastest.
std::vector<Vec3> GridPositions(const GridSpec& spec);

// For each pitch value, yaw_count headings spaced 360 / yaw_count apart
// starting at 0. Results are normalized.
std::vector<Orientation> OrientationSphere(const OrientationSpec& spec);

// Cartesian product, grid-major. Throws CapacityError when the product would
// exceed `cap`.
std::vector<Pose> EnumeratePoses(const GridSpec& grid, const OrientationSpec& orient,
                                 std::size_t cap = kDefaultPoseCap);

std::size_t PoseCount(const GridSpec& grid, const OrientationSpec& orient);

// Origin that centers the grid over the XZ footprint of `box`, on the floor
// plane (the largest y, since up is -Y).
Vec3 CenteredGridOrigin(const Aabb& box, const GridSpec& spec);

}  // namespace posesynth
