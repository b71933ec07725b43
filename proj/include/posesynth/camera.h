#pragma once

#include <optional>

#include <Eigen/Core>

#include "posesynth/geometry.h"

namespace posesynth {

// Ideal pinhole camera: zero skew, no distortion.
struct Intrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  // Throws InvalidArgument when the invariants (positive focal lengths,
  // principal point inside the sensor, nonzero size) do not hold.
  void Validate() const;

  friend bool operator==(const Intrinsics&, const Intrinsics&) = default;
};

// World -> camera rigid transform. The camera looks down its +Z axis, +X is
// image right and +Y is image down.
class ViewTransform {
 public:
  ViewTransform() = default;
  explicit ViewTransform(const Eigen::Matrix4d& m) : matrix_(m) {}

  const Eigen::Matrix4d& matrix() const { return matrix_; }
  Eigen::Matrix3d rotation() const { return matrix_.topLeftCorner<3, 3>(); }
  Vec3 translation() const { return matrix_.topRightCorner<3, 1>(); }

  Vec3 Apply(const Vec3& world) const { return rotation() * world + translation(); }
  // Camera coordinates back to world coordinates.
  Vec3 ApplyInverse(const Vec3& camera) const {
    return rotation().transpose() * (camera - translation());
  }

 private:
  Eigen::Matrix4d matrix_ = Eigen::Matrix4d::Identity();
};

struct Projection {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
};

inline constexpr double kDefaultNearPlane = 0.01;

// Square pixels, centered principal point. fov_deg is the vertical field of
// view and must lie in (0, 180).
Intrinsics IntrinsicsFromFov(double fov_deg, int width, int height);

Intrinsics ScaleIntrinsics(const Intrinsics& intr, int new_width, int new_height);

// Camera coordinates of world point x are R^T (x - t).
ViewTransform PoseToView(const Pose& pose);

// Pixel coordinates and depth of `world`, or nothing when the point is at or
// behind the near plane or lands outside [0, width) x [0, height).
std::optional<Projection> Project(const Intrinsics& intr, const ViewTransform& view,
                                  const Vec3& world, double near_plane = kDefaultNearPlane);

// Inverse of Project for a known depth.
Vec3 Unproject(const Intrinsics& intr, const ViewTransform& view, const Projection& p);

}  // namespace posesynth
