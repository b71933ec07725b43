#pragma once

#include <array>

#include <Eigen/Core>

namespace posesynth {

// World frame conventions used everywhere in the project:
//   * right-handed, vertical axis Y, and "up" is -Y (the camera frame of the
//     SfM tools we ingest from: X right, Y down, Z forward);
//   * orientation = intrinsic yaw (about Y), then pitch (about X), then roll
//     (about Z): R = R_Y(yaw) * R_X(pitch) * R_Z(roll);
//   * positive pitch tilts the optical axis up, pitch -90 looks straight down.
// Angles are in degrees, positions in meters.

using Vec3 = Eigen::Vector3d;
using RotationMatrix = Eigen::Matrix3d;

struct Orientation {
  double pitch = 0.0;
  double yaw = 0.0;
  double roll = 0.0;

  friend bool operator==(const Orientation&, const Orientation&) = default;
};

struct Pose {
  Vec3 position = Vec3::Zero();
  Orientation orientation;

  // The 6-vector [x, y, z, pitch, yaw, roll].
  std::array<double, 6> AsArray() const;
  static Pose FromArray(const std::array<double, 6>& v);

  friend bool operator==(const Pose& a, const Pose& b) {
    return a.position == b.position && a.orientation == b.orientation;
  }
};

// Per-component weights for the pose loss, in [x, y, z, pitch, yaw, roll]
// order. Defaults to all ones, which treats 1 m and 1 degree as equal.
struct LossWeights {
  std::array<double, 6> w{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
};

struct EulerDecomposition {
  Orientation angles;
  // Set when |pitch| is 90 degrees; yaw then absorbs the whole yaw/roll
  // rotation and roll is reported as 0.
  bool gimbal_locked = false;
};

double DegToRad(double deg);
double RadToDeg(double rad);

// Wraps an angle into (-180, 180].
double WrapDegrees(double deg);

// Throws InvalidArgument on non-finite angles.
RotationMatrix EulerToRotation(const Orientation& o);

EulerDecomposition RotationToEuler(const RotationMatrix& r);

// Equivalent orientation with pitch in [-90, 90] and yaw, roll in (-180, 180].
Orientation NormalizeOrientation(const Orientation& o);

bool IsNormalized(const Orientation& o);

// Minimal rotation angle between two orientations, in [0, 180] degrees.
double GeodesicAngle(const Orientation& a, const Orientation& b);

// ||w (.) (pred - gt)||_2 with angle differences wrapped to (-180, 180].
// Throws InvalidArgument for negative or non-finite weights.
double PoseLoss(const Pose& pred, const Pose& gt, const LossWeights& weights = {});

// Per-component wrapped difference pred - gt.
std::array<double, 6> PoseDifference(const Pose& pred, const Pose& gt);

bool IsFinite(const Pose& pose);

}  // namespace posesynth
