#pragma once

// Test-only references for rotations, written without Eigen and without the
// library's closed forms.

#include <array>
#include <cmath>
#include <numbers>

namespace posesynth::oracle {

using Mat3 = std::array<std::array<double, 3>, 3>;

inline double Rad(double deg) { return deg * std::numbers::pi / 180.0; }

inline Mat3 Multiply(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline Mat3 RotX(double deg) {
  const double c = std::cos(Rad(deg)), s = std::sin(Rad(deg));
  return {{{1, 0, 0}, {0, c, -s}, {0, s, c}}};
}
inline Mat3 RotY(double deg) {
  const double c = std::cos(Rad(deg)), s = std::sin(Rad(deg));
  return {{{c, 0, s}, {0, 1, 0}, {-s, 0, c}}};
}
inline Mat3 RotZ(double deg) {
  const double c = std::cos(Rad(deg)), s = std::sin(Rad(deg));
  return {{{c, -s, 0}, {s, c, 0}, {0, 0, 1}}};
}

// Brute-force yaw-pitch-roll product.
inline Mat3 YawPitchRoll(double pitch, double yaw, double roll) {
  return Multiply(Multiply(RotY(yaw), RotX(pitch)), RotZ(roll));
}

struct Quat {
  double w, x, y, z;
};

inline Quat Mul(const Quat& a, const Quat& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

inline Quat AxisAngle(double ax, double ay, double az, double deg) {
  const double h = Rad(deg) / 2.0;
  return {std::cos(h), ax * std::sin(h), ay * std::sin(h), az * std::sin(h)};
}

inline Quat FromEuler(double pitch, double yaw, double roll) {
  return Mul(Mul(AxisAngle(0, 1, 0, yaw), AxisAngle(1, 0, 0, pitch)), AxisAngle(0, 0, 1, roll));
}

// Angle between two unit quaternions, in degrees, via the relative rotation
// q_a^* q_b: 2 atan2(|vec|, |w|).
inline double QuatAngleDeg(const Quat& a, const Quat& b) {
  const Quat conj{a.w, -a.x, -a.y, -a.z};
  const Quat rel = Mul(conj, b);
  const double vec = std::sqrt(rel.x * rel.x + rel.y * rel.y + rel.z * rel.z);
  return 2.0 * std::atan2(vec, std::abs(rel.w)) * 180.0 / std::numbers::pi;
}

}  // namespace posesynth::oracle
