#include "posesynth/geometry.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "posesynth/errors.h"

namespace posesynth {
namespace {

// sin/cos of an angle in degrees, exact at multiples of 90.
void SinCosDeg(double deg, double* s, double* c) {
  const double wrapped = std::fmod(deg, 360.0);
  const double quarter = wrapped / 90.0;
  if (quarter == std::floor(quarter)) {
    static constexpr double kSin[4] = {0.0, 1.0, 0.0, -1.0};
    static constexpr double kCos[4] = {1.0, 0.0, -1.0, 0.0};
    const int k = (static_cast<int>(quarter) % 4 + 4) % 4;
    *s = kSin[k];
    *c = kCos[k];
    return;
  }
  const double rad = DegToRad(wrapped);
  *s = std::sin(rad);
  *c = std::cos(rad);
}

void RequireFinite(const Orientation& o) {
  if (!std::isfinite(o.pitch) || !std::isfinite(o.yaw) || !std::isfinite(o.roll)) {
    throw InvalidArgument("orientation has non-finite component");
  }
}

// Below this |cos(pitch)| the yaw and roll axes coincide (~1e-9 degrees from
// the pole).
constexpr double kGimbalCos = 1.7453292519943295e-11;

}  // namespace

std::array<double, 6> Pose::AsArray() const {
  return {position.x(), position.y(), position.z(),
          orientation.pitch, orientation.yaw, orientation.roll};
}

Pose Pose::FromArray(const std::array<double, 6>& v) {
  Pose p;
  p.position = Vec3(v[0], v[1], v[2]);
  p.orientation = {v[3], v[4], v[5]};
  return p;
}

double DegToRad(double deg) { return deg * (std::numbers::pi / 180.0); }
double RadToDeg(double rad) { return rad * (180.0 / std::numbers::pi); }

double WrapDegrees(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r > 180.0) {
    r -= 360.0;
  } else if (r <= -180.0) {
    r += 360.0;
  }
  return r == 0.0 ? 0.0 : r;  // no negative zero
}

RotationMatrix EulerToRotation(const Orientation& o) {
  RequireFinite(o);
  double sp, cp, sy, cy, sr, cr;
  SinCosDeg(o.pitch, &sp, &cp);
  SinCosDeg(o.yaw, &sy, &cy);
  SinCosDeg(o.roll, &sr, &cr);

  // Closed form of R_Y(yaw) * R_X(pitch) * R_Z(roll).
  RotationMatrix r;
  r(0, 0) = cy * cr + sy * sp * sr;
  r(0, 1) = -cy * sr + sy * sp * cr;
  r(0, 2) = sy * cp;
  r(1, 0) = cp * sr;
  r(1, 1) = cp * cr;
  r(1, 2) = -sp;
  r(2, 0) = -sy * cr + cy * sp * sr;
  r(2, 1) = sy * sr + cy * sp * cr;
  r(2, 2) = cy * cp;
  return r;
}

EulerDecomposition RotationToEuler(const RotationMatrix& r) {
  EulerDecomposition out;
  const double cos_pitch = std::hypot(r(1, 0), r(1, 1));
  out.angles.pitch = WrapDegrees(RadToDeg(std::atan2(-r(1, 2), cos_pitch)));
  if (cos_pitch < kGimbalCos) {
    out.gimbal_locked = true;
    out.angles.pitch = r(1, 2) < 0.0 ? 90.0 : -90.0;
    out.angles.yaw = WrapDegrees(RadToDeg(std::atan2(-r(2, 0), r(0, 0))));
    out.angles.roll = 0.0;
    return out;
  }
  out.angles.yaw = WrapDegrees(RadToDeg(std::atan2(r(0, 2), r(2, 2))));
  out.angles.roll = WrapDegrees(RadToDeg(std::atan2(r(1, 0), r(1, 1))));
  return out;
}

Orientation NormalizeOrientation(const Orientation& o) {
  Orientation n{WrapDegrees(o.pitch), WrapDegrees(o.yaw), WrapDegrees(o.roll)};
  // (yaw, pitch, roll) and (yaw + 180, 180 - pitch, roll + 180) are the same
  // rotation; use the latter to bring pitch back into [-90, 90].
  if (n.pitch > 90.0 || n.pitch < -90.0) {
    n.pitch = WrapDegrees((n.pitch > 0.0 ? 180.0 : -180.0) - n.pitch);
    n.yaw = WrapDegrees(n.yaw + 180.0);
    n.roll = WrapDegrees(n.roll + 180.0);
  }
  return n;
}

bool IsNormalized(const Orientation& o) {
  const auto in_half_open = [](double a) { return a > -180.0 && a <= 180.0; };
  return std::isfinite(o.pitch) && o.pitch >= -90.0 && o.pitch <= 90.0 &&
         in_half_open(o.yaw) && in_half_open(o.roll);
}

double GeodesicAngle(const Orientation& a, const Orientation& b) {
  const RotationMatrix rel = EulerToRotation(a).transpose() * EulerToRotation(b);
  // acos((trace - 1) / 2) evaluated through atan2 of the symmetric and
  // antisymmetric parts, which stays accurate near 0 and 180 degrees.
  const double cos_theta = std::clamp((rel.trace() - 1.0) / 2.0, -1.0, 1.0);
  const Vec3 axis(rel(2, 1) - rel(1, 2), rel(0, 2) - rel(2, 0), rel(1, 0) - rel(0, 1));
  const double sin_theta = 0.5 * axis.norm();
  return std::clamp(RadToDeg(std::atan2(sin_theta, cos_theta)), 0.0, 180.0);
}

std::array<double, 6> PoseDifference(const Pose& pred, const Pose& gt) {
  std::array<double, 6> d{};
  const auto p = pred.AsArray();
  const auto g = gt.AsArray();
  for (int i = 0; i < 6; ++i) {
    d[i] = p[i] - g[i];
    if (i >= 3) d[i] = WrapDegrees(d[i]);
  }
  return d;
}

double PoseLoss(const Pose& pred, const Pose& gt, const LossWeights& weights) {
  for (double w : weights.w) {
    if (!std::isfinite(w) || w < 0.0) {
      throw InvalidArgument("loss weights must be finite and non-negative");
    }
  }
  const auto d = PoseDifference(pred, gt);
  double sum = 0.0;
  for (int i = 0; i < 6; ++i) {
    const double term = weights.w[i] * d[i];
    sum += term * term;
  }
  return std::sqrt(sum);
}

bool IsFinite(const Pose& pose) {
  for (double v : pose.AsArray()) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace posesynth
