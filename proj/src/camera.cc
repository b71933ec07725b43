#include "posesynth/camera.h"

#include <cmath>

#include "posesynth/errors.h"

namespace posesynth {

void Intrinsics::Validate() const {
  if (width < 1 || height < 1) {
    throw InvalidArgument("intrinsics: width and height must be >= 1");
  }
  if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy)) {
    throw InvalidArgument("intrinsics: focal lengths must be positive and finite");
  }
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    throw InvalidArgument("intrinsics: principal point outside the sensor");
  }
}

Intrinsics IntrinsicsFromFov(double fov_deg, int width, int height) {
  if (!(fov_deg > 0.0 && fov_deg < 180.0)) {
    throw InvalidArgument("field of view must lie in (0, 180) degrees");
  }
  if (width < 1 || height < 1) {
    throw InvalidArgument("image size must be at least 1x1");
  }
  Intrinsics intr;
  intr.fy = (height / 2.0) / std::tan(DegToRad(fov_deg / 2.0));
  intr.fx = intr.fy;
  intr.cx = width / 2.0;
  intr.cy = height / 2.0;
  intr.width = width;
  intr.height = height;
  return intr;
}

Intrinsics ScaleIntrinsics(const Intrinsics& intr, int new_width, int new_height) {
  if (new_width < 1 || new_height < 1) {
    throw InvalidArgument("scaled image size must be at least 1x1");
  }
  if (new_width == intr.width && new_height == intr.height) return intr;
  const double sx = static_cast<double>(new_width) / intr.width;
  const double sy = static_cast<double>(new_height) / intr.height;
  Intrinsics out = intr;
  out.fx *= sx;
  out.cx *= sx;
  out.fy *= sy;
  out.cy *= sy;
  out.width = new_width;
  out.height = new_height;
  return out;
}

ViewTransform PoseToView(const Pose& pose) {
  const RotationMatrix r = EulerToRotation(pose.orientation);
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = r.transpose();
  m.topRightCorner<3, 1>() = -(r.transpose() * pose.position);
  return ViewTransform(m);
}

std::optional<Projection> Project(const Intrinsics& intr, const ViewTransform& view,
                                  const Vec3& world, double near_plane) {
  const Vec3 c = view.Apply(world);
  if (!(c.z() > near_plane)) return std::nullopt;
  const double u = intr.fx * c.x() / c.z() + intr.cx;
  const double v = intr.fy * c.y() / c.z() + intr.cy;
  if (!(u >= 0.0 && u < intr.width && v >= 0.0 && v < intr.height)) return std::nullopt;
  return Projection{u, v, c.z()};
}

Vec3 Unproject(const Intrinsics& intr, const ViewTransform& view, const Projection& p) {
  const Vec3 c((p.u - intr.cx) * p.depth / intr.fx, (p.v - intr.cy) * p.depth / intr.fy,
               p.depth);
  return view.ApplyInverse(c);
}

}  // namespace posesynth
