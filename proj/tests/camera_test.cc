#include "posesynth/camera.h"

#include <cmath>
#include <random>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "posesynth/errors.h"

namespace posesynth {
namespace {

Pose MakePose(double x, double y, double z, double pitch, double yaw, double roll) {
  return Pose::FromArray({x, y, z, pitch, yaw, roll});
}

TEST(IntrinsicsFromFov, Examples) {
  const Intrinsics a = IntrinsicsFromFov(90, 224, 224);
  EXPECT_NEAR(a.fx, 112.0, 1e-12);
  EXPECT_NEAR(a.fy, 112.0, 1e-12);
  EXPECT_EQ(a.cx, 112.0);
  EXPECT_EQ(a.cy, 112.0);

  // 112 / tan(30 deg), evaluated by hand: 193.98969...
  const Intrinsics b = IntrinsicsFromFov(60, 224, 224);
  EXPECT_NEAR(b.fy, 193.98969044771428, 1e-9);
  EXPECT_EQ(b.fx, b.fy);

  const Intrinsics c = IntrinsicsFromFov(90, 448, 224);
  EXPECT_NEAR(c.fy, 112.0, 1e-12);
  EXPECT_EQ(c.cx, 224.0);
  EXPECT_EQ(c.cy, 112.0);
}

TEST(IntrinsicsFromFov, RejectsOutOfRange) {
  EXPECT_THROW(IntrinsicsFromFov(0, 224, 224), InvalidArgument);
  EXPECT_THROW(IntrinsicsFromFov(180, 224, 224), InvalidArgument);
  EXPECT_THROW(IntrinsicsFromFov(-5, 224, 224), InvalidArgument);
  EXPECT_THROW(IntrinsicsFromFov(60, 0, 224), InvalidArgument);
}

TEST(Intrinsics, ValidateChecksInvariants) {
  Intrinsics in = IntrinsicsFromFov(60, 100, 80);
  EXPECT_NO_THROW(in.Validate());
  Intrinsics bad = in;
  bad.fx = 0;
  EXPECT_THROW(bad.Validate(), InvalidArgument);
  bad = in;
  bad.cx = 100;
  EXPECT_THROW(bad.Validate(), InvalidArgument);
}

TEST(ScaleIntrinsics, Examples) {
  const Intrinsics big = IntrinsicsFromFov(70, 448, 448);
  const Intrinsics half = ScaleIntrinsics(big, 224, 224);
  EXPECT_DOUBLE_EQ(half.fx, big.fx / 2);
  EXPECT_DOUBLE_EQ(half.fy, big.fy / 2);
  EXPECT_DOUBLE_EQ(half.cx, big.cx / 2);
  EXPECT_DOUBLE_EQ(half.cy, big.cy / 2);

  EXPECT_EQ(ScaleIntrinsics(big, 448, 448), big);

  const Intrinsics vga{500, 500, 320, 240, 640, 480};
  const Intrinsics q = ScaleIntrinsics(vga, 320, 240);
  EXPECT_EQ(q, (Intrinsics{250, 250, 160, 120, 320, 240}));
  EXPECT_THROW(ScaleIntrinsics(vga, 0, 240), InvalidArgument);
}

TEST(PoseToView, Examples) {
  EXPECT_EQ(PoseToView(Pose{}).Apply(Vec3(0, 0, 5)), Vec3(0, 0, 5));
  EXPECT_EQ(PoseToView(MakePose(0, 0, 5, 0, 0, 0)).Apply(Vec3(0, 0, 5)), Vec3(0, 0, 0));
  const Vec3 c = PoseToView(MakePose(0, 0, 0, 0, 90, 0)).Apply(Vec3(5, 0, 0));
  EXPECT_NEAR((c - Vec3(0, 0, 5)).norm(), 0.0, 1e-12);
}

TEST(PoseToView, LastRowAndRotationBlock) {
  const ViewTransform v = PoseToView(MakePose(1, 2, 3, 10, 20, 30));
  EXPECT_EQ(v.matrix().row(3), Eigen::RowVector4d(0, 0, 0, 1));
  const Eigen::Matrix3d r = v.rotation();
  EXPECT_NEAR((r.transpose() * r - Eigen::Matrix3d::Identity()).norm(), 0.0, 1e-12);
  EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
}

TEST(Project, Examples) {
  const Intrinsics in = IntrinsicsFromFov(90, 224, 224);
  const ViewTransform id = PoseToView(Pose{});
  const auto center = Project(in, id, Vec3(0, 0, 5));
  ASSERT_TRUE(center);
  EXPECT_NEAR(center->u, 112, 1e-12);
  EXPECT_NEAR(center->v, 112, 1e-12);
  EXPECT_EQ(center->depth, 5);

  // u = 112 * 5 / 5 + 112 = 224, on the exclusive boundary.
  EXPECT_FALSE(Project(in, id, Vec3(5, 0, 5)));
  EXPECT_FALSE(Project(in, id, Vec3(0, 0, -1)));
  EXPECT_FALSE(Project(in, id, Vec3(0, 0, 0.005)));  // inside the near plane
  EXPECT_TRUE(Project(in, id, Vec3(0, 0, 0.02)));
}

TEST(Project, UpIsTowardTopRows) {
  // -Y is up: a point above the optical axis lands above the image center.
  const Intrinsics in = IntrinsicsFromFov(90, 224, 224);
  const auto p = Project(in, PoseToView(Pose{}), Vec3(0, -1, 5));
  ASSERT_TRUE(p);
  EXPECT_LT(p->v, 112);
  // Positive pitch looks up.
  const auto q = Project(in, PoseToView(MakePose(0, 0, 0, 30, 0, 0)), Vec3(0, -1, 5));
  ASSERT_TRUE(q);
  EXPECT_GT(q->v, p->v);
}

TEST(Project, UnprojectRecoversWorldPoint) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(-20, 20), ang(-180, 180), unit(0, 1);
  int checked = 0;
  for (int i = 0; i < 5000; ++i) {
    const Pose pose = MakePose(pos(rng), pos(rng), pos(rng), ang(rng) / 2, ang(rng), ang(rng));
    const Intrinsics in = IntrinsicsFromFov(40 + 100 * unit(rng), 320, 240);
    const ViewTransform view = PoseToView(pose);
    // Sample a point in front of the camera.
    const Vec3 cam(pos(rng), pos(rng), 0.1 + 30 * unit(rng));
    const Vec3 world = view.ApplyInverse(cam);
    const auto p = Project(in, view, world);
    if (!p) continue;
    ++checked;
    EXPECT_NEAR((Unproject(in, view, *p) - world).norm(), 0.0, 1e-6);
  }
  EXPECT_GT(checked, 100);
}

TEST(Project, InvariantUnderSharedRigidMotion) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> pos(-10, 10), ang(-180, 180), unit(0, 1);
  const Intrinsics in = IntrinsicsFromFov(75, 224, 224);
  int checked = 0;
  for (int i = 0; i < 3000; ++i) {
    const Pose pose = MakePose(pos(rng), pos(rng), pos(rng), ang(rng) / 2, ang(rng), ang(rng));
    const ViewTransform view = PoseToView(pose);
    const Vec3 world = view.ApplyInverse(Vec3(pos(rng) / 3, pos(rng) / 3, 0.5 + 10 * unit(rng)));
    const auto before = Project(in, view, world);
    if (!before) continue;

    // Rigid motion M = (Q, s) applied to both point and camera.
    const RotationMatrix q = EulerToRotation({ang(rng) / 2, ang(rng), ang(rng)});
    const Vec3 s(pos(rng), pos(rng), pos(rng));
    const RotationMatrix r_new = q * EulerToRotation(pose.orientation);
    Pose moved;
    moved.position = q * pose.position + s;
    moved.orientation = RotationToEuler(r_new).angles;
    const auto after = Project(in, PoseToView(moved), q * world + s);
    if (!after) continue;  // a pixel right at the border may flip out
    ++checked;
    EXPECT_NEAR(after->u, before->u, 1e-6);
    EXPECT_NEAR(after->v, before->v, 1e-6);
    EXPECT_NEAR(after->depth, before->depth, 1e-6);
  }
  EXPECT_GT(checked, 1000);
}

}  // namespace
}  // namespace posesynth
