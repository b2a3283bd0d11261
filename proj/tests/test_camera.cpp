// Copyright 2026 The gvgeom Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "support.hpp"

namespace gvgeom {
namespace {

using testing::simple_rig;

// Depth along the optical axis of the plane (R e_z) . p + h = 0 hit by the
// ray K^-1 [u, v, 1], found by 3D intersection.
std::optional<double> ray_plane_depth(double u, double v, const CameraRig& rig) {
  const Vec3 dir = rig.intrinsics().inverse() * Vec3(u, v, 1.0);
  const Vec3 n = rotation_from_pitch(rig.pitch) * Vec3(0.0, 0.0, 1.0);
  const double nd = n.dot(dir);
  if (nd >= 0.0) return std::nullopt;
  const double t = -rig.height_m / nd;
  return t * dir.z();
}

TEST(Rotation, ZeroPitch) {
  Mat3 expected;
  expected << 1, 0, 0, 0, 0, -1, 0, 1, 0;
  EXPECT_EQ(rotation_from_pitch(0.0), expected);
}

TEST(Rotation, ThirtyDegreesRowTwo) {
  const Mat3 r = rotation_from_pitch(std::numbers::pi / 6.0);
  EXPECT_NEAR(r(1, 0), 0.0, 1e-15);
  EXPECT_NEAR(r(1, 1), 0.5, 1e-12);
  EXPECT_NEAR(r(1, 2), -0.8660254, 1e-7);
}

TEST(Rotation, OrthonormalForRandomPitch) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> th(-1.5, 1.5);
  for (int k = 0; k < 1000; ++k) {
    const Mat3 r = rotation_from_pitch(th(rng));
    EXPECT_LT((r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
  }
}

TEST(EgoToCamera, GroundPointAhead) {
  const Vec3 p = ego_to_camera(Vec3(0.0, 5.0, 0.0), simple_rig());
  EXPECT_NEAR(p.x(), 0.0, 1e-15);
  EXPECT_NEAR(p.y(), 1.5, 1e-15);
  EXPECT_NEAR(p.z(), 5.0, 1e-15);
}

TEST(EgoToCamera, EgoOrigin) {
  const Vec3 p = ego_to_camera(Vec3::Zero(), simple_rig());
  EXPECT_NEAR(p.x(), 0.0, 1e-15);
  EXPECT_NEAR(p.y(), 1.5, 1e-15);
  EXPECT_NEAR(p.z(), 0.0, 1e-15);
}

TEST(EgoToCamera, GroundPointsSatisfyCameraPlane) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> xy(-50.0, 50.0);
  for (int k = 0; k < 200; ++k) {
    const CameraRig rig = testing::random_rig(rng);
    const Vec3 pc = ego_to_camera(Vec3(xy(rng), xy(rng), 0.0), rig);
    const Vec3 n = rotation_from_pitch(rig.pitch) * Vec3(0.0, 0.0, 1.0);
    EXPECT_NEAR(n.dot(pc) + rig.height_m, 0.0, 1e-12);
    EXPECT_NEAR(camera_to_ego(pc, rig).z(), 0.0, 1e-12);
    EXPECT_LT((ground_normal_camera(rig.pitch) - n).norm(), 1e-15);
  }
}

TEST(EgoToCamera, InverseRoundTrip) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> c(-30.0, 30.0);
  for (int k = 0; k < 100; ++k) {
    const CameraRig rig = testing::random_rig(rng);
    const Vec3 p(c(rng), c(rng), c(rng));
    EXPECT_LT((camera_to_ego(ego_to_camera(p, rig), rig) - p).norm(), 1e-12);
  }
}

TEST(GroundDepth, BottomRow) {
  const auto d = ground_depth_at_pixel(0.0, 399.0, simple_rig());
  ASSERT_TRUE(d.has_value());
  EXPECT_NEAR(*d, 1050.0 / 199.0, 1e-12);
  EXPECT_NEAR(*d, 5.27638, 1e-5);
}

TEST(GroundDepth, HorizonIsInvalid) {
  EXPECT_FALSE(ground_depth_at_pixel(0.0, 200.0, simple_rig()).has_value());
  EXPECT_FALSE(ground_depth_at_pixel(0.0, 150.0, simple_rig()).has_value());
}

TEST(GroundDepth, NegativePitch) {
  CameraRig rig = simple_rig();
  rig.pitch = -0.01;
  const auto d = ground_depth_at_pixel(0.0, 399.0, rig);
  ASSERT_TRUE(d.has_value());
  EXPECT_NEAR(*d, 5.0973, 5e-5);
}

TEST(GroundDepth, MaxDepthCap) {
  GroundDepthOptions opts;
  opts.max_depth = 5.0;
  EXPECT_FALSE(ground_depth_at_pixel(0.0, 399.0, simple_rig(), opts).has_value());
  opts.max_depth = 6.0;
  EXPECT_TRUE(ground_depth_at_pixel(0.0, 399.0, simple_rig(), opts).has_value());
}

TEST(GroundDepth, MatchesRayPlaneIntersection) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int checked = 0;
  for (int k = 0; k < 20000; ++k) {
    const CameraRig rig = testing::random_rig(rng);
    const double u = u01(rng) * rig.image_width;
    const double vh = horizon_row(rig);
    const double v = vh + 1.0 + u01(rng) * (rig.image_height - vh - 1.0);
    if (v >= rig.image_height) continue;
    const auto d = ground_depth_at_pixel(u, v, rig);
    const auto ref = ray_plane_depth(u, v, rig);
    ASSERT_TRUE(d && ref);
    EXPECT_LT(testing::rel_err(*d, *ref), 1e-9);
    ++checked;
  }
  EXPECT_GT(checked, 1000);
}

TEST(GroundDepth, StrictlyDecreasingDownTheImage) {
  const CameraRig rig = testing::kitti_like_rig();
  double prev = std::numeric_limits<double>::infinity();
  for (double v = std::ceil(horizon_row(rig)) + 0.25; v < rig.image_height; v += 0.5) {
    const auto d = ground_depth_at_pixel(0.0, v, rig);
    ASSERT_TRUE(d.has_value());
    EXPECT_LT(*d, prev);
    prev = *d;
  }
}

TEST(GroundDepth, PoleApproach) {
  const CameraRig rig = simple_rig();
  const auto d = ground_depth_at_pixel(0.0, horizon_row(rig) + 1e-3, rig);
  ASSERT_TRUE(d.has_value());
  EXPECT_GT(*d, 1e5);
}

TEST(Backproject, PrincipalRay) {
  const Vec3 p = backproject(320.0, 200.0, 10.0, simple_rig());
  EXPECT_EQ(p, Vec3(0.0, 0.0, 10.0));
}

TEST(Backproject, UnitSlope) {
  const CameraRig rig = simple_rig();
  const Vec3 p = backproject(rig.cx + rig.fx, rig.cy, 10.0, rig);
  EXPECT_NEAR(p.x(), 10.0, 1e-12);
  EXPECT_NEAR(p.y(), 0.0, 1e-12);
  EXPECT_NEAR(p.z(), 10.0, 1e-12);
}

TEST(Backproject, ProjectRoundTrip) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const CameraRig rig = testing::random_rig(rng);
    const double u = u01(rng) * rig.image_width, v = u01(rng) * rig.image_height;
    const Pixel px = project(backproject(u, v, 0.5 + 80.0 * u01(rng), rig), rig);
    EXPECT_NEAR(px.u, u, 1e-9);
    EXPECT_NEAR(px.v, v, 1e-9);
  }
}

TEST(Horizon, ZeroPitchIsPrincipalRow) {
  EXPECT_EQ(horizon_row(simple_rig()), 200.0);
}

TEST(Horizon, SmallPitch) {
  CameraRig rig = simple_rig();
  rig.pitch = 0.01;
  EXPECT_NEAR(horizon_row(rig), 207.0002, 1e-4);
}

TEST(Rig, Validation) {
  CameraRig rig = simple_rig();
  EXPECT_NO_THROW(rig.validate());
  rig.height_m = 0.0;
  EXPECT_THROW(rig.validate(), Error);
  rig = simple_rig();
  rig.pitch = std::numbers::pi / 2.0;
  EXPECT_THROW(rig.validate(), Error);
  rig = simple_rig();
  rig.fy = -1.0;
  EXPECT_THROW(rig.validate(), Error);
  rig = simple_rig();
  rig.image_width = 0;
  EXPECT_THROW(rig.validate(), Error);
}

}  // namespace
}  // namespace gvgeom
