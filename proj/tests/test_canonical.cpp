// Copyright 2026 The gvgeom Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

namespace gvgeom {
namespace {

using testing::simple_rig;

DepthMap constant_depth(int rows, int cols, double d) { return DepthMap(rows, cols, d); }

CanonicalMap constant_vertical(int rows, int cols, double y) {
  return CanonicalMap(CanonicalKind::kVertical, MaskedMap(rows, cols, y));
}

TEST(Fct, IdentityWhenFocalsMatch) {
  CameraRig rig = simple_rig();
  CanonicalConfig cfg;
  cfg.focal = rig.fy;
  const DepthMap d = constant_depth(3, 4, 12.5);
  const CanonicalMap c = fct_from_depth(d, rig, cfg);
  EXPECT_EQ(c.values, d.values);
  EXPECT_EQ(fct_to_depth(c, rig, cfg).values, d.values);
}

TEST(Fct, RatioTwo) {
  CameraRig rig = simple_rig();
  rig.fy = 1400.0;
  const CanonicalConfig cfg;
  const CanonicalMap c(CanonicalKind::kFocal, MaskedMap(2, 2, 10.0));
  EXPECT_DOUBLE_EQ(fct_to_depth(c, rig, cfg).values[0], 20.0);
  EXPECT_DOUBLE_EQ(fct_from_depth(constant_depth(2, 2, 20.0), rig, cfg).values[0], 10.0);
}

TEST(Fct, RoundTripAndMask) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.5, 90.0);
  const CameraRig rig = testing::kitti_like_rig();
  const CanonicalConfig cfg;
  DepthMap d(5, 7);
  for (double& x : d.values.flat()) x = u(rng);
  d.valid(2, 3) = 0;
  const DepthMap back = fct_to_depth(fct_from_depth(d, rig, cfg), rig, cfg);
  EXPECT_EQ(back.valid, d.valid);
  for (std::size_t i = 0; i < d.size(); ++i)
    EXPECT_LT(testing::rel_err(back.values[i], d.values[i]), 1e-12);
  const CanonicalMap c = fct_from_depth(d, rig, cfg);
  const DepthMap back_c = fct_to_depth(c, rig, cfg);
  for (std::size_t i = 0; i < d.size(); ++i)
    EXPECT_LT(testing::rel_err(fct_from_depth(back_c, rig, cfg).values[i], c.values[i]), 1e-12);
}

TEST(Fct, Homogeneous) {
  const CameraRig rig = testing::kitti_like_rig();
  const CanonicalConfig cfg;
  const CanonicalMap c(CanonicalKind::kFocal, MaskedMap(1, 1, 7.0));
  const CanonicalMap c3(CanonicalKind::kFocal, MaskedMap(1, 1, 21.0));
  EXPECT_NEAR(fct_to_depth(c3, rig, cfg).values[0], 3.0 * fct_to_depth(c, rig, cfg).values[0],
              1e-12);
}

TEST(Fct, RejectsVerticalMap) {
  EXPECT_THROW(fct_to_depth(constant_vertical(1, 1, 3.0), simple_rig(), {}), Error);
}

TEST(ExtendedHeight, ClosedForm) {
  EXPECT_NEAR(extended_height(simple_rig(), {}), 1250.0, 1e-12);
}

TEST(ExtendedHeight, FlooredAtImageHeight) {
  CanonicalConfig cfg;
  cfg.min_ext_depth = 50.0;
  EXPECT_EQ(extended_height(simple_rig(), cfg), 400.0);
}

TEST(ExtendedHeight, BottomRowImagesMinDepth) {
  std::mt19937_64 rng(4);
  const CanonicalConfig cfg;
  for (int k = 0; k < 100; ++k) {
    const CameraRig rig = testing::random_rig(rng);
    const double h_ext = extended_height(rig, cfg);
    if (h_ext == rig.image_height) continue;
    const auto d = ground_depth_at_vertical(0.0, h_ext, rig);
    ASSERT_TRUE(d.has_value());
    EXPECT_NEAR(*d, cfg.min_ext_depth, 1e-9);
  }
}

TEST(YMax, ClosedForm) {
  EXPECT_NEAR(y_max(simple_rig(), {}), 1036.875, 1e-9);
  const VerticalTransform vct(simple_rig(), {});
  EXPECT_NEAR(vct.y_max(), 1036.875, 1e-9);
  EXPECT_NEAR(vct.to_depth(vct.y_max()), 80.0, 1e-9);
}

TEST(YMax, PositiveForRandomRigs) {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 200; ++k) EXPECT_GT(y_max(testing::random_rig(rng), {}), 0.0);
}

TEST(Vct, AnchorsAtDomainEnds) {
  const CameraRig rig = simple_rig();
  const CanonicalConfig cfg;
  const auto lo = vct_to_depth(constant_vertical(2, 3, 0.0), rig, cfg);
  const auto hi = vct_to_depth(constant_vertical(2, 3, y_max(rig, cfg)), rig, cfg);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_NEAR(lo.depth.values[i], 1.0, 1e-9);
    EXPECT_NEAR(hi.depth.values[i], 80.0, 1e-9);
  }
  EXPECT_EQ(lo.clamped, 0u);
}

TEST(Vct, MidDomain) {
  const auto r = vct_to_depth(constant_vertical(1, 1, 518.4375), simple_rig(), {});
  EXPECT_NEAR(r.depth.values[0], 1050.0 / (1250.0 - 200.0 - 518.4375), 1e-12);
  EXPECT_NEAR(r.depth.values[0], 1.975309, 1e-6);
}

TEST(Vct, InverseOfCameraExampleOnUnextendedImage) {
  const CameraRig rig = simple_rig();
  EXPECT_NEAR(vertical_from_ground_depth(1050.0 / 199.0, 400.0, rig), 1.0, 1e-12);
  EXPECT_NEAR(vertical_from_ground_depth(5.27638, 400.0, rig), 1.0, 1e-4);
  const VerticalTransform vct(rig, {}, 400.0);
  EXPECT_NEAR(vct.from_depth(1050.0 / 199.0), 1.0, 1e-12);
}

TEST(Vct, MaxDepthMapsToYMax) {
  const auto r = vct_from_depth(constant_depth(1, 1, 80.0), simple_rig(), {});
  EXPECT_NEAR(r.canonical.values[0], 1036.875, 1e-9);
  EXPECT_EQ(r.canonical.kind, CanonicalKind::kVertical);
}

TEST(Vct, ClampsOutOfRangeWithCount) {
  const CameraRig rig = simple_rig();
  CanonicalMap c = constant_vertical(1, 4, 100.0);
  c.values[0] = -5.0;
  c.values[1] = 5000.0;
  c.valid[3] = 0;
  const auto r = vct_to_depth(c, rig, {});
  EXPECT_EQ(r.clamped, 2u);
  EXPECT_NEAR(r.depth.values[0], 1.0, 1e-9);
  EXPECT_NEAR(r.depth.values[1], 80.0, 1e-9);
  EXPECT_FALSE(r.depth.is_valid(3));

  DepthMap d = constant_depth(1, 3, 10.0);
  d.values[0] = 0.2;
  d.values[1] = 400.0;
  const auto e = vct_from_depth(d, rig, {});
  EXPECT_EQ(e.clamped, 2u);
  EXPECT_NEAR(e.canonical.values[0], 0.0, 1e-9);
  EXPECT_NEAR(e.canonical.values[1], 1036.875, 1e-9);
}

TEST(Vct, NonFiniteBecomesInvalid) {
  CanonicalMap c = constant_vertical(1, 2, 10.0);
  c.values[0] = std::numeric_limits<double>::quiet_NaN();
  const auto r = vct_to_depth(c, simple_rig(), {});
  EXPECT_FALSE(r.depth.is_valid(0));
  EXPECT_TRUE(r.depth.is_valid(1));
}

TEST(Vct, RoundTripOnRandomRigs) {
  std::mt19937_64 rng(8);
  const CanonicalConfig cfg;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const CameraRig rig = testing::random_rig(rng);
    const VerticalTransform vct(rig, cfg);
    const double lo = vct.min_depth() + 1e-3, hi = cfg.max_depth - 1e-3;
    DepthMap d(4, 4);
    for (double& x : d.values.flat()) x = lo + (hi - lo) * u01(rng);
    const auto c = vct_from_depth(d, vct);
    EXPECT_EQ(c.clamped, 0u);
    const auto back = vct_to_depth(c.canonical, vct);
    for (std::size_t i = 0; i < d.size(); ++i)
      EXPECT_LT(testing::rel_err(back.depth.values[i], d.values[i]), 1e-9);
  }
}

TEST(Vct, StrictlyIncreasingInY) {
  const VerticalTransform vct(testing::kitti_like_rig(), {});
  double prev = 0.0;
  for (double y = 0.0; y <= vct.y_max(); y += vct.y_max() / 997.0) {
    const double d = vct.to_depth(y);
    EXPECT_GT(d, prev);
    prev = d;
  }
}

TEST(Vct, EmptyRangeIsDegenerate) {
  CameraRig rig = simple_rig();
  rig.pitch = 0.5;  // horizon below the bottom row
  EXPECT_THROW((void)VerticalTransform(rig, {}, rig.image_height), Error);
  EXPECT_NO_THROW((void)VerticalTransform(rig, {}));
}

TEST(Config, Validation) {
  CanonicalConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.min_ext_depth = 90.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.focal = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Disentanglement, SameDepthThroughDifferentRigs) {
  std::mt19937_64 rng(10);
  const CanonicalConfig cfg;
  const CameraRig a = testing::kitti_like_rig();
  CameraRig b = a;
  b.fy = 1100.0;
  b.fx = 1100.0;
  b.cy = 300.0;
  b.image_height = 720;
  std::uniform_real_distribution<double> depth(2.0, 79.0);
  const VerticalTransform va(a, cfg), vb(b, cfg);
  for (int k = 0; k < 500; ++k) {
    const double d = depth(rng);
    const double ya = va.from_depth(d), yb = vb.from_depth(d);
    EXPECT_NE(ya, yb);
    EXPECT_LT(testing::rel_err(va.to_depth(ya), d), 1e-12);
    EXPECT_LT(testing::rel_err(vb.to_depth(yb), d), 1e-12);
  }
}

}  // namespace
}  // namespace gvgeom
