// Copyright 2026 The gvgeom Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

namespace gvgeom {
namespace {

DepthMap px(double v) { return DepthMap(1, 1, v); }
UncertaintyMap sx(double v) { return UncertaintyMap(1, 1, v); }

double fuse1(double df, double dy, double sf, double sy) {
  return fuse(px(df), px(dy), sx(sf), sx(sy)).values[0];
}

TEST(Activate, Exp) {
  MaskedMap raw(1, 3);
  raw.values[0] = 0.0;
  raw.values[1] = std::log(2.0);
  raw.values[2] = -50.0;
  const UncertaintyMap s = activate_log_uncertainty(raw);
  EXPECT_DOUBLE_EQ(s.values[0], 1.0);
  EXPECT_NEAR(s.values[1], 2.0, 1e-15);
  EXPECT_EQ(s.values[2], kSigmaFloor);
}

TEST(Fuse, SymmetricMean) { EXPECT_DOUBLE_EQ(fuse1(10, 20, 1, 1), 15.0); }

TEST(Fuse, CertainFocalCueDominates) {
  EXPECT_NEAR(fuse1(10, 20, kSigmaFloor, 1), 10.0, 1e-4);
  EXPECT_NEAR(fuse1(10, 20, 0.0, 1), 10.0, 1e-4);
}

// Sigma_F = 3, Sigma_Y = 1: each depth is weighted by the other cue's
// uncertainty, so the larger Sigma_F pulls the result toward D_Y.
TEST(Fuse, OperandWeighting) { EXPECT_DOUBLE_EQ(fuse1(10, 20, 3, 1), 17.5); }

TEST(Fuse, BothBelowFloorGivesMean) {
  EXPECT_DOUBLE_EQ(fuse1(10, 20, 0.0, 0.0), 15.0);
  EXPECT_DOUBLE_EQ(fuse1(10, 20, 1e-9, 1e-12), 15.0);
}

TEST(Fuse, ContinuityAtFallback) {
  for (double s : {1e-3, 1e-5, 2e-6, 1e-6}) EXPECT_NEAR(fuse1(10, 20, s, s), 15.0, 1e-12);
}

TEST(Fuse, MaskIntersection) {
  DepthMap df(1, 4, 10.0), dy(1, 4, 20.0);
  UncertaintyMap sf(1, 4, 1.0), sy(1, 4, 1.0);
  df.valid[0] = 0;
  dy.valid[1] = 0;
  sf.valid[2] = 0;
  const DepthMap out = fuse(df, dy, sf, sy);
  EXPECT_FALSE(out.is_valid(0));
  EXPECT_FALSE(out.is_valid(1));
  EXPECT_FALSE(out.is_valid(2));
  EXPECT_TRUE(out.is_valid(3));
}

TEST(Fuse, Errors) {
  EXPECT_THROW(fuse(DepthMap(1, 2), px(1), sx(1), sx(1)), Error);
  EXPECT_THROW(fuse1(10, 20, -1.0, 1.0), Error);
}

TEST(Fuse, RandomProperties) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> depth(0.5, 100.0);
  // c * sigma stays above kSigmaFloor, where fusion is scale invariant.
  std::uniform_real_distribution<double> logs(-9.0, 3.0);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int k = 0; k < 100000; ++k) {
    const double df = depth(rng), dy = depth(rng);
    const double sf = std::exp(logs(rng)), sy = std::exp(logs(rng));
    const double f = fuse_pixel(df, dy, sf, sy);
    ASSERT_GE(f, std::min(df, dy) - 1e-12);
    ASSERT_LE(f, std::max(df, dy) + 1e-12);
    const double c = scale(rng);
    ASSERT_NEAR(fuse_pixel(df, dy, c * sf, c * sy), f, 1e-12 * f);
    ASSERT_NEAR(fuse_pixel(c * df, c * dy, sf, sy), c * f, 1e-12 * c * f);
  }
}

TEST(Gedepth, Endpoints) {
  DepthMap g(1, 3, 10.0), r(1, 3, 20.0);
  Grid<double> a(1, 3);
  a[0] = 1.0;
  a[1] = 0.0;
  a[2] = 0.5;
  const DepthMap out = gedepth_combine(a, g, r);
  EXPECT_EQ(out.values[0], 10.0);
  EXPECT_EQ(out.values[1], 20.0);
  EXPECT_EQ(out.values[2], 15.0);
}

TEST(Gedepth, IgnoresUnusedOperandMask) {
  DepthMap g(1, 2, 10.0), r(1, 2, 20.0);
  g.valid[0] = 0;
  r.valid[1] = 0;
  Grid<double> a(1, 2);
  a[0] = 0.0;
  a[1] = 1.0;
  const DepthMap out = gedepth_combine(a, g, r);
  EXPECT_TRUE(out.is_valid(0));
  EXPECT_TRUE(out.is_valid(1));
  a[0] = 0.5;
  EXPECT_FALSE(gedepth_combine(a, g, r).is_valid(0));
}

TEST(Gedepth, AttentionOutOfRange) {
  DepthMap g(1, 1, 10.0), r(1, 1, 20.0);
  EXPECT_THROW(gedepth_combine(Grid<double>(1, 1, 1.5), g, r), Error);
  EXPECT_THROW(gedepth_combine(Grid<double>(1, 1, -0.1), g, r), Error);
}

}  // namespace
}  // namespace gvgeom
