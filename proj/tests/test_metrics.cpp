// Copyright 2026 The gvgeom Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

namespace gvgeom {
namespace {

DepthMap random_gt(int rows, int cols, std::uint64_t seed, double lo = 1.0, double hi = 80.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  DepthMap d(rows, cols);
  for (double& x : d.values.flat()) x = u(rng);
  return d;
}

DepthMap scaled(const DepthMap& d, double s) {
  DepthMap out = d;
  for (double& x : out.values.flat()) x *= s;
  return out;
}

DepthMap analytic_ground(const CameraRig& rig) {
  DepthMap g(rig.image_height, rig.image_width, 0.0, false);
  for (int r = 0; r < g.rows(); ++r) {
    const auto d = ground_depth_at_pixel(0.0, pixel_center(r), rig);
    if (!d) continue;
    for (int c = 0; c < g.cols(); ++c) {
      g.values(r, c) = *d;
      g.valid(r, c) = 1;
    }
  }
  return g;
}

TEST(Metrics, PerfectPrediction) {
  const DepthMap gt = random_gt(20, 30, 1);
  const MetricReport m = compute_metrics(gt, gt);
  EXPECT_EQ(m.abs_rel, 0.0);
  EXPECT_EQ(m.rms, 0.0);
  EXPECT_EQ(m.rms_log, 0.0);
  EXPECT_EQ(m.delta1, 1.0);
  EXPECT_EQ(m.n_valid, 600u);
}

TEST(Metrics, UniformOverestimate) {
  const DepthMap gt = random_gt(20, 30, 2, 1.0, 60.0);
  const MetricReport m = compute_metrics(scaled(gt, 1.2), gt);
  EXPECT_NEAR(m.abs_rel, 0.2, 1e-12);
  EXPECT_NEAR(m.rms_log, std::log(1.2), 1e-12);
  EXPECT_EQ(m.delta1, 1.0);

  const MetricReport m3 = compute_metrics(scaled(gt, 1.3), gt);
  EXPECT_EQ(m3.delta1, 0.0);
  EXPECT_EQ(m3.delta2, 1.0);
  EXPECT_EQ(m3.delta3, 1.0);
}

TEST(Metrics, DeltaOrdering) {
  const DepthMap gt = random_gt(30, 30, 3);
  const DepthMap pred = inject_noise(gt, {NoiseKind::kGaussianLogDepth, 0.3}, 4);
  const MetricReport m = compute_metrics(pred, gt);
  EXPECT_LE(m.delta1, m.delta2);
  EXPECT_LE(m.delta2, m.delta3);
  EXPECT_GT(m.delta1, 0.0);
  EXPECT_LT(m.delta1, 1.0);
}

TEST(Metrics, ScaleBehaviour) {
  const DepthMap gt = random_gt(30, 30, 5, 1.0, 20.0);
  const DepthMap pred = inject_noise(gt, {NoiseKind::kGaussianLogDepth, 0.1}, 6);
  const MetricReport a = compute_metrics(pred, gt);
  const MetricReport b = compute_metrics(scaled(pred, 3.0), scaled(gt, 3.0));
  EXPECT_NEAR(a.abs_rel, b.abs_rel, 1e-12);
  EXPECT_NEAR(a.rms_log, b.rms_log, 1e-12);
  EXPECT_NEAR(3.0 * a.rms, b.rms, 1e-9);
  EXPECT_EQ(a.delta1, b.delta1);
}

TEST(Metrics, RangeIsEnforced) {
  DepthMap gt(1, 4, 10.0);
  gt.values[1] = 85.0;
  gt.values[2] = 0.0;
  gt.valid[3] = 0;
  DepthMap pred(1, 4, 12.0);
  const MetricReport m = compute_metrics(pred, gt);
  EXPECT_EQ(m.n_valid, 1u);
  EXPECT_NEAR(m.abs_rel, 0.2, 1e-15);
  EXPECT_EQ(compute_metrics(pred, gt, {0.0, 100.0}).n_valid, 2u);
  EXPECT_EQ(compute_metrics(pred, gt, {11.0, 100.0}).n_valid, 1u);
}

TEST(Metrics, InvalidPredictionExcluded) {
  DepthMap gt(1, 3, 10.0);
  DepthMap pred(1, 3, 11.0);
  pred.valid[0] = 0;
  pred.values[1] = 0.0;
  EXPECT_EQ(compute_metrics(pred, gt).n_valid, 1u);
}

TEST(Metrics, EmptyAndShapeErrors) {
  const DepthMap gt(2, 2, 100.0);
  EXPECT_THROW(compute_metrics(gt, gt), Error);
  EXPECT_THROW(compute_metrics(DepthMap(2, 3, 1.0), DepthMap(2, 2, 1.0)), Error);
  EXPECT_THROW(average_reports({}), Error);
}

TEST(Metrics, PooledVersusPerImage) {
  const DepthMap g1 = random_gt(10, 10, 7), g2 = random_gt(5, 5, 8);
  const DepthMap p1 = scaled(g1, 1.1), p2 = scaled(g2, 1.4);
  MetricAccumulator acc;
  accumulate_metrics(acc, p1, g1);
  accumulate_metrics(acc, p2, g2);
  const MetricReport pooled = acc.report();
  EXPECT_NEAR(pooled.abs_rel, (100 * 0.1 + 25 * 0.4) / 125.0, 1e-12);
  const MetricReport per_image =
      average_reports({compute_metrics(p1, g1), compute_metrics(p2, g2)});
  EXPECT_NEAR(per_image.abs_rel, 0.25, 1e-12);
  EXPECT_EQ(per_image.n_valid, 125u);
}

TEST(PerBin, PartitionMatchesGlobal) {
  const DepthMap gt = random_gt(40, 50, 9, 0.5, 80.0);
  const DepthMap pred = inject_noise(gt, {NoiseKind::kGaussianLogDepth, 0.2}, 10);
  const std::vector<double> edges = {0, 10, 20, 30, 40, 50, 60, 70, 80};
  const auto bins = per_bin_metrics(pred, gt, edges);
  ASSERT_EQ(bins.size(), 8u);
  const MetricReport global = compute_metrics(pred, gt);
  std::size_t total = 0;
  double weighted = 0.0, sq = 0.0, d1 = 0.0;
  for (const auto& b : bins) {
    total += b.count;
    ASSERT_TRUE(b.metrics);
    weighted += b.metrics->abs_rel * b.count;
    sq += b.metrics->rms * b.metrics->rms * b.count;
    d1 += b.metrics->delta1 * b.count;
  }
  EXPECT_EQ(total, global.n_valid);
  EXPECT_NEAR(weighted / total, global.abs_rel, 1e-12);
  EXPECT_NEAR(std::sqrt(sq / total), global.rms, 1e-12);
  EXPECT_NEAR(d1 / total, global.delta1, 1e-12);
}

TEST(PerBin, UniformScaleIsFlatAcrossBins) {
  const DepthMap gt = random_gt(30, 30, 11);
  const auto bins = per_bin_metrics(scaled(gt, 0.9), gt, {0, 20, 40, 60, 80});
  for (const auto& b : bins) {
    ASSERT_TRUE(b.metrics);
    EXPECT_NEAR(b.metrics->abs_rel, 0.1, 1e-12);
  }
}

TEST(PerBin, EdgesAndEmptyBins) {
  DepthMap gt(1, 3, 10.0);
  gt.values[1] = 30.0;
  gt.values[2] = 5.0;
  const auto bins = per_bin_metrics(gt, gt, {0, 10, 20, 25, 30});
  EXPECT_EQ(bins[0].count, 1u);
  EXPECT_EQ(bins[1].count, 1u);
  EXPECT_EQ(bins[2].count, 0u);
  EXPECT_FALSE(bins[2].metrics);
  EXPECT_EQ(bins[3].count, 1u);
  EXPECT_THROW(per_bin_metrics(gt, gt, {0}), Error);
  EXPECT_THROW(per_bin_metrics(gt, gt, {0, 10, 10}), Error);
}

TEST(PerBin, CueRatios) {
  const DepthMap gt = random_gt(20, 20, 12, 1.0, 40.0);
  const DepthMap v = scaled(gt, 1.1), f = scaled(gt, 1.2);
  UncertaintyMap sv(20, 20, 1.0), sf(20, 20, 4.0);
  const CueComparison cues{&v, &f, &sv, &sf};
  const auto bins = per_bin_metrics(v, gt, {0, 20, 40}, &cues);
  for (const auto& b : bins) {
    ASSERT_TRUE(b.abs_rel_ratio && b.uncertainty_ratio);
    EXPECT_NEAR(*b.abs_rel_ratio, 0.5, 1e-12);
    EXPECT_NEAR(*b.uncertainty_ratio, 0.25, 1e-12);
  }
}

TEST(GroundModulation, FlatRoadIsZero) {
  const CameraRig rig = testing::kitti_like_rig();
  const auto r = render_depth(SceneSpec{}, rig);
  EXPECT_LT(ground_modulation(analytic_ground(rig), r.depth, r.road), 1e-12);
}

TEST(GroundModulation, GrowsWithSlope) {
  const CameraRig rig = testing::kitti_like_rig();
  const DepthMap ground = analytic_ground(rig);
  double prev = -1.0;
  for (double deg : {0.0, 0.5, 1.0, 2.0}) {
    SceneSpec scene;
    scene.ground.slope_x = deg_to_rad(deg);
    const auto r = render_depth(scene, rig);
    const double m = ground_modulation(ground, r.depth, r.road);
    EXPECT_GT(m, prev);
    prev = m;
  }
  EXPECT_GT(prev, 0.01);
}

TEST(GroundModulation, NoRoadPixels) {
  const DepthMap d(2, 2, 5.0);
  EXPECT_THROW(ground_modulation(d, d, Mask(2, 2, 0)), Error);
}

}  // namespace
}  // namespace gvgeom
