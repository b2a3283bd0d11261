// Copyright 2026 The gvgeom Authors
// SPDX-License-Identifier: Apache-2.0
//
// Crop-then-resize geometric augmentation with the matching intrinsics update
// and resampling between augmented frames of a common source image.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "gvgeom/camera.hpp"
#include "gvgeom/error.hpp"
#include "gvgeom/map.hpp"

namespace gvgeom {

struct CropRect {
  int x0 = 0;
  int y0 = 0;
  int width = 1;
  int height = 1;

  friend bool operator==(const CropRect&, const CropRect&) = default;
};

/// Source -> output pixel map: translate by (-x0, -y0), then scale by
/// (out_width / crop.width, out_height / crop.height).
struct AugmentSpec {
  int source_height = 1;
  int source_width = 1;
  CropRect crop;
  int out_height = 1;
  int out_width = 1;
  std::uint64_t seed = 0;

  static AugmentSpec identity(int height, int width) {
    return AugmentSpec{height, width, CropRect{0, 0, width, height}, height, width, 0};
  }

  double scale_x() const { return static_cast<double>(out_width) / crop.width; }
  double scale_y() const { return static_cast<double>(out_height) / crop.height; }

  Pixel to_output(Pixel src) const {
    return {(src.u - crop.x0) * scale_x(), (src.v - crop.y0) * scale_y()};
  }
  Pixel to_source(Pixel out) const {
    return {out.u / scale_x() + crop.x0, out.v / scale_y() + crop.y0};
  }

  void validate() const {
    require(source_height >= 1 && source_width >= 1, ErrorCode::kInvalidArgument,
            "augment: source dimensions must be positive");
    require(crop.width >= 1 && crop.height >= 1 && crop.x0 >= 0 && crop.y0 >= 0 &&
                crop.x0 + crop.width <= source_width &&
                crop.y0 + crop.height <= source_height,
            ErrorCode::kInvalidArgument, "augment: crop must lie inside the source image");
    require(out_height >= 1 && out_width >= 1, ErrorCode::kInvalidArgument,
            "augment: output size must be at least 1x1");
  }

  friend bool operator==(const AugmentSpec&, const AugmentSpec&) = default;
};

struct AugmentPolicy {
  int min_out_height = 200;
  int max_out_height = 500;
  // Crop side lengths as fractions of the source side, sampled independently.
  double min_crop_fraction = 0.5;
  double max_crop_fraction = 1.0;
};

/// Deterministic for a given seed. Crop position is uniform over all
/// placements; output height is uniform in the policy range and the output
/// width preserves the crop's aspect ratio.
inline AugmentSpec sample_augmentation(std::uint64_t seed, int source_height, int source_width,
                                       const AugmentPolicy& policy = {}) {
  require(source_height >= 2 && source_width >= 2, ErrorCode::kDegenerate,
          "augment: source image too small to crop");
  require(policy.min_out_height >= 1 && policy.min_out_height <= policy.max_out_height,
          ErrorCode::kInvalidArgument, "augment: bad output height range");
  require(policy.min_crop_fraction > 0.0 &&
              policy.min_crop_fraction <= policy.max_crop_fraction &&
              policy.max_crop_fraction <= 1.0,
          ErrorCode::kInvalidArgument, "augment: bad crop fraction range");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> frac(policy.min_crop_fraction,
                                              policy.max_crop_fraction);
  auto side = [&](int full) {
    const int s = static_cast<int>(std::lround(frac(rng) * full));
    return std::clamp(s, 1, full);
  };
  AugmentSpec spec;
  spec.source_height = source_height;
  spec.source_width = source_width;
  spec.seed = seed;
  spec.crop.height = side(source_height);
  spec.crop.width = side(source_width);
  spec.crop.x0 =
      std::uniform_int_distribution<int>(0, source_width - spec.crop.width)(rng);
  spec.crop.y0 =
      std::uniform_int_distribution<int>(0, source_height - spec.crop.height)(rng);
  spec.out_height =
      std::uniform_int_distribution<int>(policy.min_out_height, policy.max_out_height)(rng);
  spec.out_width = std::max(
      1, static_cast<int>(std::lround(static_cast<double>(spec.out_height) * spec.crop.width /
                                      spec.crop.height)));
  return spec;
}

/// Intrinsics and image size after the augmentation. Height and pitch are
/// physical and stay unchanged.
inline CameraRig transform_rig(const CameraRig& rig, const AugmentSpec& spec) {
  spec.validate();
  const double sx = spec.scale_x();
  const double sy = spec.scale_y();
  CameraRig out = rig;
  out.fx = sx * rig.fx;
  out.fy = sy * rig.fy;
  out.cx = sx * (rig.cx - spec.crop.x0);
  out.cy = sy * (rig.cy - spec.crop.y0);
  out.image_height = spec.out_height;
  out.image_width = spec.out_width;
  return out;
}

enum class Interpolation { kBilinear, kNearest };

struct SampleTap {
  std::uint32_t index = 0;
  double weight = 0.0;
};

/// For every pixel of the `to` frame, the source-map taps (in the `from`
/// frame) and their interpolation weights. Pixels whose pre-image falls
/// outside the `from` image have no taps.
struct ResamplePlan {
  int rows = 0;
  int cols = 0;
  std::vector<std::array<SampleTap, 4>> taps;
  std::vector<std::uint8_t> tap_count;
};

namespace detail {

// Picks the lower tap and fractional weight along one axis; false when the
// coordinate (in pixel-index units) lies outside [0, n - 1].
inline bool axis_taps(double x, int n, int& lo, double& frac) {
  constexpr double kTol = 1e-9;
  if (x < -kTol || x > (n - 1) + kTol) return false;
  x = std::clamp(x, 0.0, static_cast<double>(n - 1));
  if (n == 1) {
    lo = 0;
    frac = 0.0;
    return true;
  }
  lo = std::min(static_cast<int>(std::floor(x)), n - 2);
  frac = x - lo;
  return true;
}

}  // namespace detail

inline ResamplePlan make_resample_plan(const AugmentSpec& from, const AugmentSpec& to,
                                       Interpolation interp = Interpolation::kBilinear) {
  from.validate();
  to.validate();
  require(from.source_height == to.source_height && from.source_width == to.source_width,
          ErrorCode::kInvalidArgument, "warp: specs must share a source frame");
  ResamplePlan plan;
  plan.rows = to.out_height;
  plan.cols = to.out_width;
  const std::size_t n = static_cast<std::size_t>(plan.rows) * plan.cols;
  plan.taps.resize(n);
  plan.tap_count.assign(n, 0);
  const int src_rows = from.out_height;
  const int src_cols = from.out_width;
  for (int r = 0; r < plan.rows; ++r) {
    for (int c = 0; c < plan.cols; ++c) {
      const Pixel src = to.to_source({pixel_center(c), pixel_center(r)});
      const Pixel p = from.to_output(src);
      const double x = p.u - 0.5;
      const double y = p.v - 0.5;
      int x0 = 0, y0 = 0;
      double fx = 0.0, fy = 0.0;
      if (!detail::axis_taps(x, src_cols, x0, fx) || !detail::axis_taps(y, src_rows, y0, fy))
        continue;
      const std::size_t out = static_cast<std::size_t>(r) * plan.cols + c;
      auto& taps = plan.taps[out];
      auto idx = [src_cols](int rr, int cc) {
        return static_cast<std::uint32_t>(rr * src_cols + cc);
      };
      std::uint8_t k = 0;
      if (interp == Interpolation::kNearest) {
        taps[k++] = {idx(y0 + (fy >= 0.5 ? 1 : 0), x0 + (fx >= 0.5 ? 1 : 0)), 1.0};
      } else {
        const double w[4] = {(1 - fy) * (1 - fx), (1 - fy) * fx, fy * (1 - fx), fy * fx};
        const int dr[4] = {0, 0, 1, 1};
        const int dc[4] = {0, 1, 0, 1};
        for (int t = 0; t < 4; ++t) {
          if (w[t] > 0.0) taps[k++] = {idx(y0 + dr[t], x0 + dc[t]), w[t]};
        }
      }
      plan.tap_count[out] = k;
    }
  }
  return plan;
}

/// Resamples `m`, given in the `from` augmented frame, into the `to` frame.
/// Values are copied, not rescaled. Output pixels whose pre-image is outside
/// the source or touches an invalid source pixel are invalid.
template <typename MapT>
MapT warp_map(const MapT& m, const AugmentSpec& from, const AugmentSpec& to,
              Interpolation interp = Interpolation::kBilinear) {
  require(m.rows() == from.out_height && m.cols() == from.out_width,
          ErrorCode::kShapeMismatch, "warp: map does not match the source spec output size");
  const ResamplePlan plan = make_resample_plan(from, to, interp);
  MapT out = m;
  out.values = Grid<double>(plan.rows, plan.cols, 0.0);
  out.valid = Mask(plan.rows, plan.cols, 0);
  for (std::size_t i = 0; i < plan.taps.size(); ++i) {
    const int k = plan.tap_count[i];
    if (k == 0) continue;
    double acc = 0.0;
    bool ok = true;
    for (int t = 0; t < k; ++t) {
      const auto& tap = plan.taps[i][t];
      if (!m.is_valid(tap.index)) {
        ok = false;
        break;
      }
      acc += tap.weight * m.values[tap.index];
    }
    if (!ok) continue;
    out.values[i] = acc;
    out.valid[i] = 1;
  }
  return out;
}

}  // namespace gvgeom
