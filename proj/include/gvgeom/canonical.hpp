// Copyright 2026 The gvgeom Authors
// SPDX-License-Identifier: Apache-2.0
//
// Focal and vertical canonical transforms between metric depth and
// camera-independent prediction spaces.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "gvgeom/camera.hpp"
#include "gvgeom/error.hpp"
#include "gvgeom/map.hpp"

namespace gvgeom {

struct CanonicalConfig {
  double focal = 700.0;      // f_c, pixels
  double max_depth = 80.0;   // d_max, meters
  double min_ext_depth = 1.0;  // ground depth placed at the extended bottom row

  void validate() const {
    require(focal > 0.0, ErrorCode::kInvalidArgument, "canonical focal must be positive");
    require(min_ext_depth > 0.0 && min_ext_depth < max_depth, ErrorCode::kInvalidArgument,
            "need 0 < min_ext_depth < max_depth");
  }
};

// ---------------------------------------------------------------------------
// Focal canonical transform: D = (f_y / f_c) C.

inline DepthMap fct_to_depth(const CanonicalMap& c, const CameraRig& rig,
                             const CanonicalConfig& cfg) {
  require(c.kind == CanonicalKind::kFocal, ErrorCode::kInvalidArgument,
          "fct_to_depth expects a focal canonical map");
  DepthMap out(MaskedMap(c.values, c.valid));
  const double scale = rig.fy / cfg.focal;
  for (double& x : out.values.flat()) x *= scale;
  return out;
}

inline CanonicalMap fct_from_depth(const DepthMap& d, const CameraRig& rig,
                                   const CanonicalConfig& cfg) {
  CanonicalMap out(CanonicalKind::kFocal, MaskedMap(d.values, d.valid));
  const double scale = cfg.focal / rig.fy;
  for (double& x : out.values.flat()) x *= scale;
  return out;
}

// ---------------------------------------------------------------------------
// Vertical canonical transform.

/// Effective image height after virtually extending the image downwards so
/// that the bottom row (y = 0) images ground at `min_ext_depth`. Never
/// smaller than the real image height.
inline double extended_height(const CameraRig& rig, const CanonicalConfig& cfg) {
  const double ext = rig.cy + rig.fy *
                                  (rig.height_m / cfg.min_ext_depth + std::sin(rig.pitch)) /
                                  std::cos(rig.pitch);
  return std::max(ext, static_cast<double>(rig.image_height));
}

/// Vertical position, in an image of height `effective_height`, whose ground
/// depth is `depth`. Inverse of ground_depth_at_vertical.
inline double vertical_from_ground_depth(double depth, double effective_height,
                                         const CameraRig& rig) {
  return effective_height - rig.cy -
         rig.fy * (rig.height_m / depth + std::sin(rig.pitch)) / std::cos(rig.pitch);
}

inline double y_max(const CameraRig& rig, const CanonicalConfig& cfg) {
  return vertical_from_ground_depth(cfg.max_depth, extended_height(rig, cfg), rig);
}

struct TransformResult {
  MaskedMap map;
  std::size_t clamped = 0;  // valid pixels moved onto the domain boundary
};

/// Per-rig bijection between [0, y_max] and [depth(0), max_depth].
class VerticalTransform {
 public:
  VerticalTransform(const CameraRig& rig, const CanonicalConfig& cfg)
      : VerticalTransform(rig, cfg, extended_height(rig, cfg)) {}

  // Explicit effective height; pass rig.image_height for the unextended image.
  VerticalTransform(const CameraRig& rig, const CanonicalConfig& cfg, double effective_height)
      : rig_(rig), cfg_(cfg), effective_height_(effective_height) {
    rig.validate();
    cfg.validate();
    y_max_ = vertical_from_ground_depth(cfg.max_depth, effective_height_, rig_);
    const auto lo = ground_depth_at_vertical(0.0, effective_height_, rig_);
    require(lo.has_value() && *lo < cfg.max_depth && y_max_ > 0.0,
            ErrorCode::kDegenerate,
            "vertical canonical range is empty for this rig and configuration");
    min_depth_ = *lo;
  }

  double effective_height() const noexcept { return effective_height_; }
  double y_max() const noexcept { return y_max_; }
  double min_depth() const noexcept { return min_depth_; }
  double max_depth() const noexcept { return cfg_.max_depth; }

  // Unclamped scalar maps; callers keep y in [0, y_max].
  double to_depth(double y) const {
    const double denom = (effective_height_ - rig_.cy - y) * std::cos(rig_.pitch) -
                         rig_.fy * std::sin(rig_.pitch);
    return rig_.fy * rig_.height_m / denom;
  }
  double from_depth(double depth) const {
    return vertical_from_ground_depth(depth, effective_height_, rig_);
  }

  TransformResult to_depth(const MaskedMap& c) const {
    TransformResult res{MaskedMap(c.values, c.valid), 0};
    apply(res, [this](double y, std::size_t& clamped) {
      return to_depth(clamp_counted(y, 0.0, y_max_, clamped));
    });
    return res;
  }

  TransformResult from_depth(const MaskedMap& d) const {
    TransformResult res{MaskedMap(d.values, d.valid), 0};
    apply(res, [this](double depth, std::size_t& clamped) {
      return from_depth(clamp_counted(depth, min_depth_, cfg_.max_depth, clamped));
    });
    return res;
  }

 private:
  static double clamp_counted(double x, double lo, double hi, std::size_t& clamped) {
    if (x < lo) {
      ++clamped;
      return lo;
    }
    if (x > hi) {
      ++clamped;
      return hi;
    }
    return x;
  }

  template <typename Fn>
  static void apply(TransformResult& res, Fn&& fn) {
    auto vals = res.map.values.flat();
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (!res.map.is_valid(i)) continue;
      if (!std::isfinite(vals[i])) {
        res.map.valid[i] = 0;
        continue;
      }
      vals[i] = fn(vals[i], res.clamped);
    }
  }

  CameraRig rig_;
  CanonicalConfig cfg_;
  double effective_height_ = 0.0;
  double y_max_ = 0.0;
  double min_depth_ = 0.0;
};

struct VctDepthResult {
  DepthMap depth;
  std::size_t clamped = 0;
};

struct VctCanonicalResult {
  CanonicalMap canonical;
  std::size_t clamped = 0;
};

inline VctDepthResult vct_to_depth(const CanonicalMap& c, const VerticalTransform& vct) {
  require(c.kind == CanonicalKind::kVertical, ErrorCode::kInvalidArgument,
          "vct_to_depth expects a vertical canonical map");
  auto res = vct.to_depth(static_cast<const MaskedMap&>(c));
  return {DepthMap(std::move(res.map)), res.clamped};
}

inline VctDepthResult vct_to_depth(const CanonicalMap& c, const CameraRig& rig,
                                   const CanonicalConfig& cfg) {
  return vct_to_depth(c, VerticalTransform(rig, cfg));
}

inline VctCanonicalResult vct_from_depth(const DepthMap& d, const VerticalTransform& vct) {
  auto res = vct.from_depth(static_cast<const MaskedMap&>(d));
  return {CanonicalMap(CanonicalKind::kVertical, std::move(res.map)), res.clamped};
}

inline VctCanonicalResult vct_from_depth(const DepthMap& d, const CameraRig& rig,
                                         const CanonicalConfig& cfg) {
  return vct_from_depth(d, VerticalTransform(rig, cfg));
}

}  // namespace gvgeom
