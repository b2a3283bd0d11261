// Copyright 2026 The gvgeom Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>

#include "gvgeom/error.hpp"
#include "gvgeom/map.hpp"

namespace gvgeom {

inline constexpr double kSigmaFloor = 1e-6;

/// exp() of predicted log-scales, floored at kSigmaFloor.
inline UncertaintyMap activate_log_uncertainty(const MaskedMap& raw) {
  UncertaintyMap out(MaskedMap(raw.values, raw.valid));
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!out.is_valid(i)) continue;
    const double x = out.values[i];
    require(std::isfinite(x), ErrorCode::kNonFinite, "log-uncertainty must be finite");
    out.values[i] = std::max(std::exp(x), kSigmaFloor);
  }
  return out;
}

// D = (S_Y * D_F + S_F * D_Y) / (S_Y + S_F). Each scale is lifted to
// kSigmaFloor first, so a pixel where both are below the floor gets the
// arithmetic mean.
inline double fuse_pixel(double depth_focal, double depth_vertical, double sigma_focal,
                         double sigma_vertical) {
  const double sf = std::max(sigma_focal, kSigmaFloor);
  const double sy = std::max(sigma_vertical, kSigmaFloor);
  return (sy * depth_focal + sf * depth_vertical) / (sy + sf);
}

/// Uncertainty-weighted fusion of the focal-cue and vertical-cue depths.
/// The output mask is the intersection of all four input masks.
inline DepthMap fuse(const DepthMap& depth_focal, const DepthMap& depth_vertical,
                     const UncertaintyMap& sigma_focal, const UncertaintyMap& sigma_vertical) {
  require_same_shape(depth_focal, depth_vertical, "fuse: depth maps differ in shape");
  require_same_shape(depth_focal, sigma_focal, "fuse: focal uncertainty shape mismatch");
  require_same_shape(depth_focal, sigma_vertical, "fuse: vertical uncertainty shape mismatch");
  DepthMap out(depth_focal.rows(), depth_focal.cols(), 0.0, false);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(depth_focal.is_valid(i) && depth_vertical.is_valid(i) && sigma_focal.is_valid(i) &&
          sigma_vertical.is_valid(i)))
      continue;
    const double sf = sigma_focal.values[i];
    const double sy = sigma_vertical.values[i];
    require(sf >= 0.0 && sy >= 0.0, ErrorCode::kNonPositiveValue,
            "fuse: uncertainties must be non-negative");
    out.values[i] = fuse_pixel(depth_focal.values[i], depth_vertical.values[i], sf, sy);
    out.valid[i] = 1;
  }
  return out;
}

/// Ground-attention blend D = A * D_G + (1 - A) * D_R used by ground-depth
/// residual models. Where A is exactly 0 (or 1) the other operand's mask is
/// ignored, so ground depth that is invalid above the horizon does not
/// invalidate pure-residual pixels.
inline DepthMap gedepth_combine(const Grid<double>& attention, const DepthMap& ground,
                                const DepthMap& residual) {
  require_same_shape(attention, ground, "gedepth_combine: attention shape mismatch");
  require_same_shape(ground, residual, "gedepth_combine: depth maps differ in shape");
  DepthMap out(ground.rows(), ground.cols(), 0.0, false);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double a = attention[i];
    require(a >= 0.0 && a <= 1.0, ErrorCode::kInvalidArgument,
            "gedepth_combine: attention must lie in [0, 1]");
    const bool need_ground = a > 0.0;
    const bool need_residual = a < 1.0;
    if ((need_ground && !ground.is_valid(i)) || (need_residual && !residual.is_valid(i)))
      continue;
    double d = 0.0;
    if (need_ground) d += a * ground.values[i];
    if (need_residual) d += (1.0 - a) * residual.values[i];
    out.values[i] = d;
    out.valid[i] = 1;
  }
  return out;
}

}  // namespace gvgeom
