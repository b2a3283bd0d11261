// Copyright 2026 The gvgeom Authors
// SPDX-License-Identifier: Apache-2.0
//
// Pinhole camera mounted at height h above a flat ground with pitch theta.
//
// Frames: the ego frame sits on the ground below the camera with x right,
// y forward and z up. The camera frame has x right, y down and z along the
// optical axis. Yaw and roll are not modelled.
//
// Pixel coordinates are continuous: pixel (row r, col c) covers
// [c, c+1) x [r, r+1) and its center is (c + 0.5, r + 0.5).
#pragma once

#include <cmath>
#include <numbers>
#include <optional>

#include <Eigen/Core>

#include "gvgeom/error.hpp"

namespace gvgeom {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct Pixel {
  double u = 0.0;  // column
  double v = 0.0;  // row
};

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

inline double pixel_center(int index) { return static_cast<double>(index) + 0.5; }

struct CameraRig {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int image_height = 1;  // H
  int image_width = 1;   // W
  double height_m = 1.0;  // h, camera height above ground
  double pitch = 0.0;     // theta, radians

  void validate() const {
    require(std::isfinite(fx) && std::isfinite(fy) && std::isfinite(cx) &&
                std::isfinite(cy) && std::isfinite(height_m) && std::isfinite(pitch),
            ErrorCode::kNonFinite, "camera rig contains non-finite values");
    require(fx > 0.0 && fy > 0.0, ErrorCode::kInvalidArgument,
            "focal lengths must be positive");
    require(image_height >= 1 && image_width >= 1, ErrorCode::kInvalidArgument,
            "image dimensions must be at least 1");
    require(height_m > 0.0, ErrorCode::kInvalidArgument,
            "camera height must be positive");
    require(std::abs(pitch) < std::numbers::pi / 2.0, ErrorCode::kInvalidArgument,
            "|pitch| must be below pi/2");
  }

  Mat3 intrinsics() const {
    Mat3 k;
    k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
    return k;
  }

  friend bool operator==(const CameraRig&, const CameraRig&) = default;
};

/// Ego-to-camera rotation for pitch theta.
inline Mat3 rotation_from_pitch(double theta) {
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  Mat3 r;
  r << 1.0, 0.0, 0.0,
       0.0, s, -c,
       0.0, c, s;
  return r;
}

/// Upward ground normal expressed in the camera frame: R * [0, 0, 1].
inline Vec3 ground_normal_camera(double theta) {
  return Vec3(0.0, -std::cos(theta), std::sin(theta));
}

// The translation is applied before rotating, p_C = R (p_E - h e_z). This is
// the form under which ground points satisfy n_C . p_C + h = 0.
inline Vec3 ego_to_camera(const Vec3& p_ego, const CameraRig& rig) {
  return rotation_from_pitch(rig.pitch) * (p_ego - Vec3(0.0, 0.0, rig.height_m));
}

inline Vec3 camera_to_ego(const Vec3& p_cam, const CameraRig& rig) {
  return rotation_from_pitch(rig.pitch).transpose() * p_cam +
         Vec3(0.0, 0.0, rig.height_m);
}

/// Back-projects pixel (u, v) at z-depth `depth` into the camera frame.
inline Vec3 backproject(double u, double v, double depth, const CameraRig& rig) {
  return Vec3((u - rig.cx) * depth / rig.fx, (v - rig.cy) * depth / rig.fy, depth);
}

inline Pixel project(const Vec3& p_cam, const CameraRig& rig) {
  return Pixel{rig.fx * p_cam.x() / p_cam.z() + rig.cx,
               rig.fy * p_cam.y() / p_cam.z() + rig.cy};
}

/// Row at which the ground depth diverges: v_h = c_y + f_y tan(theta).
inline double horizon_row(const CameraRig& rig) {
  return rig.cy + rig.fy * std::tan(rig.pitch);
}

struct GroundDepthOptions {
  double denom_eps = 1e-6;
  std::optional<double> max_depth;  // depths beyond this are Invalid
};

/// Ground depth for vertical image position y (pixels above the bottom edge)
/// of an image of effective height `effective_height`:
///   d = f_y h / ((H - c_y - y) cos(theta) - f_y sin(theta)).
inline std::optional<double> ground_depth_at_vertical(double y, double effective_height,
                                                      const CameraRig& rig,
                                                      const GroundDepthOptions& opts = {}) {
  const double denom = (effective_height - rig.cy - y) * std::cos(rig.pitch) -
                       rig.fy * std::sin(rig.pitch);
  if (!(denom > opts.denom_eps)) return std::nullopt;
  const double d = rig.fy * rig.height_m / denom;
  if (opts.max_depth && d > *opts.max_depth) return std::nullopt;
  return d;
}

/// Depth of the ground plane seen through pixel (u, v); nullopt at or above
/// the horizon. The column does not enter the formula.
inline std::optional<double> ground_depth_at_pixel(double /*u*/, double v,
                                                   const CameraRig& rig,
                                                   const GroundDepthOptions& opts = {}) {
  const double H = static_cast<double>(rig.image_height);
  return ground_depth_at_vertical(H - v, H, rig, opts);
}

}  // namespace gvgeom
