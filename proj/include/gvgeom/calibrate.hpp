// Copyright 2026 The gvgeom Authors
// SPDX-License-Identifier: Apache-2.0
//
// Camera height and pitch from depth maps and road masks: road pixels closer
// than a threshold are back-projected, a plane is fitted with RANSAC, and the
// per-frame estimates are aggregated by their medians.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gvgeom/camera.hpp"
#include "gvgeom/error.hpp"
#include "gvgeom/map.hpp"

namespace gvgeom {

/// Plane n . p + offset = 0 in the camera frame, with |n| = 1 and n.y < 0
/// (normal pointing up, away from the ground as seen from the camera).
struct PlaneFit {
  Vec3 normal = Vec3(0.0, -1.0, 0.0);
  double offset = 0.0;
  std::size_t inlier_count = 0;
  double inlier_rms = 0.0;

  double distance(const Vec3& p) const { return normal.dot(p) + offset; }
};

struct Extrinsics {
  double height_m = 0.0;
  double pitch = 0.0;  // radians
};

/// Published extrinsics for common driving datasets, as estimated by this
/// procedure on their ground truth. Documentation fixtures only.
struct ReferenceExtrinsics {
  const char* dataset;
  double height_m;
  double pitch_deg;
};

inline constexpr ReferenceExtrinsics kReferenceExtrinsics[] = {
    {"Argoverse Stereo", 1.678, 0.021},
    {"DDAD", 1.459, -0.519},
    {"DrivingStereo", 1.739, -0.561},
    {"KITTI", 1.659, -0.664},
    {"Waymo", 2.145, -0.331},
};

/// Road pixels with 0 < depth < max_depth, back-projected through their
/// pixel centers.
inline std::vector<Vec3> filter_road_points(const DepthMap& depth, const Mask& road_mask,
                                            const CameraRig& rig, double max_depth = 20.0) {
  require_same_shape(depth, road_mask, "filter_road_points: mask shape mismatch");
  std::vector<Vec3> points;
  for (int r = 0; r < depth.rows(); ++r) {
    for (int c = 0; c < depth.cols(); ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * depth.cols() + c;
      if (!road_mask[i] || !depth.is_valid(i)) continue;
      const double z = depth.values[i];
      if (!(z > 0.0 && z < max_depth)) continue;
      points.push_back(backproject(pixel_center(c), pixel_center(r), z, rig));
    }
  }
  require(points.size() >= 3, ErrorCode::kEmptyMask,
          "filter_road_points: fewer than 3 road points survive filtering");
  return points;
}

struct RansacOptions {
  int iterations = 500;
  double inlier_threshold = 0.03;  // meters
  double min_inlier_ratio = 0.5;
  std::uint64_t seed = 0;
};

namespace detail {

inline void orient_up(Vec3& normal, double& offset) {
  if (normal.y() > 0.0) {
    normal = -normal;
    offset = -offset;
  }
}

// Orthogonal least squares: the normal is the eigenvector of the scatter
// matrix with the smallest eigenvalue.
inline PlaneFit fit_plane_lsq(const std::vector<Vec3>& points,
                              const std::vector<std::size_t>& subset) {
  Vec3 centroid = Vec3::Zero();
  for (std::size_t i : subset) centroid += points[i];
  centroid /= static_cast<double>(subset.size());
  Mat3 scatter = Mat3::Zero();
  for (std::size_t i : subset) {
    const Vec3 d = points[i] - centroid;
    scatter += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> solver(scatter);
  PlaneFit fit;
  fit.normal = solver.eigenvectors().col(0).normalized();
  fit.offset = -fit.normal.dot(centroid);
  orient_up(fit.normal, fit.offset);
  return fit;
}

inline std::vector<std::size_t> inliers_of(const std::vector<Vec3>& points, const Vec3& n,
                                           double offset, double threshold) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (std::abs(n.dot(points[i]) + offset) <= threshold) out.push_back(i);
  }
  return out;
}

}  // namespace detail

/// Three-point RANSAC followed by an orthogonal least-squares refit on the
/// consensus set. Deterministic for a fixed seed.
inline PlaneFit ransac_plane(const std::vector<Vec3>& points, const RansacOptions& opts = {}) {
  require(points.size() >= 3, ErrorCode::kDegenerate, "ransac_plane: need at least 3 points");
  require(opts.iterations >= 1 && opts.inlier_threshold > 0.0, ErrorCode::kInvalidArgument,
          "ransac_plane: bad options");
  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);

  // Hypotheses whose sample triangle is this thin are treated as collinear.
  double extent = 0.0;
  for (const auto& p : points) extent = std::max(extent, (p - points.front()).norm());
  const double min_cross = 1e-12 * std::max(1.0, extent * extent);

  std::size_t best_count = 0;
  Vec3 best_n = Vec3::Zero();
  double best_c = 0.0;
  for (int it = 0; it < opts.iterations; ++it) {
    const std::size_t a = pick(rng), b = pick(rng), c = pick(rng);
    if (a == b || b == c || a == c) continue;
    const Vec3 cross = (points[b] - points[a]).cross(points[c] - points[a]);
    const double norm = cross.norm();
    if (norm <= min_cross) continue;
    const Vec3 n = cross / norm;
    const double off = -n.dot(points[a]);
    std::size_t count = 0;
    for (const auto& p : points) {
      if (std::abs(n.dot(p) + off) <= opts.inlier_threshold) ++count;
    }
    if (count > best_count) {
      best_count = count;
      best_n = n;
      best_c = off;
    }
  }
  require(best_count >= 3, ErrorCode::kDegenerate,
          "ransac_plane: no non-degenerate hypothesis (points collinear?)");
  const double ratio = static_cast<double>(best_count) / static_cast<double>(points.size());
  require(ratio >= opts.min_inlier_ratio, ErrorCode::kNoDominantPlane,
          "ransac_plane: best inlier ratio below minimum");

  // Two refit rounds: the consensus set is re-selected against the refit plane.
  auto inliers = detail::inliers_of(points, best_n, best_c, opts.inlier_threshold);
  PlaneFit fit = detail::fit_plane_lsq(points, inliers);
  auto refined = detail::inliers_of(points, fit.normal, fit.offset, opts.inlier_threshold);
  if (refined.size() >= 3) {
    inliers = std::move(refined);
    fit = detail::fit_plane_lsq(points, inliers);
  }
  double sq = 0.0;
  for (std::size_t i : inliers) {
    const double d = fit.distance(points[i]);
    sq += d * d;
  }
  fit.inlier_count = inliers.size();
  fit.inlier_rms = std::sqrt(sq / static_cast<double>(inliers.size()));
  return fit;
}

/// The camera-frame ground plane is n = (0, -cos t, sin t), n . p + h = 0, so
/// t = atan2(n_z, -n_y) and h is the offset. Any x component (roll) is ignored.
inline Extrinsics plane_to_extrinsics(const PlaneFit& fit) {
  Vec3 n = fit.normal;
  double c = fit.offset;
  const double len = n.norm();
  require(len > 0.0, ErrorCode::kDegenerate, "plane_to_extrinsics: zero normal");
  n /= len;
  c /= len;
  detail::orient_up(n, c);
  require(c > 0.0, ErrorCode::kInconsistentData,
          "plane_to_extrinsics: camera is not above the fitted ground plane");
  return Extrinsics{c, std::atan2(n.z(), -n.y())};
}

/// Ground plane of a camera at (height, pitch), as a PlaneFit.
inline PlaneFit plane_from_extrinsics(double height_m, double pitch) {
  PlaneFit fit;
  fit.normal = ground_normal_camera(pitch);
  fit.offset = height_m;
  return fit;
}

// ---------------------------------------------------------------------------

struct CalibrationFrame {
  DepthMap depth;
  Mask road;
};

struct CalibrateOptions {
  double max_depth = 20.0;
  RansacOptions ransac;
  unsigned threads = 1;
};

struct FrameEstimate {
  std::size_t frame = 0;
  double height_m = 0.0;
  double pitch = 0.0;
  std::size_t points = 0;
  std::size_t inliers = 0;
};

struct SkippedFrame {
  std::size_t frame = 0;
  std::string reason;
};

struct CalibrationResult {
  std::vector<FrameEstimate> per_frame;
  std::vector<SkippedFrame> skipped;
  double height_median = 0.0;
  double pitch_median = 0.0;
};

inline double median(std::vector<double> values) {
  require(!values.empty(), ErrorCode::kEmptyMask, "median of an empty list");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

// SplitMix64 finalizer; gives every frame its own RNG stream.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline FrameEstimate calibrate_frame(const CalibrationFrame& frame, const CameraRig& rig,
                                     const CalibrateOptions& opts, std::size_t index) {
  const auto points = filter_road_points(frame.depth, frame.road, rig, opts.max_depth);
  RansacOptions ro = opts.ransac;
  ro.seed = mix_seed(opts.ransac.seed, index);
  const PlaneFit fit = ransac_plane(points, ro);
  const Extrinsics ex = plane_to_extrinsics(fit);
  return FrameEstimate{index, ex.height_m, ex.pitch, points.size(), fit.inlier_count};
}

/// Frames that fail (too few points, no dominant plane, camera below plane)
/// are skipped and listed; at least one frame must succeed.
inline CalibrationResult calibrate_sequence(const std::vector<CalibrationFrame>& frames,
                                            const CameraRig& rig,
                                            const CalibrateOptions& opts = {}) {
  rig.validate();
  require(!frames.empty(), ErrorCode::kInvalidArgument, "calibrate_sequence: no frames");
  std::vector<std::optional<FrameEstimate>> estimates(frames.size());
  std::vector<std::string> errors(frames.size());
  parallel_rows(static_cast<int>(frames.size()), opts.threads, [&](int f) {
    try {
      estimates[f] = calibrate_frame(frames[f], rig, opts, static_cast<std::size_t>(f));
    } catch (const Error& e) {
      errors[f] = std::string(to_string(e.code())) + ": " + e.what();
    }
  });

  CalibrationResult out;
  std::vector<double> heights, pitches;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    if (estimates[f]) {
      out.per_frame.push_back(*estimates[f]);
      heights.push_back(estimates[f]->height_m);
      pitches.push_back(estimates[f]->pitch);
    } else {
      out.skipped.push_back({f, errors[f]});
    }
  }
  require(!out.per_frame.empty(), ErrorCode::kDegenerate,
          "calibrate_sequence: every frame failed");
  out.height_median = median(heights);
  out.pitch_median = median(pitches);
  return out;
}

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;
};

/// Equal-width bins spanning [min, max] of the values.
inline Histogram histogram(const std::vector<double>& values, std::size_t bins) {
  require(!values.empty() && bins > 0, ErrorCode::kInvalidArgument,
          "histogram: need values and at least one bin");
  Histogram h;
  h.lo = *std::min_element(values.begin(), values.end());
  h.hi = *std::max_element(values.begin(), values.end());
  h.counts.assign(bins, 0);
  const double width = (h.hi - h.lo) / static_cast<double>(bins);
  for (double v : values) {
    std::size_t b = width > 0.0 ? static_cast<std::size_t>((v - h.lo) / width) : 0;
    ++h.counts[std::min(b, bins - 1)];
  }
  return h;
}

}  // namespace gvgeom
