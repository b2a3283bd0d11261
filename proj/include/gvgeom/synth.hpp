// Copyright 2026 The gvgeom Authors
// SPDX-License-Identifier: Apache-2.0
//
// Ray-cast depth oracle for parametric scenes (ground plane plus axis-aligned
// boxes in the ego frame), noise injection and simulated cue predictions.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "gvgeom/calibrate.hpp"
#include "gvgeom/camera.hpp"
#include "gvgeom/canonical.hpp"
#include "gvgeom/error.hpp"
#include "gvgeom/fusion.hpp"
#include "gvgeom/map.hpp"
#include "gvgeom/metrics.hpp"

namespace gvgeom {

/// Ground through (0, 0, height_offset) in the ego frame with the up normal
/// tilted by slope_x about the ego x axis, then slope_y about the y axis.
/// Positive slope_x makes the road rise ahead of the vehicle.
struct GroundSpec {
  double height_offset = 0.0;  // meters
  double slope_x = 0.0;        // radians
  double slope_y = 0.0;        // radians

  Vec3 normal() const {
    return Vec3(std::sin(slope_y), -std::cos(slope_y) * std::sin(slope_x),
                std::cos(slope_y) * std::cos(slope_x));
  }
};

struct Box {
  Vec3 center = Vec3::Zero();   // ego frame, meters
  Vec3 extents = Vec3::Ones();  // full side lengths, meters
};

struct SceneSpec {
  GroundSpec ground;
  std::vector<Box> boxes;
  std::uint64_t seed = 0;

  void validate() const {
    const double limit = deg_to_rad(10.0);
    require(std::abs(ground.slope_x) < limit && std::abs(ground.slope_y) < limit,
            ErrorCode::kInvalidArgument, "scene: ground slopes must be below 10 degrees");
    for (const auto& b : boxes) {
      require(b.extents.minCoeff() > 0.0, ErrorCode::kInvalidArgument,
              "scene: box extents must be positive");
    }
  }
};

inline constexpr int kHitSky = -1;
inline constexpr int kHitGround = 0;  // boxes are 1 + their index

struct RayHit {
  double depth = std::numeric_limits<double>::infinity();  // camera z, meters
  int id = kHitSky;
};

struct RenderOptions {
  double denom_eps = 1e-6;  // same horizon rejection as ground_depth_at_pixel
  unsigned threads = 1;
};

/// Nearest intersection along the ray through continuous pixel (u, v).
inline RayHit cast_ray(const SceneSpec& scene, const CameraRig& rig, double u, double v,
                       const RenderOptions& opts = {}) {
  // Ray p(t) = origin + t * dir; dir has unit camera-z so t is the depth.
  const Vec3 dir_cam((u - rig.cx) / rig.fx, (v - rig.cy) / rig.fy, 1.0);
  const Vec3 dir = rotation_from_pitch(rig.pitch).transpose() * dir_cam;
  const Vec3 origin(0.0, 0.0, rig.height_m);

  RayHit hit;
  const Vec3 n = scene.ground.normal();
  const double approach = -n.dot(dir);
  if (rig.fy * approach > opts.denom_eps) {
    const double t = n.dot(origin - Vec3(0.0, 0.0, scene.ground.height_offset)) / approach;
    if (t > 0.0) hit = {t, kHitGround};
  }
  for (std::size_t k = 0; k < scene.boxes.size(); ++k) {
    const Box& b = scene.boxes[k];
    double t_near = 0.0;
    double t_far = std::numeric_limits<double>::infinity();
    bool miss = false;
    for (int a = 0; a < 3 && !miss; ++a) {
      const double lo = b.center[a] - 0.5 * b.extents[a];
      const double hi = b.center[a] + 0.5 * b.extents[a];
      if (dir[a] == 0.0) {
        miss = origin[a] < lo || origin[a] > hi;
        continue;
      }
      double t0 = (lo - origin[a]) / dir[a];
      double t1 = (hi - origin[a]) / dir[a];
      if (t0 > t1) std::swap(t0, t1);
      t_near = std::max(t_near, t0);
      t_far = std::min(t_far, t1);
      miss = t_near > t_far;
    }
    if (!miss && t_near > 0.0 && t_near < hit.depth) hit = {t_near, static_cast<int>(k) + 1};
  }
  return hit;
}

struct RenderResult {
  DepthMap depth;
  Mask road;
  Grid<int> instance;  // kHitSky, kHitGround or 1 + box index
};

/// Renders depth at every pixel center. Sky pixels are invalid; the road
/// mask marks pixels whose nearest hit is the ground.
inline RenderResult render_depth(const SceneSpec& scene, const CameraRig& rig,
                                 const RenderOptions& opts = {}) {
  rig.validate();
  scene.validate();
  const int rows = rig.image_height;
  const int cols = rig.image_width;
  RenderResult out{DepthMap(rows, cols, 0.0, false), Mask(rows, cols, 0),
                   Grid<int>(rows, cols, kHitSky)};
  parallel_rows(rows, opts.threads, [&](int r) {
    for (int c = 0; c < cols; ++c) {
      const RayHit hit = cast_ray(scene, rig, pixel_center(c), pixel_center(r), opts);
      if (hit.id == kHitSky) continue;
      out.depth.values(r, c) = hit.depth;
      out.depth.valid(r, c) = 1;
      out.road(r, c) = hit.id == kHitGround ? 1 : 0;
      out.instance(r, c) = hit.id;
    }
  });
  return out;
}

// ---------------------------------------------------------------------------

enum class NoiseKind { kGaussianDepth, kGaussianLogDepth, kCueBias };

/// kGaussianDepth: v + sigma n.  kGaussianLogDepth: v exp(sigma n).
/// kCueBias: v + bias + bias_slope v + sigma n.
struct NoiseModel {
  NoiseKind kind = NoiseKind::kGaussianDepth;
  double sigma = 0.0;
  double bias = 0.0;
  double bias_slope = 0.0;
};

/// Perturbs valid pixels; deterministic per seed.
template <typename MapT>
MapT inject_noise(const MapT& m, const NoiseModel& model, std::uint64_t seed) {
  require(model.sigma >= 0.0, ErrorCode::kInvalidArgument, "noise sigma must be >= 0");
  MapT out = m;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!out.is_valid(i)) continue;
    double& v = out.values[i];
    const double z = model.sigma > 0.0 ? model.sigma * normal(rng) : 0.0;
    switch (model.kind) {
      case NoiseKind::kGaussianDepth: v += z; break;
      case NoiseKind::kGaussianLogDepth: v *= std::exp(z); break;
      case NoiseKind::kCueBias: v += model.bias + model.bias_slope * v + z; break;
    }
  }
  return out;
}

struct CuePredictions {
  CanonicalMap focal;
  CanonicalMap vertical;
  DepthMap depth_focal;     // focal canonical map decoded to metric depth
  DepthMap depth_vertical;  // vertical canonical map decoded to metric depth
  UncertaintyMap sigma_focal;
  UncertaintyMap sigma_vertical;
  std::size_t vertical_clamped = 0;
};

/// Canonical predictions of both cues for a ground-truth map. Noise is drawn
/// in the depth domain before encoding. The uncertainty maps are the oracle
/// |decoded - gt| (the minimizer of the uncertainty loss), floored at
/// kSigmaFloor.
inline CuePredictions simulate_cue_predictions(const DepthMap& gt, const CameraRig& rig,
                                               const CanonicalConfig& cfg,
                                               const NoiseModel& noise_focal,
                                               const NoiseModel& noise_vertical,
                                               std::uint64_t seed) {
  const VerticalTransform vct(rig, cfg);
  CuePredictions out;
  out.focal = fct_from_depth(inject_noise(gt, noise_focal, mix_seed(seed, 1)), rig, cfg);
  auto enc = vct_from_depth(inject_noise(gt, noise_vertical, mix_seed(seed, 2)), vct);
  out.vertical = std::move(enc.canonical);
  out.vertical_clamped = enc.clamped;
  out.depth_focal = fct_to_depth(out.focal, rig, cfg);
  out.depth_vertical = vct_to_depth(out.vertical, vct).depth;

  auto oracle_sigma = [&gt](const DepthMap& decoded) {
    UncertaintyMap s(MaskedMap(Grid<double>(gt.rows(), gt.cols(), kSigmaFloor), decoded.valid));
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!s.is_valid(i)) continue;
      s.values[i] = std::max(std::abs(decoded.values[i] - gt.values[i]), kSigmaFloor);
    }
    return s;
  };
  out.sigma_focal = oracle_sigma(out.depth_focal);
  out.sigma_vertical = oracle_sigma(out.depth_vertical);
  return out;
}

// ---------------------------------------------------------------------------

struct RandomSceneOptions {
  int min_boxes = 2;
  int max_boxes = 6;
  double min_forward = 5.0;
  double max_forward = 30.0;
  double max_lateral = 8.0;
};

/// Flat ground with car-sized boxes resting on it.
inline SceneSpec random_scene(std::uint64_t seed, const RandomSceneOptions& opts = {}) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  SceneSpec scene;
  scene.seed = seed;
  const int n = std::uniform_int_distribution<int>(opts.min_boxes, opts.max_boxes)(rng);
  for (int k = 0; k < n; ++k) {
    Box b;
    b.extents = Vec3(uniform(1.5, 2.2), uniform(3.5, 5.0), uniform(1.4, 2.0));
    b.center = Vec3(uniform(-opts.max_lateral, opts.max_lateral),
                    uniform(opts.min_forward, opts.max_forward), 0.5 * b.extents.z());
    scene.boxes.push_back(b);
  }
  return scene;
}

struct CalibrationSequenceOptions {
  std::size_t frames = 50;
  double depth_noise_sigma = 0.02;  // meters, Gaussian on every valid pixel
  double outlier_fraction = 0.3;    // pixels replaced by off-road clutter
  unsigned threads = 1;
};

/// Frames of random scenes for calibration. A fraction of the pixels is
/// replaced by uniform clutter depths and labelled off-road in the mask.
inline std::vector<CalibrationFrame> synth_calibration_sequence(
    const CameraRig& rig, std::uint64_t seed, const CalibrationSequenceOptions& opts = {}) {
  std::vector<CalibrationFrame> frames;
  frames.reserve(opts.frames);
  for (std::size_t f = 0; f < opts.frames; ++f) {
    const std::uint64_t fs = mix_seed(seed, f);
    const auto scene = random_scene(fs);
    auto render = render_depth(scene, rig, {.threads = opts.threads});
    CalibrationFrame frame{
        inject_noise(render.depth, {NoiseKind::kGaussianDepth, opts.depth_noise_sigma},
                     mix_seed(fs, 1)),
        render.road};
    std::mt19937_64 rng(mix_seed(fs, 2));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (std::size_t i = 0; i < frame.depth.size(); ++i) {
      if (u01(rng) >= opts.outlier_fraction) continue;
      frame.depth.values[i] = 1.0 + 19.0 * u01(rng);
      frame.depth.valid[i] = 1;
      frame.road[i] = 0;
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

// ---------------------------------------------------------------------------

struct SensitivityRow {
  double level = 0.0;          // noise multiplier
  double sigma_height = 0.0;   // meters
  double sigma_pitch = 0.0;    // radians
  double mean_abs_rel = 0.0;
};

struct SensitivityOptions {
  std::vector<double> levels = {0.0, 0.5, 1.0, 2.0};
  double height_unit = 0.01;               // sigma_h = level * 1 cm
  double pitch_unit = deg_to_rad(0.1);     // sigma_theta = level * 0.1 deg
  std::size_t trials = 64;
  std::uint64_t seed = 0;
};

/// A.Rel of vertical-canonical decoding when the decoding rig's height and
/// pitch carry Gaussian errors. The canonical map is encoded with the true rig
/// and the virtual extension is held at the true rig's value. Every level
/// reuses the same standard-normal draws, scaled by the level.
inline std::vector<SensitivityRow> calibration_sensitivity(const DepthMap& gt,
                                                           const CameraRig& rig,
                                                           const CanonicalConfig& cfg,
                                                           const SensitivityOptions& opts = {}) {
  const VerticalTransform truth(rig, cfg);
  const CanonicalMap canonical = vct_from_depth(gt, truth).canonical;
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::pair<double, double>> draws(opts.trials);
  for (auto& d : draws) d = {normal(rng), normal(rng)};

  std::vector<SensitivityRow> rows;
  for (double level : opts.levels) {
    SensitivityRow row{level, level * opts.height_unit, level * opts.pitch_unit, 0.0};
    for (const auto& [zh, zp] : draws) {
      CameraRig noisy = rig;
      noisy.height_m = rig.height_m + row.sigma_height * zh;
      noisy.pitch = rig.pitch + row.sigma_pitch * zp;
      const VerticalTransform vct(noisy, cfg, truth.effective_height());
      row.mean_abs_rel += compute_metrics(vct_to_depth(canonical, vct).depth, gt).abs_rel;
    }
    row.mean_abs_rel /= static_cast<double>(draws.size());
    rows.push_back(row);
  }
  return rows;
}

}  // namespace gvgeom
