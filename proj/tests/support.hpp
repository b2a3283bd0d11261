// Copyright 2026 The gvgeom Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "gvgeom/gvgeom.hpp"

namespace gvgeom::testing {

// fy = 700, cy = 200, H = 400, h = 1.5, theta = 0.
inline CameraRig simple_rig() {
  CameraRig rig;
  rig.fx = 700.0;
  rig.fy = 700.0;
  rig.cx = 320.0;
  rig.cy = 200.0;
  rig.image_height = 400;
  rig.image_width = 640;
  rig.height_m = 1.5;
  rig.pitch = 0.0;
  return rig;
}

inline CameraRig kitti_like_rig(double pitch_deg = -0.6, double height = 1.65) {
  CameraRig rig;
  rig.fx = 721.5;
  rig.fy = 721.5;
  rig.cx = 609.6;
  rig.cy = 172.9;
  rig.image_height = 375;
  rig.image_width = 1242;
  rig.height_m = height;
  rig.pitch = deg_to_rad(pitch_deg);
  return rig;
}

// Small rig for tests that render many frames.
inline CameraRig small_rig(double pitch_deg = -0.6, double height = 1.70) {
  CameraRig rig;
  rig.fx = 240.0;
  rig.fy = 240.0;
  rig.cx = 208.0;
  rig.cy = 60.0;
  rig.image_height = 128;
  rig.image_width = 416;
  rig.height_m = height;
  rig.pitch = deg_to_rad(pitch_deg);
  return rig;
}

inline CameraRig random_rig(std::mt19937_64& rng) {
  auto u = [&rng](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  CameraRig rig;
  rig.image_height = std::uniform_int_distribution<int>(120, 1200)(rng);
  rig.image_width = std::uniform_int_distribution<int>(160, 2000)(rng);
  rig.fy = u(200.0, 2500.0);
  rig.fx = rig.fy * u(0.9, 1.1);
  rig.cx = rig.image_width * u(0.4, 0.6);
  rig.cy = rig.image_height * u(0.3, 0.6);
  rig.height_m = u(1.0, 2.5);
  rig.pitch = deg_to_rad(u(-5.0, 5.0));
  return rig;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("gvgeom_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace gvgeom::testing
