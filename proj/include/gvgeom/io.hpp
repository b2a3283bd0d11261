// Copyright 2026 The gvgeom Authors
// SPDX-License-Identifier: Apache-2.0
//
// File formats: single-channel PFM float maps, JSON rigs, scenes,
// augmentation specs and canonical-map sidecars.
//
// Angles are stored in degrees in every JSON document and converted to
// radians on load.
#pragma once

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <locale>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gvgeom/augment.hpp"
#include "gvgeom/camera.hpp"
#include "gvgeom/canonical.hpp"
#include "gvgeom/error.hpp"
#include "gvgeom/map.hpp"
#include "gvgeom/synth.hpp"

namespace gvgeom::io {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// PFM: "Pf\n<W> <H>\n<scale>\n" then W*H 32-bit floats, bottom row first.
// A negative scale means little-endian payload. Invalid pixels are 0.0.

namespace detail {

inline std::uint32_t byteswap32(std::uint32_t x) {
  return ((x & 0xFF000000u) >> 24) | ((x & 0x00FF0000u) >> 8) | ((x & 0x0000FF00u) << 8) |
         ((x & 0x000000FFu) << 24);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace detail

/// Raw float payload in top-to-bottom row order.
struct PfmImage {
  int width = 0;
  int height = 0;
  std::vector<float> pixels;
};

inline std::string encode_pfm(const PfmImage& img) {
  require(img.width >= 1 && img.height >= 1 &&
              img.pixels.size() == static_cast<std::size_t>(img.width) * img.height,
          ErrorCode::kShapeMismatch, "pfm: pixel count does not match dimensions");
  std::string out = "Pf\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                    "\n-1\n";
  const std::size_t header = out.size();
  out.resize(header + img.pixels.size() * 4);
  char* dst = out.data() + header;
  for (int r = img.height - 1; r >= 0; --r) {
    for (int c = 0; c < img.width; ++c) {
      std::uint32_t bits = std::bit_cast<std::uint32_t>(
          img.pixels[static_cast<std::size_t>(r) * img.width + c]);
      if constexpr (std::endian::native == std::endian::big) bits = detail::byteswap32(bits);
      std::memcpy(dst, &bits, 4);
      dst += 4;
    }
  }
  return out;
}

inline PfmImage decode_pfm(const std::string& bytes) {
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  };
  auto token = [&] {
    skip_ws();
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return bytes.substr(start, pos - start);
  };
  const std::string magic = token();
  if (magic == "PF") throw Error(ErrorCode::kPfmHeader, "pfm: 3-channel files not supported");
  if (magic != "Pf") throw Error(ErrorCode::kPfmHeader, "pfm: missing 'Pf' magic");

  PfmImage img;
  double scale = 0.0;
  try {
    std::size_t used = 0;
    const std::string w = token(), h = token(), s = token();
    img.width = std::stoi(w, &used);
    if (used != w.size()) throw std::invalid_argument(w);
    img.height = std::stoi(h, &used);
    if (used != h.size()) throw std::invalid_argument(h);
    std::istringstream ss(s);
    ss.imbue(std::locale::classic());
    ss >> scale;
    if (!ss || !ss.eof()) throw std::invalid_argument(s);
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::kPfmHeader, "pfm: malformed header");
  }
  if (img.width < 1 || img.height < 1)
    throw Error(ErrorCode::kPfmHeader, "pfm: dimensions must be positive");
  if (scale == 0.0) throw Error(ErrorCode::kPfmScale, "pfm: scale must be non-zero");
  // Exactly one whitespace byte separates the header from the payload.
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos])))
    throw Error(ErrorCode::kPfmPayload, "pfm: payload missing");
  ++pos;

  const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
  if (bytes.size() - pos < count * 4)
    throw Error(ErrorCode::kPfmPayload, "pfm: payload shorter than width * height floats");
  const bool file_little = scale < 0.0;
  const bool swap = file_little != (std::endian::native == std::endian::little);
  img.pixels.resize(count);
  const char* src = bytes.data() + pos;
  for (int r = img.height - 1; r >= 0; --r) {
    for (int c = 0; c < img.width; ++c) {
      std::uint32_t bits;
      std::memcpy(&bits, src, 4);
      src += 4;
      if (swap) bits = detail::byteswap32(bits);
      img.pixels[static_cast<std::size_t>(r) * img.width + c] = std::bit_cast<float>(bits);
    }
  }
  return img;
}

inline PfmImage to_pfm(const MaskedMap& m, bool zero_is_valid = false) {
  PfmImage img{m.cols(), m.rows(), std::vector<float>(m.size(), 0.0f)};
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!m.is_valid(i)) continue;
    float v = static_cast<float>(m.values[i]);
    // 0.0 means invalid on disk; a genuine zero is nudged to the smallest
    // positive float.
    if (v == 0.0f && zero_is_valid) v = std::numeric_limits<float>::denorm_min();
    img.pixels[i] = v;
  }
  return img;
}

inline MaskedMap from_pfm(const PfmImage& img) {
  MaskedMap m(img.height, img.width, 0.0, false);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const float v = img.pixels[i];
    if (v != 0.0f && std::isfinite(v)) {
      m.values[i] = v;
      m.valid[i] = 1;
    }
  }
  return m;
}

inline void write_pfm(const std::filesystem::path& path, const MaskedMap& m) {
  detail::write_file(path, encode_pfm(to_pfm(m)));
}

inline void write_pfm(const std::filesystem::path& path, const CanonicalMap& m) {
  detail::write_file(path, encode_pfm(to_pfm(m, m.kind == CanonicalKind::kVertical)));
}

inline MaskedMap read_pfm(const std::filesystem::path& path) {
  return from_pfm(decode_pfm(detail::read_file(path)));
}

inline DepthMap read_depth(const std::filesystem::path& path) { return DepthMap(read_pfm(path)); }

inline Mask read_mask(const std::filesystem::path& path) { return read_pfm(path).valid; }

inline void write_mask(const std::filesystem::path& path, const Mask& mask) {
  MaskedMap m(mask.rows(), mask.cols(), 1.0, false);
  m.valid = mask;
  write_pfm(path, m);
}

// ---------------------------------------------------------------------------
// JSON documents.

inline Json read_json(const std::filesystem::path& path) {
  try {
    return Json::parse(detail::read_file(path));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, path.string() + ": " + e.what());
  }
}

inline void write_json(const std::filesystem::path& path, const Json& j) {
  detail::write_file(path, j.dump(2) + "\n");
}

template <typename T>
T get_field(const Json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("field '") + key + "': " + e.what());
  }
}

inline Json rig_to_json(const CameraRig& rig) {
  return Json{{"fx", rig.fx},
              {"fy", rig.fy},
              {"cx", rig.cx},
              {"cy", rig.cy},
              {"H", rig.image_height},
              {"W", rig.image_width},
              {"height_m", rig.height_m},
              {"pitch_deg", rad_to_deg(rig.pitch)}};
}

inline CameraRig rig_from_json(const Json& j) {
  CameraRig rig;
  rig.fx = get_field<double>(j, "fx");
  rig.fy = get_field<double>(j, "fy");
  rig.cx = get_field<double>(j, "cx");
  rig.cy = get_field<double>(j, "cy");
  rig.image_height = get_field<int>(j, "H");
  rig.image_width = get_field<int>(j, "W");
  rig.height_m = get_field<double>(j, "height_m");
  rig.pitch = deg_to_rad(get_field<double>(j, "pitch_deg"));
  rig.validate();
  return rig;
}

inline CameraRig read_rig(const std::filesystem::path& path) {
  return rig_from_json(read_json(path));
}

/// FNV-1a over the canonical JSON text of the rig, as 16 hex digits.
inline std::string rig_hash(const CameraRig& rig) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : rig_to_json(rig).dump()) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int k = 15; k >= 0; --k, h >>= 4) out[k] = kHex[h & 0xF];
  return out;
}

inline Json scene_to_json(const SceneSpec& s) {
  Json boxes = Json::array();
  for (const auto& b : s.boxes) {
    boxes.push_back({{"center", {b.center.x(), b.center.y(), b.center.z()}},
                     {"extents", {b.extents.x(), b.extents.y(), b.extents.z()}}});
  }
  return Json{{"ground",
               {{"height_offset_m", s.ground.height_offset},
                {"slope_x_deg", rad_to_deg(s.ground.slope_x)},
                {"slope_y_deg", rad_to_deg(s.ground.slope_y)}}},
              {"boxes", boxes},
              {"seed", s.seed}};
}

inline SceneSpec scene_from_json(const Json& j) {
  SceneSpec s;
  if (j.contains("ground")) {
    const Json& g = j.at("ground");
    s.ground.height_offset = g.value("height_offset_m", 0.0);
    s.ground.slope_x = deg_to_rad(g.value("slope_x_deg", 0.0));
    s.ground.slope_y = deg_to_rad(g.value("slope_y_deg", 0.0));
  }
  for (const Json& b : j.value("boxes", Json::array())) {
    const auto c = get_field<std::vector<double>>(b, "center");
    const auto e = get_field<std::vector<double>>(b, "extents");
    require(c.size() == 3 && e.size() == 3, ErrorCode::kInvalidArgument,
            "scene: box center and extents need 3 components");
    s.boxes.push_back({Vec3(c[0], c[1], c[2]), Vec3(e[0], e[1], e[2])});
  }
  s.seed = j.value("seed", std::uint64_t{0});
  s.validate();
  return s;
}

inline Json augment_to_json(const AugmentSpec& a) {
  return Json{{"source_size", {{"H", a.source_height}, {"W", a.source_width}}},
              {"crop", {{"x0", a.crop.x0}, {"y0", a.crop.y0}, {"w", a.crop.width},
                        {"h", a.crop.height}}},
              {"out_size", {{"H", a.out_height}, {"W", a.out_width}}},
              {"seed", a.seed}};
}

inline AugmentSpec augment_from_json(const Json& j) {
  AugmentSpec a;
  const Json src = get_field<Json>(j, "source_size");
  const Json crop = get_field<Json>(j, "crop");
  const Json out = get_field<Json>(j, "out_size");
  a.source_height = get_field<int>(src, "H");
  a.source_width = get_field<int>(src, "W");
  a.crop = {get_field<int>(crop, "x0"), get_field<int>(crop, "y0"), get_field<int>(crop, "w"),
            get_field<int>(crop, "h")};
  a.out_height = get_field<int>(out, "H");
  a.out_width = get_field<int>(out, "W");
  a.seed = j.value("seed", std::uint64_t{0});
  a.validate();
  return a;
}

// ---------------------------------------------------------------------------
// Canonical maps: PFM plus "<file>.json" sidecar.

inline std::filesystem::path sidecar_path(const std::filesystem::path& pfm) {
  return std::filesystem::path(pfm.string() + ".json");
}

inline Json canonical_sidecar(CanonicalKind kind, const CameraRig& rig,
                              const CanonicalConfig& cfg) {
  Json j{{"kind", kind == CanonicalKind::kFocal ? "focal" : "vertical"},
         {"rig_hash", rig_hash(rig)},
         {"focal_c", cfg.focal},
         {"d_max", cfg.max_depth},
         {"d_min_ext", cfg.min_ext_depth}};
  if (kind == CanonicalKind::kVertical) {
    const VerticalTransform vct(rig, cfg);
    j["H_ext"] = vct.effective_height();
    j["y_max"] = vct.y_max();
  }
  return j;
}

inline void write_canonical(const std::filesystem::path& path, const CanonicalMap& m,
                            const CameraRig& rig, const CanonicalConfig& cfg) {
  write_pfm(path, m);
  write_json(sidecar_path(path), canonical_sidecar(m.kind, rig, cfg));
}

struct CanonicalFile {
  CanonicalMap map;
  Json sidecar;  // null when absent
};

inline CanonicalFile read_canonical(const std::filesystem::path& path,
                                    CanonicalKind expected) {
  CanonicalFile out{CanonicalMap(expected, read_pfm(path)), nullptr};
  const auto side = sidecar_path(path);
  if (std::filesystem::exists(side)) {
    out.sidecar = read_json(side);
    const std::string kind = out.sidecar.value("kind", "");
    require(kind == (expected == CanonicalKind::kFocal ? "focal" : "vertical"),
            ErrorCode::kInvalidArgument, "canonical sidecar kind does not match");
  }
  return out;
}

}  // namespace gvgeom::io
