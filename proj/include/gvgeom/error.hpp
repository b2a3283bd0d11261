// Copyright 2026 The gvgeom Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gvgeom {

enum class ErrorCode {
  kInvalidArgument,
  kShapeMismatch,
  kEmptyMask,
  kNonPositiveValue,
  kDegenerate,
  kNoDominantPlane,
  kInconsistentData,
  kIo,
  kPfmHeader,
  kPfmPayload,
  kPfmScale,
  kNonFinite,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kShapeMismatch: return "shape_mismatch";
    case ErrorCode::kEmptyMask: return "empty_mask";
    case ErrorCode::kNonPositiveValue: return "non_positive_value";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kNoDominantPlane: return "no_dominant_plane";
    case ErrorCode::kInconsistentData: return "inconsistent_data";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kPfmHeader: return "pfm_header";
    case ErrorCode::kPfmPayload: return "pfm_payload";
    case ErrorCode::kPfmScale: return "pfm_scale";
    case ErrorCode::kNonFinite: return "non_finite";
  }
  return "unknown";
}

/// Exception carrying a machine-readable code. All library failures throw this.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const char* message) {
  if (!condition) throw Error(code, message);
}

}  // namespace gvgeom
