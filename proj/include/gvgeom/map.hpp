// Copyright 2026 The gvgeom Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include "gvgeom/error.hpp"

namespace gvgeom {

// Dense row-major H x W array.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(checked_size(rows, cols), fill) {}

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(int r, int c) { return data_[index(r, c)]; }
  const T& operator()(int r, int c) const { return data_[index(r, c)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> flat() noexcept { return data_; }
  std::span<const T> flat() const noexcept { return data_; }

  bool same_shape(const Grid& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  template <typename U>
  bool same_shape(const Grid<U>& other) const noexcept {
    return rows_ == other.rows() && cols_ == other.cols();
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t index(int r, int c) const noexcept {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(c);
  }
  static std::size_t checked_size(int rows, int cols) {
    require(rows >= 0 && cols >= 0, ErrorCode::kInvalidArgument,
            "grid dimensions must be non-negative");
    return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

using Mask = Grid<std::uint8_t>;

/// Real-valued map with a per-pixel validity flag.
///
/// Invalid pixels carry an unspecified value; consumers must check `valid`.
struct MaskedMap {
  Grid<double> values;
  Mask valid;

  MaskedMap() = default;
  MaskedMap(int rows, int cols, double fill = 0.0, bool is_valid = true)
      : values(rows, cols, fill), valid(rows, cols, is_valid ? 1 : 0) {}
  MaskedMap(Grid<double> v, Mask m) : values(std::move(v)), valid(std::move(m)) {
    require(values.same_shape(valid), ErrorCode::kShapeMismatch,
            "value and mask dimensions differ");
  }

  int rows() const noexcept { return values.rows(); }
  int cols() const noexcept { return values.cols(); }
  std::size_t size() const noexcept { return values.size(); }
  bool is_valid(std::size_t i) const { return valid[i] != 0; }

  std::size_t count_valid() const {
    return static_cast<std::size_t>(
        std::count_if(valid.flat().begin(), valid.flat().end(),
                      [](std::uint8_t m) { return m != 0; }));
  }

  template <typename Other>
  bool same_shape(const Other& other) const noexcept {
    return rows() == other.rows() && cols() == other.cols();
  }
};

/// Metric depth in meters.
struct DepthMap : MaskedMap {
  using MaskedMap::MaskedMap;
  explicit DepthMap(MaskedMap m) : MaskedMap(std::move(m)) {}
};

/// Positive per-pixel Laplace scale (meters).
struct UncertaintyMap : MaskedMap {
  using MaskedMap::MaskedMap;
  explicit UncertaintyMap(MaskedMap m) : MaskedMap(std::move(m)) {}
};

enum class CanonicalKind { kFocal, kVertical };

/// Prediction in a camera-independent space: canonical-focal depth (meters) or
/// ground-projection vertical position (extended-image pixels).
struct CanonicalMap : MaskedMap {
  CanonicalKind kind = CanonicalKind::kFocal;

  CanonicalMap() = default;
  CanonicalMap(CanonicalKind k, MaskedMap m) : MaskedMap(std::move(m)), kind(k) {}
};

template <typename A, typename B>
void require_same_shape(const A& a, const B& b, const char* message) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::kShapeMismatch,
          message);
}

// Runs fn(row) for every row in [0, rows); rows are split into contiguous
// blocks, one per worker. threads == 0 means hardware concurrency.
template <typename Fn>
void parallel_rows(int rows, unsigned threads, Fn&& fn) {
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                  : threads;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max(rows, 1)));
  if (workers <= 1) {
    for (int r = 0; r < rows; ++r) fn(r);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const int block = (rows + static_cast<int>(workers) - 1) / static_cast<int>(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const int begin = static_cast<int>(w) * block;
    const int end = std::min(rows, begin + block);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &fn] {
      for (int r = begin; r < end; ++r) fn(r);
    });
  }
}

}  // namespace gvgeom
