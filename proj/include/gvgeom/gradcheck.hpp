// Copyright 2026 The gvgeom Authors
// SPDX-License-Identifier: Apache-2.0
//
// Random-input gradient checks for every loss, shared by the CLI and tests.
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gvgeom/augment.hpp"
#include "gvgeom/calibrate.hpp"
#include "gvgeom/losses.hpp"

namespace gvgeom {

struct GradCheckCase {
  std::string loss;
  GradCheckReport report;
};

namespace detail {

inline Grid<double> random_grid(std::mt19937_64& rng, int rows, int cols, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Grid<double> g(rows, cols);
  for (double& x : g.flat()) x = u(rng);
  return g;
}

inline DepthMap as_depth(const Grid<double>& g) {
  return DepthMap(MaskedMap(g, Mask(g.rows(), g.cols(), 1)));
}
inline UncertaintyMap as_sigma(const Grid<double>& g) {
  return UncertaintyMap(MaskedMap(g, Mask(g.rows(), g.cols(), 1)));
}

struct ConsistencySetup {
  AugmentSpec t1, t2;
  DepthMap d2;
};

// Two overlapping crops of a (size + 4)^2 source, both resized to about
// size x size.
inline ConsistencySetup random_consistency_setup(std::mt19937_64& rng, int size) {
  const int src = size + 4;
  std::uniform_int_distribution<int> off(0, 3);
  std::uniform_int_distribution<int> side(size - 1, size + 1);
  auto spec = [&](std::uint64_t seed) {
    AugmentSpec s;
    s.source_height = s.source_width = src;
    s.crop.width = side(rng);
    s.crop.height = side(rng);
    s.crop.x0 = std::min(off(rng), src - s.crop.width);
    s.crop.y0 = std::min(off(rng), src - s.crop.height);
    s.out_height = s.out_width = size;
    s.seed = seed;
    return s;
  };
  ConsistencySetup cs;
  cs.t1 = spec(1);
  cs.t2 = spec(2);
  cs.d2 = as_depth(random_grid(rng, cs.t2.out_height, cs.t2.out_width, 5.0, 30.0));
  return cs;
}

// D1 coordinates feeding an output pixel whose residual is within `band`
// of the |.| kink.
inline std::vector<std::uint8_t> consistency_kinks(const Grid<double>& d1,
                                                   const ConsistencySetup& cs, double band) {
  const ResamplePlan plan = make_resample_plan(cs.t1, cs.t2);
  std::vector<std::uint8_t> kink(d1.size(), 0);
  for (std::size_t i = 0; i < plan.taps.size(); ++i) {
    if (plan.tap_count[i] == 0) continue;
    double w = 0.0;
    for (int t = 0; t < plan.tap_count[i]; ++t)
      w += plan.taps[i][t].weight * d1[plan.taps[i][t].index];
    if (std::abs(w - cs.d2.values[i]) < band)
      for (int t = 0; t < plan.tap_count[i]; ++t) kink[plan.taps[i][t].index] = 1;
  }
  return kink;
}

}  // namespace detail

/// Checks si_log, uncertainty, consistency and total losses on random
/// size x size inputs. Coordinates within 10 * eps of an L1 kink are skipped.
inline std::vector<GradCheckCase> run_gradcheck_suite(std::uint64_t seed, int size = 8,
                                                      const GradCheckOptions& base = {},
                                                      const LossConfig& cfg = {}) {
  std::mt19937_64 rng(seed);
  GradCheckOptions opts = base;
  opts.seed = mix_seed(seed, 99);
  const double band = 10.0 * opts.eps;

  const Grid<double> gt_g = detail::random_grid(rng, size, size, 2.0, 60.0);
  const DepthMap gt = detail::as_depth(gt_g);
  std::vector<Grid<double>> unc_inputs = {
      detail::random_grid(rng, size, size, 2.0, 60.0),  // depth_focal
      detail::random_grid(rng, size, size, 2.0, 60.0),  // depth_vertical
      detail::random_grid(rng, size, size, 0.5, 5.0),   // sigma_focal
      detail::random_grid(rng, size, size, 0.5, 5.0)};  // sigma_vertical
  const Grid<double> pred_g = detail::random_grid(rng, size, size, 2.0, 60.0);
  const auto cs = detail::random_consistency_setup(rng, size);
  const Grid<double> d1_g =
      detail::random_grid(rng, cs.t1.out_height, cs.t1.out_width, 5.0, 30.0);

  auto si = [&](const Grid<double>& pred) { return si_log_loss(detail::as_depth(pred), gt, cfg); };
  auto unc = [&](std::span<const Grid<double>> in) {
    return uncertainty_loss(detail::as_depth(in[0]), detail::as_depth(in[1]),
                            detail::as_sigma(in[2]), detail::as_sigma(in[3]), gt, cfg);
  };
  auto con = [&](const Grid<double>& d1) {
    return consistency_loss(detail::as_depth(d1), cs.d2, cs.t1, cs.t2);
  };
  auto unc_kink = [&](const std::vector<Grid<double>>& in, std::size_t k, std::size_t i) {
    return k < 2 && std::abs(in[k][i] - gt_g[i]) < band;
  };

  std::vector<GradCheckCase> out;
  out.push_back({"si_log",
                 finite_difference_check(
                     [&](std::span<const Grid<double>> in) { return si(in[0]); }, {pred_g},
                     {std::string(grad::kPred)}, opts)});

  out.push_back({"uncertainty",
                 finite_difference_check(
                     unc, unc_inputs,
                     {std::string(grad::kDepthFocal), std::string(grad::kDepthVertical),
                      std::string(grad::kSigmaFocal), std::string(grad::kSigmaVertical)},
                     opts,
                     [&](std::size_t k, std::size_t i) { return unc_kink(unc_inputs, k, i); })});

  const auto con_kinks = detail::consistency_kinks(d1_g, cs, band);
  out.push_back({"consistency",
                 finite_difference_check(
                     [&](std::span<const Grid<double>> in) { return con(in[0]); }, {d1_g},
                     {std::string(grad::kDepth1)}, opts,
                     [&](std::size_t, std::size_t i) { return con_kinks[i] != 0; })});

  std::vector<Grid<double>> all = {pred_g};
  all.insert(all.end(), unc_inputs.begin(), unc_inputs.end());
  all.push_back(d1_g);
  auto total = [&](std::span<const Grid<double>> in) {
    LossComponents parts{si(in[0]), unc(in.subspan(1, 4)), con(in[5])};
    return total_loss(parts, cfg);
  };
  out.push_back({"total",
                 finite_difference_check(
                     total, all,
                     {std::string(grad::kPred), std::string(grad::kDepthFocal),
                      std::string(grad::kDepthVertical), std::string(grad::kSigmaFocal),
                      std::string(grad::kSigmaVertical), std::string(grad::kDepth1)},
                     opts,
                     [&](std::size_t k, std::size_t i) {
                       if (k >= 1 && k <= 4) return unc_kink(unc_inputs, k - 1, i);
                       if (k == 5) return con_kinks[i] != 0;
                       return false;
                     })});
  return out;
}

}  // namespace gvgeom
