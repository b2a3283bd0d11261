// Copyright 2026 The gvgeom Authors
// SPDX-License-Identifier: Apache-2.0
//
// Training losses over depth maps with analytic gradients.
//
// Reductions are plain sequential sums in row-major pixel order, so results
// are bit-reproducible for a given input.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gvgeom/augment.hpp"
#include "gvgeom/error.hpp"
#include "gvgeom/map.hpp"

namespace gvgeom {

struct LossConfig {
  double alpha = 10.0;
  double lambda = 0.15;
  double lambda_unc = 0.5;
  double lambda_con = 0.1;
  double max_depth = 80.0;  // ground truth beyond this is ignored
};

namespace grad {
inline constexpr std::string_view kPred = "pred";
inline constexpr std::string_view kDepthFocal = "depth_focal";
inline constexpr std::string_view kDepthVertical = "depth_vertical";
inline constexpr std::string_view kSigmaFocal = "sigma_focal";
inline constexpr std::string_view kSigmaVertical = "sigma_vertical";
inline constexpr std::string_view kDepth1 = "depth_1";
inline constexpr std::string_view kDepth2 = "depth_2";
}  // namespace grad

/// Scalar loss plus d(loss)/d(input) for each differentiable input, keyed by
/// input name. Gradients are zero on masked-out pixels.
struct LossResult {
  double value = 0.0;
  std::map<std::string, Grid<double>, std::less<>> gradients;

  const Grid<double>& gradient(std::string_view name) const {
    auto it = gradients.find(name);
    require(it != gradients.end(), ErrorCode::kInvalidArgument, "no gradient with that name");
    return it->second;
  }
};

namespace detail {

inline bool gt_usable(const DepthMap& gt, std::size_t i, double max_depth) {
  return gt.is_valid(i) && gt.values[i] > 0.0 && gt.values[i] <= max_depth;
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// Scale-invariant log loss alpha * sqrt(Var[E] + lambda * Mean[E]^2) with
/// E = log(pred) - log(gt) and population statistics over the joint mask.
inline LossResult si_log_loss(const DepthMap& pred, const DepthMap& gt,
                              const LossConfig& cfg = {}) {
  require_same_shape(pred, gt, "si_log_loss: shape mismatch");
  const std::size_t n_pix = pred.size();
  std::vector<double> err(n_pix, 0.0);
  std::vector<std::uint8_t> use(n_pix, 0);
  std::size_t n = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n_pix; ++i) {
    if (!(pred.is_valid(i) && detail::gt_usable(gt, i, cfg.max_depth))) continue;
    require(pred.values[i] > 0.0, ErrorCode::kNonPositiveValue,
            "si_log_loss: predicted depth must be positive");
    err[i] = std::log(pred.values[i]) - std::log(gt.values[i]);
    use[i] = 1;
    sum += err[i];
    ++n;
  }
  require(n > 0, ErrorCode::kEmptyMask, "si_log_loss: no valid pixels");
  const double nd = static_cast<double>(n);
  const double mean = sum / nd;
  double var = 0.0;
  for (std::size_t i = 0; i < n_pix; ++i) {
    if (use[i]) var += (err[i] - mean) * (err[i] - mean);
  }
  var /= nd;
  const double s = var + cfg.lambda * mean * mean;

  LossResult out;
  out.value = cfg.alpha * std::sqrt(s);
  Grid<double> g(pred.rows(), pred.cols(), 0.0);
  if (s > 0.0) {
    // dS/dE_i = 2 (E_i - mean) / n + 2 lambda mean / n
    const double k = cfg.alpha / (2.0 * std::sqrt(s));
    for (std::size_t i = 0; i < n_pix; ++i) {
      if (!use[i]) continue;
      const double ds = 2.0 * ((err[i] - mean) + cfg.lambda * mean) / nd;
      g[i] = k * ds / pred.values[i];
    }
  }
  out.gradients.emplace(grad::kPred, std::move(g));
  return out;
}

// ---------------------------------------------------------------------------

/// Mean over the mask of
///   |D_F - gt| / S_F + |D_Y - gt| / S_Y + log S_F + log S_Y.
/// The subgradient of |.| at zero is taken as 0.
inline LossResult uncertainty_loss(const DepthMap& depth_focal, const DepthMap& depth_vertical,
                                   const UncertaintyMap& sigma_focal,
                                   const UncertaintyMap& sigma_vertical, const DepthMap& gt,
                                   const Mask& mask, const LossConfig& cfg = {}) {
  require_same_shape(depth_focal, gt, "uncertainty_loss: focal depth shape mismatch");
  require_same_shape(depth_vertical, gt, "uncertainty_loss: vertical depth shape mismatch");
  require_same_shape(sigma_focal, gt, "uncertainty_loss: focal sigma shape mismatch");
  require_same_shape(sigma_vertical, gt, "uncertainty_loss: vertical sigma shape mismatch");
  require_same_shape(mask, gt, "uncertainty_loss: mask shape mismatch");

  const std::size_t n_pix = gt.size();
  std::vector<std::uint8_t> use(n_pix, 0);
  std::size_t n = 0;
  for (std::size_t i = 0; i < n_pix; ++i) {
    if (!(mask[i] && detail::gt_usable(gt, i, cfg.max_depth) && depth_focal.is_valid(i) &&
          depth_vertical.is_valid(i) && sigma_focal.is_valid(i) && sigma_vertical.is_valid(i)))
      continue;
    require(sigma_focal.values[i] > 0.0 && sigma_vertical.values[i] > 0.0,
            ErrorCode::kNonPositiveValue, "uncertainty_loss: uncertainties must be positive");
    use[i] = 1;
    ++n;
  }
  require(n > 0, ErrorCode::kEmptyMask, "uncertainty_loss: no valid pixels");
  const double inv_n = 1.0 / static_cast<double>(n);

  auto sign = [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); };
  Grid<double> g_df(gt.rows(), gt.cols(), 0.0), g_dy(gt.rows(), gt.cols(), 0.0);
  Grid<double> g_sf(gt.rows(), gt.cols(), 0.0), g_sy(gt.rows(), gt.cols(), 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < n_pix; ++i) {
    if (!use[i]) continue;
    const double rf = depth_focal.values[i] - gt.values[i];
    const double ry = depth_vertical.values[i] - gt.values[i];
    const double sf = sigma_focal.values[i];
    const double sy = sigma_vertical.values[i];
    sum += std::abs(rf) / sf + std::abs(ry) / sy + std::log(sf) + std::log(sy);
    g_df[i] = sign(rf) / sf * inv_n;
    g_dy[i] = sign(ry) / sy * inv_n;
    g_sf[i] = (1.0 / sf - std::abs(rf) / (sf * sf)) * inv_n;
    g_sy[i] = (1.0 / sy - std::abs(ry) / (sy * sy)) * inv_n;
  }
  LossResult out;
  out.value = sum * inv_n;
  out.gradients.emplace(grad::kDepthFocal, std::move(g_df));
  out.gradients.emplace(grad::kDepthVertical, std::move(g_dy));
  out.gradients.emplace(grad::kSigmaFocal, std::move(g_sf));
  out.gradients.emplace(grad::kSigmaVertical, std::move(g_sy));
  return out;
}

inline LossResult uncertainty_loss(const DepthMap& depth_focal, const DepthMap& depth_vertical,
                                   const UncertaintyMap& sigma_focal,
                                   const UncertaintyMap& sigma_vertical, const DepthMap& gt,
                                   const LossConfig& cfg = {}) {
  return uncertainty_loss(depth_focal, depth_vertical, sigma_focal, sigma_vertical, gt,
                          Mask(gt.rows(), gt.cols(), 1), cfg);
}

// ---------------------------------------------------------------------------

/// Mean absolute difference between depth_1 (augmentation t1) resampled into
/// the t2 frame and depth_2. depth_2 is a stop-gradient target: its gradient
/// is identically zero.
inline LossResult consistency_loss(const DepthMap& depth_1, const DepthMap& depth_2,
                                   const AugmentSpec& t1, const AugmentSpec& t2) {
  require(depth_1.rows() == t1.out_height && depth_1.cols() == t1.out_width,
          ErrorCode::kShapeMismatch, "consistency_loss: depth_1 does not match t1");
  require(depth_2.rows() == t2.out_height && depth_2.cols() == t2.out_width,
          ErrorCode::kShapeMismatch, "consistency_loss: depth_2 does not match t2");
  const ResamplePlan plan = make_resample_plan(t1, t2, Interpolation::kBilinear);

  std::vector<double> residual(plan.taps.size(), 0.0);
  std::vector<std::uint8_t> use(plan.taps.size(), 0);
  std::size_t n = 0;
  for (std::size_t i = 0; i < plan.taps.size(); ++i) {
    const int k = plan.tap_count[i];
    if (k == 0 || !depth_2.is_valid(i)) continue;
    double warped = 0.0;
    bool ok = true;
    for (int t = 0; t < k; ++t) {
      const auto& tap = plan.taps[i][t];
      if (!depth_1.is_valid(tap.index)) {
        ok = false;
        break;
      }
      warped += tap.weight * depth_1.values[tap.index];
    }
    if (!ok) continue;
    residual[i] = warped - depth_2.values[i];
    use[i] = 1;
    ++n;
  }
  require(n > 0, ErrorCode::kEmptyMask, "consistency_loss: empty overlap region");
  const double inv_n = 1.0 / static_cast<double>(n);

  Grid<double> g1(depth_1.rows(), depth_1.cols(), 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < plan.taps.size(); ++i) {
    if (!use[i]) continue;
    const double r = residual[i];
    sum += std::abs(r);
    const double s = r > 0.0 ? inv_n : (r < 0.0 ? -inv_n : 0.0);
    for (int t = 0; t < plan.tap_count[i]; ++t) {
      const auto& tap = plan.taps[i][t];
      g1[tap.index] += s * tap.weight;
    }
  }
  LossResult out;
  out.value = sum * inv_n;
  out.gradients.emplace(grad::kDepth1, std::move(g1));
  out.gradients.emplace(grad::kDepth2, Grid<double>(depth_2.rows(), depth_2.cols(), 0.0));
  return out;
}

// ---------------------------------------------------------------------------

struct LossComponents {
  LossResult si_log;
  LossResult uncertainty;
  LossResult consistency;
};

/// L = L_si + lambda_unc L_unc + lambda_con L_con. Gradients with the same
/// input name are summed with the same weights.
inline LossResult total_loss(const LossComponents& parts, const LossConfig& cfg = {}) {
  LossResult out;
  out.value = parts.si_log.value + cfg.lambda_unc * parts.uncertainty.value +
              cfg.lambda_con * parts.consistency.value;
  auto accumulate = [&out](const LossResult& part, double w) {
    for (const auto& [name, g] : part.gradients) {
      auto it = out.gradients.find(name);
      if (it == out.gradients.end()) {
        it = out.gradients.emplace(name, Grid<double>(g.rows(), g.cols(), 0.0)).first;
      }
      require(it->second.same_shape(g), ErrorCode::kShapeMismatch,
              "total_loss: gradients with the same name differ in shape");
      for (std::size_t i = 0; i < g.size(); ++i) it->second[i] += w * g[i];
    }
  };
  accumulate(parts.si_log, 1.0);
  accumulate(parts.uncertainty, cfg.lambda_unc);
  accumulate(parts.consistency, cfg.lambda_con);
  return out;
}

// ---------------------------------------------------------------------------
// Finite-difference gradient checking.

using LossClosure = std::function<LossResult(std::span<const Grid<double>> inputs)>;
// Returns true for (input, flat index) coordinates that must not be checked,
// e.g. those next to an L1 kink.
using SkipPredicate = std::function<bool(std::size_t input, std::size_t index)>;

struct GradCheckOptions {
  double eps = 1e-4;
  std::size_t samples = 64;
  std::uint64_t seed = 0;
  double target_rel_error = 1e-5;  // sets the resolvable-gradient floor
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;
};

/// Central differences on a random subsample of coordinates (all of them when
/// there are no more than opts.samples). inputs[k] is differentiated against
/// the analytic gradient named names[k].
///
/// Per coordinate the error is |g - g_fd| / max(floor, |g_fd|). The floor is
/// the larger of 1e-8 and the smallest gradient whose relative error
/// finite differences can resolve to target_rel_error given the rounding
/// noise of the loss value (about 8 ulp(|f|) / eps).
inline GradCheckReport finite_difference_check(const LossClosure& loss,
                                               std::vector<Grid<double>> inputs,
                                               const std::vector<std::string>& names,
                                               const GradCheckOptions& opts = {},
                                               const SkipPredicate& skip = {}) {
  require(opts.eps >= 1e-7 && opts.eps <= 1e-3, ErrorCode::kInvalidArgument,
          "finite_difference_check: eps must lie in [1e-7, 1e-3]");
  require(names.size() == inputs.size(), ErrorCode::kInvalidArgument,
          "finite_difference_check: one gradient name per input");
  const LossResult base = loss(inputs);

  std::vector<std::pair<std::size_t, std::size_t>> coords;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    for (std::size_t i = 0; i < inputs[k].size(); ++i) {
      if (skip && skip(k, i)) continue;
      coords.emplace_back(k, i);
    }
  }
  GradCheckReport report;
  std::size_t total = 0;
  for (const auto& g : inputs) total += g.size();
  report.skipped = total - coords.size();
  if (coords.size() > opts.samples) {
    std::mt19937_64 rng(opts.seed);
    std::shuffle(coords.begin(), coords.end(), rng);
    coords.resize(opts.samples);
  }

  for (const auto& [k, i] : coords) {
    const double x0 = inputs[k][i];
    inputs[k][i] = x0 + opts.eps;
    const double fp = loss(inputs).value;
    inputs[k][i] = x0 - opts.eps;
    const double fm = loss(inputs).value;
    inputs[k][i] = x0;
    require(std::isfinite(fp) && std::isfinite(fm), ErrorCode::kNonFinite,
            "finite_difference_check: loss is not finite at a perturbed point");
    const double fd = (fp - fm) / (2.0 * opts.eps);
    const double analytic = base.gradient(names[k])[i];
    const double noise = 8.0 * std::numeric_limits<double>::epsilon() *
                         std::max({1.0, std::abs(fp), std::abs(fm)}) / opts.eps;
    const double floor = std::max(1e-8, noise / opts.target_rel_error);
    const double rel = std::abs(analytic - fd) / std::max(floor, std::abs(fd));
    report.max_rel_error = std::max(report.max_rel_error, rel);
    ++report.checked;
  }
  return report;
}

}  // namespace gvgeom
