// Copyright 2026 The gvgeom Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "gvgeom/error.hpp"
#include "gvgeom/map.hpp"

namespace gvgeom {

struct EvalRange {
  double min_depth = 0.0;
  double max_depth = 80.0;
};

/// abs_rel and the deltas are fractions; rms is in meters.
struct MetricReport {
  double abs_rel = 0.0;
  double rms = 0.0;
  double rms_log = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta3 = 0.0;
  std::size_t n_valid = 0;
};

/// Running sums behind a MetricReport; lets callers pool pixels across maps.
class MetricAccumulator {
 public:
  void add(double pred, double gt) {
    const double diff = pred - gt;
    const double log_diff = std::log(pred) - std::log(gt);
    const double ratio = std::max(pred / gt, gt / pred);
    abs_rel_ += std::abs(diff) / gt;
    sq_ += diff * diff;
    sq_log_ += log_diff * log_diff;
    if (ratio < 1.25) ++d1_;
    if (ratio < 1.25 * 1.25) ++d2_;
    if (ratio < 1.25 * 1.25 * 1.25) ++d3_;
    ++n_;
  }

  std::size_t count() const noexcept { return n_; }
  double abs_rel_sum() const noexcept { return abs_rel_; }

  MetricReport report() const {
    require(n_ > 0, ErrorCode::kEmptyMask, "metrics: no valid pixels");
    const double n = static_cast<double>(n_);
    return MetricReport{abs_rel_ / n,
                        std::sqrt(sq_ / n),
                        std::sqrt(sq_log_ / n),
                        static_cast<double>(d1_) / n,
                        static_cast<double>(d2_) / n,
                        static_cast<double>(d3_) / n,
                        n_};
  }

 private:
  double abs_rel_ = 0.0;
  double sq_ = 0.0;
  double sq_log_ = 0.0;
  std::size_t d1_ = 0, d2_ = 0, d3_ = 0, n_ = 0;
};

// A pixel is evaluated when gt is valid, positive and within range, and pred
// is valid and positive.
inline bool eval_pixel(const DepthMap& pred, const DepthMap& gt, std::size_t i,
                       const EvalRange& range) {
  const double g = gt.values[i];
  return gt.is_valid(i) && pred.is_valid(i) && g > 0.0 && g >= range.min_depth &&
         g <= range.max_depth && pred.values[i] > 0.0;
}

inline void accumulate_metrics(MetricAccumulator& acc, const DepthMap& pred,
                               const DepthMap& gt, const EvalRange& range = {}) {
  require_same_shape(pred, gt, "metrics: prediction and ground truth differ in shape");
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (eval_pixel(pred, gt, i, range)) acc.add(pred.values[i], gt.values[i]);
  }
}

inline MetricReport compute_metrics(const DepthMap& pred, const DepthMap& gt,
                                    const EvalRange& range = {}) {
  MetricAccumulator acc;
  accumulate_metrics(acc, pred, gt, range);
  return acc.report();
}

/// Unweighted mean of per-image reports; n_valid is the pooled count.
inline MetricReport average_reports(const std::vector<MetricReport>& reports) {
  require(!reports.empty(), ErrorCode::kEmptyMask, "metrics: no reports to average");
  MetricReport out;
  for (const auto& r : reports) {
    out.abs_rel += r.abs_rel;
    out.rms += r.rms;
    out.rms_log += r.rms_log;
    out.delta1 += r.delta1;
    out.delta2 += r.delta2;
    out.delta3 += r.delta3;
    out.n_valid += r.n_valid;
  }
  const double n = static_cast<double>(reports.size());
  out.abs_rel /= n;
  out.rms /= n;
  out.rms_log /= n;
  out.delta1 /= n;
  out.delta2 /= n;
  out.delta3 /= n;
  return out;
}

// ---------------------------------------------------------------------------
// Per-depth-bin analysis.

/// Second prediction/uncertainty pair for the per-bin cue comparison. Ratios
/// are vertical over focal.
struct CueComparison {
  const DepthMap* pred_vertical = nullptr;
  const DepthMap* pred_focal = nullptr;
  const UncertaintyMap* sigma_vertical = nullptr;  // optional
  const UncertaintyMap* sigma_focal = nullptr;     // optional
};

struct BinReport {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  std::optional<MetricReport> metrics;      // absent for empty bins
  std::optional<double> abs_rel_ratio;      // A.Rel(vertical) / A.Rel(focal)
  std::optional<double> uncertainty_ratio;  // mean S_vertical / mean S_focal
};

/// Bins are [e_k, e_{k+1}) on the ground-truth depth, the last one closed.
inline std::vector<BinReport> per_bin_metrics(const DepthMap& pred, const DepthMap& gt,
                                              const std::vector<double>& edges,
                                              const CueComparison* cues = nullptr,
                                              const EvalRange& range = {}) {
  require(edges.size() >= 2, ErrorCode::kInvalidArgument, "per_bin_metrics: need two edges");
  for (std::size_t k = 1; k < edges.size(); ++k) {
    require(edges[k] > edges[k - 1], ErrorCode::kInvalidArgument,
            "per_bin_metrics: bin edges must be increasing");
  }
  require_same_shape(pred, gt, "per_bin_metrics: shape mismatch");
  const std::size_t n_bins = edges.size() - 1;
  std::vector<MetricAccumulator> acc(n_bins), acc_v(n_bins), acc_f(n_bins);
  std::vector<double> sig_v(n_bins, 0.0), sig_f(n_bins, 0.0);
  std::vector<std::size_t> sig_n(n_bins, 0);

  auto bin_of = [&](double g) -> std::optional<std::size_t> {
    if (g < edges.front() || g > edges.back()) return std::nullopt;
    if (g == edges.back()) return n_bins - 1;
    auto it = std::upper_bound(edges.begin(), edges.end(), g);
    return static_cast<std::size_t>(it - edges.begin()) - 1;
  };

  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!eval_pixel(pred, gt, i, range)) continue;
    const auto b = bin_of(gt.values[i]);
    if (!b) continue;
    acc[*b].add(pred.values[i], gt.values[i]);
    if (cues && cues->pred_vertical && cues->pred_focal &&
        eval_pixel(*cues->pred_vertical, gt, i, range) &&
        eval_pixel(*cues->pred_focal, gt, i, range)) {
      acc_v[*b].add(cues->pred_vertical->values[i], gt.values[i]);
      acc_f[*b].add(cues->pred_focal->values[i], gt.values[i]);
      if (cues->sigma_vertical && cues->sigma_focal && cues->sigma_vertical->is_valid(i) &&
          cues->sigma_focal->is_valid(i)) {
        sig_v[*b] += cues->sigma_vertical->values[i];
        sig_f[*b] += cues->sigma_focal->values[i];
        ++sig_n[*b];
      }
    }
  }

  std::vector<BinReport> out(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    out[b].lo = edges[b];
    out[b].hi = edges[b + 1];
    out[b].count = acc[b].count();
    if (acc[b].count() > 0) out[b].metrics = acc[b].report();
    if (acc_v[b].count() > 0 && acc_f[b].abs_rel_sum() > 0.0)
      out[b].abs_rel_ratio = acc_v[b].abs_rel_sum() / acc_f[b].abs_rel_sum();
    if (sig_n[b] > 0 && sig_f[b] > 0.0) out[b].uncertainty_ratio = sig_v[b] / sig_f[b];
  }
  return out;
}

/// A.Rel between analytic ground depth and ground truth on road pixels; a
/// measure of how far the real road departs from the ideal ground plane.
inline double ground_modulation(const DepthMap& pred_ground, const DepthMap& gt_road,
                                const Mask& road_mask, const EvalRange& range = {}) {
  require_same_shape(pred_ground, gt_road, "ground_modulation: shape mismatch");
  require_same_shape(road_mask, gt_road, "ground_modulation: mask shape mismatch");
  MetricAccumulator acc;
  for (std::size_t i = 0; i < gt_road.size(); ++i) {
    if (road_mask[i] && eval_pixel(pred_ground, gt_road, i, range))
      acc.add(pred_ground.values[i], gt_road.values[i]);
  }
  require(acc.count() > 0, ErrorCode::kEmptyMask, "ground_modulation: no road pixels");
  return acc.report().abs_rel;
}

}  // namespace gvgeom
