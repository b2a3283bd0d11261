// Copyright 2026 The gvgeom Authors
// SPDX-License-Identifier: Apache-2.0
//
// The gvgeom command line. run_cli() is the whole program minus process
// setup, so tests can drive it in-process.
#pragma once

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <regex>
#include <string>
#include <system_error>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gvgeom/gvgeom.hpp"

namespace gvgeom::cli {

namespace fs = std::filesystem;
using io::Json;

struct Environment {
  std::optional<std::string> seed;  // GVGEOM_SEED
};

inline Environment environment_from_process() {
  Environment env;
  if (const char* s = std::getenv("GVGEOM_SEED")) env.seed = s;
  return env;
}

namespace detail {

// Locale-independent, 6 significant digits.
inline std::string num(double x) { return fmt::format("{:#.6g}", x); }

// The same rounding as num(), kept numeric for JSON reports.
inline double round6(double x) {
  if (!std::isfinite(x)) return x;
  const std::string s = fmt::format("{:.6g}", x);
  double out = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), out);
  return out;
}

inline void print_error(std::ostream& err, const std::string& code, const std::string& msg) {
  err << Json{{"error", code}, {"message", msg}}.dump() << "\n";
}

inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    const char* b = text.data() + pos;
    const char* e = text.data() + end;
    while (b < e && *b == ' ') ++b;
    double v = 0.0;
    const auto [p, ec] = std::from_chars(b, e, v);
    require(ec == std::errc() && p == e && b != e, ErrorCode::kInvalidArgument,
            "expected a comma-separated list of numbers");
    out.push_back(v);
    pos = end + 1;
  }
  return out;
}

struct Globals {
  unsigned threads = 0;
  Environment env;

  // GVGEOM_SEED wins over a seed given on the command line.
  std::uint64_t seed(std::uint64_t cli_value) const {
    if (!env.seed) return cli_value;
    std::uint64_t v = 0;
    const std::string& s = *env.seed;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    require(ec == std::errc() && p == s.data() + s.size() && !s.empty(),
            ErrorCode::kInvalidArgument, "GVGEOM_SEED must be an unsigned integer");
    return v;
  }
};

inline void add_canonical_flags(CLI::App* cmd, CanonicalConfig& cfg) {
  cmd->add_option("--focal", cfg.focal, "Canonical focal length f_c (pixels)")
      ->capture_default_str();
  cmd->add_option("--d-max", cfg.max_depth, "Maximum depth (m)")->capture_default_str();
  cmd->add_option("--d-min-ext", cfg.min_ext_depth,
                  "Depth imaged by the bottom row of the extended image (m)")
      ->capture_default_str();
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::string scene, rig, out_dir;
  std::size_t frames = 0;
  double noise_sigma = 0.02;
  double outlier_fraction = 0.3;
  std::uint64_t seed = 0;
};

inline void write_render(const fs::path& dir, const std::string& prefix,
                         const RenderResult& r) {
  io::write_pfm(dir / (prefix + "depth.pfm"), r.depth);
  io::write_mask(dir / (prefix + "road.pfm"), r.road);
  MaskedMap inst(r.instance.rows(), r.instance.cols(), 0.0, false);
  for (std::size_t i = 0; i < inst.size(); ++i) {
    if (r.instance[i] == kHitSky) continue;
    inst.values[i] = r.instance[i] + 1;  // ground = 1, box k = k + 2
    inst.valid[i] = 1;
  }
  io::write_pfm(dir / (prefix + "instance.pfm"), inst);
}

inline int run_synth(const SynthArgs& a, const Globals& g, std::ostream& out) {
  const CameraRig rig = io::read_rig(a.rig);
  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  io::write_json(dir / "rig.json", io::rig_to_json(rig));
  const std::uint64_t seed = g.seed(a.seed);
  if (a.frames > 0) {
    CalibrationSequenceOptions opts;
    opts.frames = a.frames;
    opts.depth_noise_sigma = a.noise_sigma;
    opts.outlier_fraction = a.outlier_fraction;
    opts.threads = g.threads;
    const auto frames = synth_calibration_sequence(rig, seed, opts);
    for (std::size_t f = 0; f < frames.size(); ++f) {
      const std::string prefix = fmt::format("frame_{:04d}_", f);
      io::write_pfm(dir / (prefix + "depth.pfm"), frames[f].depth);
      io::write_mask(dir / (prefix + "road.pfm"), frames[f].road);
    }
    out << Json{{"frames", frames.size()}, {"seed", seed}}.dump() << "\n";
    return 0;
  }
  SceneSpec scene = a.scene.empty() ? random_scene(seed) : io::scene_from_json(io::read_json(a.scene));
  const auto r = render_depth(scene, rig, {.threads = g.threads});
  write_render(dir, "", r);
  io::write_json(dir / "scene.json", io::scene_to_json(scene));
  std::size_t road = 0;
  for (auto m : r.road.flat()) road += m;
  out << Json{{"valid", r.depth.count_valid()}, {"road", road}}.dump() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// calibrate

struct CalibrateArgs {
  std::string rig, frames_dir, out;
  std::vector<std::string> depth, road;
  double max_depth = 20.0;
  int iterations = 500;
  double threshold = 0.03;
  double min_inlier_ratio = 0.5;
  std::size_t histogram_bins = 0;
  std::uint64_t seed = 0;
};

inline std::vector<CalibrationFrame> load_frames(const CalibrateArgs& a) {
  std::vector<std::pair<std::string, std::string>> files;
  if (!a.frames_dir.empty()) {
    const std::regex pat("(.*)_depth\\.pfm");
    std::vector<std::string> stems;
    for (const auto& e : fs::directory_iterator(a.frames_dir)) {
      std::smatch m;
      const std::string name = e.path().filename().string();
      if (std::regex_match(name, m, pat)) stems.push_back(m[1]);
    }
    std::sort(stems.begin(), stems.end());
    for (const auto& s : stems) {
      const fs::path dir(a.frames_dir);
      files.emplace_back((dir / (s + "_depth.pfm")).string(), (dir / (s + "_road.pfm")).string());
    }
  }
  require(a.depth.size() == a.road.size(), ErrorCode::kInvalidArgument,
          "calibrate: --depth and --road must be given the same number of times");
  for (std::size_t i = 0; i < a.depth.size(); ++i) files.emplace_back(a.depth[i], a.road[i]);
  require(!files.empty(), ErrorCode::kInvalidArgument, "calibrate: no frames given");

  std::vector<CalibrationFrame> frames;
  for (const auto& [d, r] : files) {
    CalibrationFrame f{io::read_depth(d), io::read_mask(r)};
    require_same_shape(f.depth, f.road, "calibrate: depth and road mask differ in shape");
    frames.push_back(std::move(f));
  }
  return frames;
}

inline int run_calibrate(const CalibrateArgs& a, const Globals& g, std::ostream& out) {
  const CameraRig rig = io::read_rig(a.rig);
  const auto frames = load_frames(a);
  CalibrateOptions opts;
  opts.max_depth = a.max_depth;
  opts.ransac.iterations = a.iterations;
  opts.ransac.inlier_threshold = a.threshold;
  opts.ransac.min_inlier_ratio = a.min_inlier_ratio;
  opts.ransac.seed = g.seed(a.seed);
  opts.threads = g.threads;
  const auto res = calibrate_sequence(frames, rig, opts);

  Json per_frame = Json::array(), skipped = Json::array();
  std::vector<double> heights, pitches;
  for (const auto& f : res.per_frame) {
    per_frame.push_back({{"frame", f.frame},
                         {"height_m", round6(f.height_m)},
                         {"pitch_deg", round6(rad_to_deg(f.pitch))},
                         {"points", f.points},
                         {"inliers", f.inliers}});
    heights.push_back(f.height_m);
    pitches.push_back(rad_to_deg(f.pitch));
  }
  for (const auto& s : res.skipped) skipped.push_back({{"frame", s.frame}, {"reason", s.reason}});
  Json report{{"height_m", round6(res.height_median)},
              {"pitch_deg", round6(rad_to_deg(res.pitch_median))},
              {"frames_used", res.per_frame.size()},
              {"frames_skipped", res.skipped.size()},
              {"per_frame", per_frame},
              {"skipped", skipped}};
  if (a.histogram_bins > 0) {
    auto hist_json = [&](const std::vector<double>& v) {
      const Histogram h = histogram(v, a.histogram_bins);
      return Json{{"lo", round6(h.lo)}, {"hi", round6(h.hi)}, {"counts", h.counts}};
    };
    report["histogram"] = {{"height_m", hist_json(heights)}, {"pitch_deg", hist_json(pitches)}};
  }
  if (a.out.empty()) {
    out << report.dump(2) << "\n";
  } else {
    io::write_json(a.out, report);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// transform

struct TransformArgs {
  std::string mode, direction, in, out, rig;
  bool allow_rig_mismatch = false;
  CanonicalConfig cfg;
};

inline int run_transform(const TransformArgs& a, std::ostream& out) {
  const CameraRig rig = io::read_rig(a.rig);
  a.cfg.validate();
  std::size_t clamped = 0, valid = 0;
  if (a.mode == "fct") {
    if (a.direction == "from") {
      const auto c = fct_from_depth(io::read_depth(a.in), rig, a.cfg);
      io::write_canonical(a.out, c, rig, a.cfg);
      valid = c.count_valid();
    } else {
      const auto file = io::read_canonical(a.in, CanonicalKind::kFocal);
      const auto d = fct_to_depth(file.map, rig, a.cfg);
      io::write_pfm(a.out, d);
      valid = d.count_valid();
    }
  } else {
    if (a.direction == "from") {
      const VerticalTransform vct(rig, a.cfg);
      auto res = vct_from_depth(io::read_depth(a.in), vct);
      io::write_canonical(a.out, res.canonical, rig, a.cfg);
      clamped = res.clamped;
      valid = res.canonical.count_valid();
    } else {
      const auto file = io::read_canonical(a.in, CanonicalKind::kVertical);
      std::optional<double> h_ext;
      if (!file.sidecar.is_null()) {
        require(a.allow_rig_mismatch || file.sidecar.value("rig_hash", "") == io::rig_hash(rig),
                ErrorCode::kInconsistentData,
                "transform: canonical map was encoded with a different rig "
                "(pass --allow-rig-mismatch to decode anyway)");
        if (file.sidecar.contains("H_ext")) h_ext = file.sidecar.at("H_ext").get<double>();
      }
      const VerticalTransform vct = h_ext ? VerticalTransform(rig, a.cfg, *h_ext)
                                          : VerticalTransform(rig, a.cfg);
      auto res = vct_to_depth(file.map, vct);
      io::write_pfm(a.out, res.depth);
      clamped = res.clamped;
      valid = res.depth.count_valid();
    }
  }
  out << Json{{"valid", valid}, {"clamped", clamped}}.dump() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// fuse

struct FuseArgs {
  std::string depth_focal, depth_vertical, sigma_focal, sigma_vertical, out;
  bool log_sigma = false;
};

inline int run_fuse(const FuseArgs& a, std::ostream& out) {
  auto sigma = [&](const std::string& path) {
    MaskedMap m = io::read_pfm(path);
    return a.log_sigma ? activate_log_uncertainty(m) : UncertaintyMap(std::move(m));
  };
  const DepthMap fused = fuse(io::read_depth(a.depth_focal), io::read_depth(a.depth_vertical),
                              sigma(a.sigma_focal), sigma(a.sigma_vertical));
  io::write_pfm(a.out, fused);
  out << Json{{"valid", fused.count_valid()}}.dump() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::vector<std::string> pred, gt;
  std::string split = "split";
  std::string bins, per_bin_csv;
  std::string pred_vertical, pred_focal, sigma_vertical, sigma_focal;
  double min_depth = 0.0;
  double max_depth = 80.0;
  bool per_image = false;
  bool header = true;
};

inline int run_eval(const EvalArgs& a, std::ostream& out) {
  require(!a.pred.empty() && a.pred.size() == a.gt.size(), ErrorCode::kInvalidArgument,
          "eval: give --pred and --gt the same number of times");
  const EvalRange range{a.min_depth, a.max_depth};
  MetricAccumulator pooled;
  std::vector<MetricReport> per_image;
  std::vector<DepthMap> preds, gts;
  for (std::size_t i = 0; i < a.pred.size(); ++i) {
    preds.push_back(io::read_depth(a.pred[i]));
    gts.push_back(io::read_depth(a.gt[i]));
    if (a.per_image) {
      per_image.push_back(compute_metrics(preds.back(), gts.back(), range));
    } else {
      accumulate_metrics(pooled, preds.back(), gts.back(), range);
    }
  }
  const MetricReport r = a.per_image ? average_reports(per_image) : pooled.report();
  if (a.header) out << "split,n_valid,abs_rel_pct,rms,rms_log,delta1,delta2,delta3\n";
  out << fmt::format("{},{},{},{},{},{},{},{}\n", a.split, r.n_valid, num(100.0 * r.abs_rel),
                     num(r.rms), num(r.rms_log), num(r.delta1), num(r.delta2), num(r.delta3));

  if (!a.per_bin_csv.empty() || !a.bins.empty()) {
    require(a.pred.size() == 1, ErrorCode::kInvalidArgument,
            "eval: per-bin analysis takes a single prediction/ground-truth pair");
    const std::vector<double> edges =
        a.bins.empty() ? std::vector<double>{a.min_depth, a.max_depth} : parse_list(a.bins);
    std::optional<DepthMap> pv, pf;
    std::optional<UncertaintyMap> sv, sf;
    CueComparison cues;
    const bool have_cues = !a.pred_vertical.empty() && !a.pred_focal.empty();
    if (have_cues) {
      pv = io::read_depth(a.pred_vertical);
      pf = io::read_depth(a.pred_focal);
      cues.pred_vertical = &*pv;
      cues.pred_focal = &*pf;
      if (!a.sigma_vertical.empty() && !a.sigma_focal.empty()) {
        sv = UncertaintyMap(io::read_pfm(a.sigma_vertical));
        sf = UncertaintyMap(io::read_pfm(a.sigma_focal));
        cues.sigma_vertical = &*sv;
        cues.sigma_focal = &*sf;
      }
    }
    const auto bins = per_bin_metrics(preds[0], gts[0], edges, have_cues ? &cues : nullptr,
                                      range);
    std::string csv =
        "lo,hi,count,abs_rel_pct,rms,rms_log,delta1,delta2,delta3,abs_rel_ratio,sigma_ratio\n";
    auto opt = [](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
    for (const auto& b : bins) {
      csv += fmt::format("{},{},{},", num(b.lo), num(b.hi), b.count);
      if (b.metrics) {
        const auto& m = *b.metrics;
        csv += fmt::format("{},{},{},{},{},{},", num(100.0 * m.abs_rel), num(m.rms),
                           num(m.rms_log), num(m.delta1), num(m.delta2), num(m.delta3));
      } else {
        csv += ",,,,,,";
      }
      csv += fmt::format("{},{}\n", opt(b.abs_rel_ratio), opt(b.uncertainty_ratio));
    }
    if (a.per_bin_csv.empty()) {
      out << csv;
    } else {
      io::detail::write_file(a.per_bin_csv, csv);
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// gradcheck

struct GradcheckArgs {
  std::size_t seeds = 20;
  std::uint64_t first_seed = 0;
  int size = 8;
  GradCheckOptions opts;
  double tolerance = 1e-5;
};

inline int run_gradcheck(const GradcheckArgs& a, const Globals& g, std::ostream& out) {
  const std::uint64_t first = g.seed(a.first_seed);
  out << fmt::format("{:<12} {:>20} {:>8} {:>8} {:>14} {}\n", "loss", "seed", "checked",
                     "skipped", "max_rel_error", "status");
  bool ok = true;
  for (std::size_t s = 0; s < a.seeds; ++s) {
    for (const auto& c : run_gradcheck_suite(first + s, a.size, a.opts)) {
      const bool pass = c.report.max_rel_error < a.tolerance && c.report.checked > 0;
      ok = ok && pass;
      out << fmt::format("{:<12} {:>20} {:>8} {:>8} {:>14} {}\n", c.loss, first + s,
                         c.report.checked, c.report.skipped, num(c.report.max_rel_error),
                         pass ? "ok" : "FAIL");
    }
  }
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// augment

struct AugmentArgs {
  std::string spec, rig, out_dir, interp = "bilinear";
  std::vector<std::string> in, in_nearest;
  std::uint64_t seed = 0;
  AugmentPolicy policy;
};

inline int run_augment(const AugmentArgs& a, const Globals& g, std::ostream& out) {
  const CameraRig rig = io::read_rig(a.rig);
  const AugmentSpec spec = a.spec.empty()
                               ? sample_augmentation(g.seed(a.seed), rig.image_height,
                                                     rig.image_width, a.policy)
                               : io::augment_from_json(io::read_json(a.spec));
  require(spec.source_height == rig.image_height && spec.source_width == rig.image_width,
          ErrorCode::kShapeMismatch, "augment: spec source size does not match the rig");
  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  const AugmentSpec source = AugmentSpec::identity(rig.image_height, rig.image_width);
  auto warp = [&](const std::string& path, Interpolation interp) {
    const MaskedMap m = io::read_pfm(path);
    require(m.rows() == rig.image_height && m.cols() == rig.image_width,
            ErrorCode::kShapeMismatch, "augment: input map does not match the rig size");
    io::write_pfm(dir / fs::path(path).filename(), warp_map(m, source, spec, interp));
  };
  const Interpolation interp =
      a.interp == "nearest" ? Interpolation::kNearest : Interpolation::kBilinear;
  for (const auto& p : a.in) warp(p, interp);
  for (const auto& p : a.in_nearest) warp(p, Interpolation::kNearest);
  io::write_json(dir / "rig.json", io::rig_to_json(transform_rig(rig, spec)));
  io::write_json(dir / "augment.json", io::augment_to_json(spec));
  out << io::augment_to_json(spec).dump() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// sensitivity

struct SensitivityArgs {
  std::string rig, gt, scene, levels = "0,0.5,1,2";
  std::size_t trials = 64;
  std::uint64_t seed = 0;
  CanonicalConfig cfg;
};

inline int run_sensitivity(const SensitivityArgs& a, const Globals& g, std::ostream& out) {
  const CameraRig rig = io::read_rig(a.rig);
  a.cfg.validate();
  DepthMap gt = !a.gt.empty() ? io::read_depth(a.gt)
                              : render_depth(a.scene.empty()
                                                 ? random_scene(g.seed(a.seed))
                                                 : io::scene_from_json(io::read_json(a.scene)),
                                             rig, {.threads = g.threads})
                                    .depth;
  require(gt.rows() == rig.image_height && gt.cols() == rig.image_width,
          ErrorCode::kShapeMismatch, "sensitivity: depth map does not match the rig size");
  SensitivityOptions opts;
  opts.levels = parse_list(a.levels);
  opts.trials = a.trials;
  opts.seed = g.seed(a.seed);
  const auto rows = calibration_sensitivity(gt, rig, a.cfg, opts);
  out << "level,sigma_height_cm,sigma_pitch_deg,abs_rel_pct\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{}\n", num(r.level), num(100.0 * r.sigma_height),
                       num(rad_to_deg(r.sigma_pitch)), num(100.0 * r.mean_abs_rel));
  }
  return 0;
}

}  // namespace detail

/// Returns the process exit code: 0 on success, 1 on a runtime failure
/// (machine-readable JSON on `err`), 2 on a usage error.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
                   const Environment& env = {}) {
  using namespace detail;
  CLI::App app{"Camera-geometry depth toolkit", "gvgeom"};
  app.require_subcommand(1);
  Globals g;
  g.env = env;
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)")
      ->capture_default_str();

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Render depth, road mask and instances for a scene");
  c_synth->add_option("--rig", synth.rig, "Rig JSON")->required()->check(CLI::ExistingFile);
  c_synth->add_option("--scene", synth.scene, "Scene JSON (random scene when omitted)")
      ->check(CLI::ExistingFile);
  c_synth->add_option("--out-dir", synth.out_dir, "Output directory")->required();
  c_synth->add_option("--frames", synth.frames,
                      "Write a noisy calibration sequence of this many random frames");
  c_synth->add_option("--noise-sigma", synth.noise_sigma, "Depth noise for --frames (m)")
      ->capture_default_str();
  c_synth->add_option("--outlier-fraction", synth.outlier_fraction,
                      "Off-road clutter fraction for --frames")
      ->capture_default_str();
  c_synth->add_option("--seed", synth.seed)->capture_default_str();

  CalibrateArgs cal;
  auto* c_cal = app.add_subcommand("calibrate", "Estimate camera height and pitch from road depth");
  c_cal->add_option("--rig", cal.rig, "Rig JSON (intrinsics are used)")
      ->required()
      ->check(CLI::ExistingFile);
  c_cal->add_option("--frames-dir", cal.frames_dir, "Directory of *_depth.pfm / *_road.pfm")
      ->check(CLI::ExistingDirectory);
  c_cal->add_option("--depth", cal.depth, "Depth map (repeatable)")->check(CLI::ExistingFile);
  c_cal->add_option("--road", cal.road, "Road mask (repeatable)")->check(CLI::ExistingFile);
  c_cal->add_option("--out", cal.out, "Report JSON path (stdout when omitted)");
  c_cal->add_option("--max-depth", cal.max_depth, "Road points beyond this are dropped (m)")
      ->capture_default_str();
  c_cal->add_option("--iterations", cal.iterations)->capture_default_str();
  c_cal->add_option("--threshold", cal.threshold, "Inlier distance (m)")->capture_default_str();
  c_cal->add_option("--min-inlier-ratio", cal.min_inlier_ratio)->capture_default_str();
  c_cal->add_option("--histogram-bins", cal.histogram_bins,
                    "Add per-frame estimate histograms to the report");
  c_cal->add_option("--seed", cal.seed)->capture_default_str();

  TransformArgs tr;
  auto* c_tr = app.add_subcommand("transform", "Convert between metric depth and canonical maps");
  c_tr->add_option("--mode", tr.mode)->required()->check(CLI::IsMember({"fct", "vct"}));
  c_tr->add_option("--direction", tr.direction,
                   "'from' encodes depth, 'to' decodes to depth")
      ->required()
      ->check(CLI::IsMember({"to", "from"}));
  c_tr->add_option("--in", tr.in)->required()->check(CLI::ExistingFile);
  c_tr->add_option("--out", tr.out)->required();
  c_tr->add_option("--rig", tr.rig)->required()->check(CLI::ExistingFile);
  c_tr->add_flag("--allow-rig-mismatch", tr.allow_rig_mismatch,
                 "Decode a vertical map with a rig other than the encoding rig");
  add_canonical_flags(c_tr, tr.cfg);

  FuseArgs fu;
  auto* c_fu = app.add_subcommand("fuse", "Uncertainty-weighted fusion of two depth cues");
  c_fu->add_option("--depth-focal", fu.depth_focal)->required()->check(CLI::ExistingFile);
  c_fu->add_option("--depth-vertical", fu.depth_vertical)->required()->check(CLI::ExistingFile);
  c_fu->add_option("--sigma-focal", fu.sigma_focal)->required()->check(CLI::ExistingFile);
  c_fu->add_option("--sigma-vertical", fu.sigma_vertical)->required()->check(CLI::ExistingFile);
  c_fu->add_option("--out", fu.out)->required();
  c_fu->add_flag("--log-sigma", fu.log_sigma, "Inputs hold log-uncertainties");

  EvalArgs ev;
  auto* c_ev = app.add_subcommand("eval", "Depth metrics as CSV (A.Rel in percent)");
  c_ev->add_option("--pred", ev.pred, "Prediction (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  c_ev->add_option("--gt", ev.gt, "Ground truth (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  c_ev->add_option("--split", ev.split, "Name for the CSV row")->capture_default_str();
  c_ev->add_option("--min-depth", ev.min_depth)->capture_default_str();
  c_ev->add_option("--max-depth", ev.max_depth)->capture_default_str();
  c_ev->add_flag("--per-image", ev.per_image, "Average per-image metrics instead of pooling");
  c_ev->add_flag("!--no-header", ev.header, "Omit the CSV header line");
  c_ev->add_option("--bins", ev.bins, "Comma-separated depth bin edges (m)");
  c_ev->add_option("--per-bin-csv", ev.per_bin_csv, "Write the per-bin table here");
  c_ev->add_option("--pred-vertical", ev.pred_vertical)->check(CLI::ExistingFile);
  c_ev->add_option("--pred-focal", ev.pred_focal)->check(CLI::ExistingFile);
  c_ev->add_option("--sigma-vertical", ev.sigma_vertical)->check(CLI::ExistingFile);
  c_ev->add_option("--sigma-focal", ev.sigma_focal)->check(CLI::ExistingFile);

  GradcheckArgs gc;
  auto* c_gc = app.add_subcommand("gradcheck", "Finite-difference checks of every loss gradient");
  c_gc->add_option("--seeds", gc.seeds)->capture_default_str();
  c_gc->add_option("--seed", gc.first_seed, "First seed")->capture_default_str();
  c_gc->add_option("--size", gc.size, "Input side length")->capture_default_str();
  c_gc->add_option("--eps", gc.opts.eps, "Central-difference step")->capture_default_str();
  c_gc->add_option("--samples", gc.opts.samples, "Coordinates per input")
      ->capture_default_str();
  c_gc->add_option("--tolerance", gc.tolerance)->capture_default_str();

  AugmentArgs au;
  auto* c_au = app.add_subcommand("augment", "Crop/resize maps and update the rig");
  c_au->add_option("--rig", au.rig)->required()->check(CLI::ExistingFile);
  c_au->add_option("--spec", au.spec, "Augmentation JSON (sampled from --seed when omitted)")
      ->check(CLI::ExistingFile);
  c_au->add_option("--in", au.in, "Map to warp (repeatable)")->check(CLI::ExistingFile);
  c_au->add_option("--in-nearest", au.in_nearest,
                   "Map to warp with nearest-neighbour sampling (repeatable)")
      ->check(CLI::ExistingFile);
  c_au->add_option("--interp", au.interp)
      ->check(CLI::IsMember({"bilinear", "nearest"}))
      ->capture_default_str();
  c_au->add_option("--out-dir", au.out_dir)->required();
  c_au->add_option("--seed", au.seed)->capture_default_str();
  c_au->add_option("--min-out-height", au.policy.min_out_height)->capture_default_str();
  c_au->add_option("--max-out-height", au.policy.max_out_height)->capture_default_str();

  SensitivityArgs se;
  auto* c_se = app.add_subcommand("sensitivity",
                                  "A.Rel of vertical decoding under noisy height and pitch");
  c_se->add_option("--rig", se.rig)->required()->check(CLI::ExistingFile);
  c_se->add_option("--gt", se.gt, "Ground-truth depth (rendered from --scene when omitted)")
      ->check(CLI::ExistingFile);
  c_se->add_option("--scene", se.scene)->check(CLI::ExistingFile);
  c_se->add_option("--levels", se.levels, "Noise multipliers (1 = 1 cm and 0.1 deg)")
      ->capture_default_str();
  c_se->add_option("--trials", se.trials)->capture_default_str();
  c_se->add_option("--seed", se.seed)->capture_default_str();
  add_canonical_flags(c_se, se.cfg);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    print_error(err, "usage", e.what());
    return 2;
  }

  try {
    if (*c_synth) return run_synth(synth, g, out);
    if (*c_cal) return run_calibrate(cal, g, out);
    if (*c_tr) return run_transform(tr, out);
    if (*c_fu) return run_fuse(fu, out);
    if (*c_ev) return run_eval(ev, out);
    if (*c_gc) return run_gradcheck(gc, g, out);
    if (*c_au) return run_augment(au, g, out);
    if (*c_se) return run_sensitivity(se, g, out);
  } catch (const Error& e) {
    print_error(err, std::string(to_string(e.code())), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error(err, "internal", e.what());
    return 1;
  }
  return 2;
}

}  // namespace gvgeom::cli
