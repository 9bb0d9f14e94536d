// Copyright 2026 The aerialdet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Detector backends. A backend receives a frame region and the square input
// size it is resized to, and returns detections in that input's coordinates.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <memory>
#include <set>
#include <span>
#include <vector>

#include "aerialdet/error.hpp"
#include "aerialdet/geometry.hpp"
#include "aerialdet/rng.hpp"
#include "aerialdet/simulation.hpp"

namespace aerialdet {

struct DetectRequest {
  int frame_idx = 0;
  BBox region;  ///< frame space: the full frame or a crop rectangle
  int input_size = 416;
};

class DetectorBackend {
 public:
  virtual ~DetectorBackend() = default;

  /// Detections in region-input coordinates, NMS already applied.
  /// Throws DetectorError on failure.
  virtual std::vector<Detection> detect(const DetectRequest& request) = 0;

  /// Whether detect() may be called concurrently from several threads.
  virtual bool concurrent_safe() const noexcept { return false; }
};

/// Fraction of `target` covered by the union of `others`, computed exactly
/// with a sweep over x-slabs.
inline double occluded_fraction(const BBox& target, std::span<const BBox> others) {
  const double total = area(target);
  if (!(total > 0.0)) return 0.0;
  std::vector<BBox> parts;
  std::vector<double> xs{target.x, target.right()};
  for (const auto& o : others) {
    const BBox c = clip(o, target);
    if (c.w <= 0.0 || c.h <= 0.0) continue;
    parts.push_back(c);
    xs.push_back(c.x);
    xs.push_back(c.right());
  }
  if (parts.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  double covered = 0.0;
  std::vector<std::pair<double, double>> spans;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double x0 = xs[i], x1 = xs[i + 1];
    spans.clear();
    for (const auto& p : parts)
      if (p.x <= x0 && p.right() >= x1) spans.emplace_back(p.y, p.bottom());
    if (spans.empty()) continue;
    std::sort(spans.begin(), spans.end());
    double len = 0.0, lo = spans.front().first, hi = spans.front().second;
    for (const auto& [a, b] : spans) {
      if (a > hi) {
        len += hi - lo;
        lo = a;
      }
      hi = std::max(hi, b);
    }
    len += hi - lo;
    covered += (x1 - x0) * len;
  }
  return std::clamp(covered / total, 0.0, 1.0);
}

struct SimDetectorConfig {
  double s_min = 2.5;   ///< apparent height (input px) below which nothing is found
  double s_sat = 12.0;  ///< apparent height at which recall saturates
  double p_max = 0.95;
  double occlusion_penalty = 0.5;  ///< probability lost per unit occluded fraction
  double jitter_sigma = 0.03;      ///< localisation noise, fraction of box size
  double conf_base = 0.4;          ///< confidence of an object at s_min
  double conf_slope = 0.6;         ///< extra confidence gained by s_sat
  double conf_noise = 0.05;        ///< half-width of uniform confidence noise
  double fp_rate = 0.2;            ///< expected false positives per pass
  double fp_conf_max = 0.6;
  double min_visible = 0.5;  ///< visible fraction of an object needed inside the region
  double nms_iou = 0.45;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(s_min > 0.0 && s_min < s_sat)) throw DataError("detector: need 0 < s_min < s_sat");
    if (!(p_max > 0.0 && p_max <= 1.0)) throw DataError("detector.p_max must be in (0, 1]");
    if (!(occlusion_penalty >= 0.0)) throw DataError("detector.occlusion_penalty must be >= 0");
    if (!(jitter_sigma >= 0.0)) throw DataError("detector.jitter_sigma must be >= 0");
    if (!(conf_noise >= 0.0)) throw DataError("detector.conf_noise must be >= 0");
    if (!(fp_rate >= 0.0)) throw DataError("detector.fp_rate must be >= 0");
    if (!(fp_conf_max >= 0.0 && fp_conf_max <= 1.0))
      throw DataError("detector.fp_conf_max must be in [0, 1]");
    if (!(min_visible > 0.0 && min_visible <= 1.0))
      throw DataError("detector.min_visible must be in (0, 1]");
    if (!(nms_iou > 0.0 && nms_iou <= 1.0)) throw DataError("detector.nms_iou must be in (0, 1]");
  }

  friend bool operator==(const SimDetectorConfig&, const SimDetectorConfig&) = default;
};

/// Piecewise-linear recall in apparent height, reduced by occlusion.
inline double sim_detect_probability(double apparent_height, double occluded,
                                     const SimDetectorConfig& cfg) {
  double p;
  if (apparent_height < cfg.s_min)
    p = 0.0;
  else if (apparent_height < cfg.s_sat)
    p = cfg.p_max * (apparent_height - cfg.s_min) / (cfg.s_sat - cfg.s_min);
  else
    p = cfg.p_max;
  return std::max(0.0, p - cfg.occlusion_penalty * occluded);
}

namespace detail {

inline void check_request(const DetectRequest& r, const FrameDims& dims) {
  if (r.input_size <= 0) throw DetectorError(r.frame_idx, "input size must be positive");
  if (!r.region.valid() || !contains(dims.rect(), r.region, 1e-9))
    throw DetectorError(r.frame_idx, "region outside frame");
}

// Visible part of a frame-space box inside the region, or nullopt when too
// little of it is inside.
inline std::optional<BBox> visible_part(const BBox& box, const BBox& region, double min_visible) {
  const BBox vis = clip(box, region);
  if (vis.w <= 0.0 || vis.h <= 0.0 || area(vis) < min_visible * area(box)) return std::nullopt;
  return vis;
}

}  // namespace detail

/// Deterministic stand-in for a CNN detector. It reads scenario ground truth
/// and finds each object with a probability that grows with the object's
/// height after the region is resized to the detector input. Outcomes are
/// keyed by (seed, frame, track), so the same object gets the same draw in
/// every region that sees it.
class SimulatedDetector final : public DetectorBackend {
 public:
  SimulatedDetector(std::shared_ptr<const Scenario> scenario, SimDetectorConfig cfg)
      : scenario_(std::move(scenario)), cfg_(cfg) {
    if (!scenario_) throw DataError("simulated detector needs a scenario");
    cfg_.validate();
    per_frame_.resize(scenario_->num_frames);
    for (const auto& tr : scenario_->tracks)
      for (const auto& s : tr.samples) per_frame_[s.frame_idx].push_back({tr.track_id, s.box});
  }

  const SimDetectorConfig& config() const noexcept { return cfg_; }
  bool concurrent_safe() const noexcept override { return true; }

  std::vector<Detection> detect(const DetectRequest& request) override {
    return detect_const(request);
  }

  std::vector<Detection> detect_const(const DetectRequest& request) const {
    if (request.frame_idx < 0 || request.frame_idx >= scenario_->num_frames)
      throw DetectorError(request.frame_idx, "frame out of scenario range");
    detail::check_request(request, scenario_->dims);
    const BBox& region = request.region;
    const double scale = input_scale(region, request.input_size);
    const auto& truth = per_frame_[request.frame_idx];

    std::vector<BBox> boxes;
    boxes.reserve(truth.size());
    for (const auto& t : truth) boxes.push_back(t.box);

    std::vector<Detection> out;
    std::vector<BBox> others;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const auto vis = detail::visible_part(truth[i].box, region, cfg_.min_visible);
      if (!vis) continue;
      others.clear();
      for (std::size_t j = 0; j < truth.size(); ++j)
        if (j != i) others.push_back(boxes[j]);
      const double occ = occluded_fraction(truth[i].box, others);
      const double apparent = vis->h * scale;
      const double p = sim_detect_probability(apparent, occ, cfg_);

      const CounterRng rng(cfg_.seed, std::uint32_t(request.frame_idx),
                           std::uint32_t(truth[i].track_id), kObjectStream);
      if (rng.uniform(0) >= p) continue;

      const double size_term =
          std::clamp((apparent - cfg_.s_min) / (cfg_.s_sat - cfg_.s_min), 0.0, 1.0);
      const double conf = std::clamp(
          cfg_.conf_base + cfg_.conf_slope * size_term + rng.uniform(1, -cfg_.conf_noise, cfg_.conf_noise),
          0.0, 1.0);
      const double sg = cfg_.jitter_sigma;
      BBox jittered{vis->x + sg * vis->w * rng.normal(1), vis->y + sg * vis->h * rng.normal(2),
                    vis->w * std::exp(sg * rng.normal(3)), vis->h * std::exp(sg * rng.normal(4))};
      jittered = clip(jittered, region);
      if (!jittered.valid()) continue;
      out.push_back({region_to_input(jittered, region, request.input_size), conf, kPedestrianClass});
    }

    append_false_positives(request, scale, out);
    return nms(std::move(out), cfg_.nms_iou);
  }

 private:
  static constexpr std::uint32_t kObjectStream = 11;
  static constexpr std::uint32_t kFalsePositiveStream = 12;

  void append_false_positives(const DetectRequest& request, double scale,
                              std::vector<Detection>& out) const {
    if (cfg_.fp_rate <= 0.0) return;
    const BBox& r = request.region;
    const auto region_key = Philox4x32::generate(
        {std::uint32_t(std::lround(r.x)), std::uint32_t(std::lround(r.y)),
         std::uint32_t(std::lround(r.w)), std::uint32_t(std::lround(r.h))},
        {std::uint32_t(request.input_size), kFalsePositiveStream})[0];
    const CounterRng rng(cfg_.seed, std::uint32_t(request.frame_idx), region_key,
                         kFalsePositiveStream);
    const double extent_w = r.w * scale, extent_h = r.h * scale;
    const int n = rng.poisson(0, cfg_.fp_rate);
    for (int k = 0; k < n; ++k) {
      const std::uint32_t base = 1 + 4 * std::uint32_t(k);
      const double h = std::min(rng.uniform(base, cfg_.s_min, 2.0 * cfg_.s_sat), extent_h);
      const double w = std::min(0.4 * h, extent_w);
      const BBox box{rng.uniform(base + 1, 0.0, extent_w - w), rng.uniform(base + 2, 0.0, extent_h - h),
                     w, h};
      if (box.valid()) out.push_back({box, rng.uniform(base + 3, 0.0, cfg_.fp_conf_max), kPedestrianClass});
    }
  }

  std::shared_ptr<const Scenario> scenario_;
  SimDetectorConfig cfg_;
  std::vector<std::vector<LabeledBox>> per_frame_;
};

/// Replays fixed frame-space detections. Each scripted detection is reported
/// in any region that contains enough of it; frames listed in `failing` throw.
class ScriptedDetector final : public DetectorBackend {
 public:
  explicit ScriptedDetector(FrameDims dims, double min_visible = 0.5)
      : dims_(dims), min_visible_(min_visible) {}

  void add(int frame_idx, Detection d) { script_[frame_idx].push_back(d); }
  void fail_on(int frame_idx) { failing_.insert(frame_idx); }
  bool concurrent_safe() const noexcept override { return true; }

  std::vector<Detection> detect(const DetectRequest& request) override {
    detail::check_request(request, dims_);
    if (failing_.count(request.frame_idx)) throw DetectorError(request.frame_idx, "scripted failure");
    std::vector<Detection> out;
    auto it = script_.find(request.frame_idx);
    if (it == script_.end()) return out;
    for (const auto& d : it->second) {
      const auto vis = detail::visible_part(d.bbox, request.region, min_visible_);
      if (vis) out.push_back({region_to_input(*vis, request.region, request.input_size), d.confidence, d.class_id});
    }
    return out;
  }

 private:
  FrameDims dims_;
  double min_visible_;
  std::map<int, std::vector<Detection>> script_;
  std::set<int> failing_;
};

}  // namespace aerialdet
