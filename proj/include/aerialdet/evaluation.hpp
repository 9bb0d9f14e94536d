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

// Detection scoring: greedy per-frame matching, all-point interpolated
// average precision and frame-rate statistics.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "aerialdet/error.hpp"
#include "aerialdet/geometry.hpp"

namespace aerialdet {

struct EvalConfig {
  double iou_match_threshold = 0.5;

  void validate() const {
    if (!(iou_match_threshold > 0.0 && iou_match_threshold <= 1.0))
      throw DataError("iou match threshold must be in (0, 1]");
  }
};

struct FrameMatch {
  std::vector<bool> is_tp;  ///< aligned with the input detection order
  int unmatched_gt = 0;
};

/// Detections are visited in rank order; each claims the still-unmatched
/// ground-truth box of highest IoU when that IoU reaches the threshold.
inline FrameMatch match_frame(std::span<const Detection> dets, std::span<const BBox> gts,
                              double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0))
    throw DataError("iou match threshold must be in (0, 1]");
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ranks_before(dets[a], dets[b]); });

  FrameMatch m{std::vector<bool>(dets.size(), false), int(gts.size())};
  std::vector<bool> taken(gts.size(), false);
  for (auto i : order) {
    double best = -1.0;
    std::size_t best_j = gts.size();
    for (std::size_t j = 0; j < gts.size(); ++j) {
      if (taken[j]) continue;
      const double v = iou(dets[i].bbox, gts[j]);
      if (v > best) {
        best = v;
        best_j = j;
      }
    }
    if (best_j < gts.size() && best >= iou_threshold) {
      taken[best_j] = true;
      m.is_tp[i] = true;
      --m.unmatched_gt;
    }
  }
  return m;
}

using DetectionsByFrame = std::map<int, std::vector<Detection>>;
using TruthByFrame = std::map<int, std::vector<BBox>>;

struct FpsSummary {
  double mean_fps = 0.0;
  double p5_fps = 0.0;
};

/// mean_fps is total frames over total time; p5_fps is the reciprocal of the
/// nearest-rank 95th-percentile latency.
inline FpsSummary fps_summary(std::span<const double> latencies) {
  if (latencies.empty()) throw DataError("fps summary of an empty latency list");
  for (double l : latencies)
    if (!(l > 0.0)) throw DataError("latencies must be positive");
  const double total = std::accumulate(latencies.begin(), latencies.end(), 0.0);
  std::vector<double> sorted(latencies.begin(), latencies.end());
  std::sort(sorted.begin(), sorted.end());
  const auto rank = std::size_t(std::ceil(0.95 * double(sorted.size())));
  return {double(sorted.size()) / total, 1.0 / sorted[std::max<std::size_t>(rank, 1) - 1]};
}

struct EvalReport {
  double ap = 0.0;
  std::vector<double> precision;  ///< one point per distinct confidence, descending threshold
  std::vector<double> recall;
  std::vector<double> thresholds;
  int true_positives = 0;
  int false_positives = 0;
  int false_negatives = 0;
  double mean_fps = 0.0;
  double p5_fps = 0.0;
};

/// Area under the precision envelope for a recall-ordered curve.
inline double all_point_ap(std::span<const double> recall, std::span<const double> precision) {
  std::vector<double> envelope(precision.begin(), precision.end());
  for (std::size_t i = envelope.size(); i-- > 1;) envelope[i - 1] = std::max(envelope[i - 1], envelope[i]);
  double ap = 0.0, prev_recall = 0.0;
  for (std::size_t i = 0; i < recall.size(); ++i) {
    ap += (recall[i] - prev_recall) * envelope[i];
    prev_recall = recall[i];
  }
  return ap;
}

/// Pools all frames, ranks detections by confidence and traces the PR curve.
/// Detections sharing a confidence value enter the curve together, so the
/// result depends only on the confidence ordering.
inline EvalReport evaluate(const DetectionsByFrame& dets, const TruthByFrame& truth,
                           const EvalConfig& cfg = {}) {
  cfg.validate();
  int total_gt = 0;
  for (const auto& [f, g] : truth) total_gt += int(g.size());
  if (total_gt == 0) throw DataError("undefined recall: no ground truth");

  struct Scored {
    double confidence;
    int frame;
    double x, y;
    bool tp;
  };
  std::vector<Scored> pooled;
  EvalReport report;
  report.false_negatives = total_gt;
  static const std::vector<BBox> kNoTruth;
  for (const auto& [frame, list] : dets) {
    auto it = truth.find(frame);
    const auto& gts = it == truth.end() ? kNoTruth : it->second;
    const FrameMatch m = match_frame(list, gts, cfg.iou_match_threshold);
    for (std::size_t i = 0; i < list.size(); ++i)
      pooled.push_back({list[i].confidence, frame, list[i].bbox.x, list[i].bbox.y, m.is_tp[i]});
    report.false_negatives -= int(gts.size()) - m.unmatched_gt;
  }
  std::sort(pooled.begin(), pooled.end(), [](const Scored& a, const Scored& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return std::tie(a.frame, a.x, a.y) < std::tie(b.frame, b.x, b.y);
  });

  int tp = 0, fp = 0;
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    (pooled[i].tp ? tp : fp) += 1;
    const bool group_end = i + 1 == pooled.size() || pooled[i + 1].confidence != pooled[i].confidence;
    if (!group_end) continue;
    report.recall.push_back(double(tp) / total_gt);
    report.precision.push_back(double(tp) / (tp + fp));
    report.thresholds.push_back(pooled[i].confidence);
  }
  report.true_positives = tp;
  report.false_positives = fp;
  report.ap = all_point_ap(report.recall, report.precision);
  return report;
}

inline double average_precision(const DetectionsByFrame& dets, const TruthByFrame& truth,
                                 const EvalConfig& cfg = {}) {
  return evaluate(dets, truth, cfg).ap;
}

}  // namespace aerialdet
