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

// Axis-aligned box algebra in frame pixel coordinates.
//
// Boxes are (left, top, width, height) with a top-left origin and y growing
// downward. All functions here are pure.

#include <algorithm>
#include <cmath>
#include <span>
#include <tuple>
#include <vector>

#include "aerialdet/error.hpp"

namespace aerialdet {

struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double right() const noexcept { return x + w; }
  double bottom() const noexcept { return y + h; }
  double center_x() const noexcept { return x + 0.5 * w; }
  double center_y() const noexcept { return y + 0.5 * h; }

  bool valid() const noexcept {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) && std::isfinite(h) &&
           w > 0.0 && h > 0.0;
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

struct FrameDims {
  int width = 0;
  int height = 0;

  bool valid() const noexcept { return width >= 1 && height >= 1; }
  BBox rect() const noexcept { return {0.0, 0.0, double(width), double(height)}; }

  friend bool operator==(const FrameDims&, const FrameDims&) = default;
};

inline constexpr int kPedestrianClass = 0;

/// A detector output: box, confidence in [0,1] and class.
struct Detection {
  BBox bbox;
  double confidence = 0.0;
  int class_id = kPedestrianClass;

  bool valid() const noexcept { return bbox.valid() && confidence >= 0.0 && confidence <= 1.0; }

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// Integer-aligned square sub-rectangle of the frame, resized to
/// `input_size` x `input_size` before inference.
struct Crop {
  int x = 0;
  int y = 0;
  int side = 0;
  int input_size = 416;

  BBox rect() const noexcept { return {double(x), double(y), double(side), double(side)}; }
  double scale() const noexcept { return double(input_size) / double(side); }

  friend bool operator==(const Crop&, const Crop&) = default;
};

inline double area(const BBox& b) noexcept { return b.w * b.h; }

namespace detail {

inline double overlap_1d(double a0, double a1, double b0, double b1) noexcept {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

inline double intersection_area(const BBox& a, const BBox& b) noexcept {
  return overlap_1d(a.x, a.right(), b.x, b.right()) * overlap_1d(a.y, a.bottom(), b.y, b.bottom());
}

}  // namespace detail

inline double iou(const BBox& a, const BBox& b) noexcept {
  const double inter = detail::intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = area(a) + area(b) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

/// Chebyshev gap: the larger of the two per-axis separations, each clamped
/// at zero where the projections overlap.
inline double gap(const BBox& a, const BBox& b) noexcept {
  const double dx = std::max({0.0, b.x - a.right(), a.x - b.right()});
  const double dy = std::max({0.0, b.y - a.bottom(), a.y - b.bottom()});
  return std::max(dx, dy);
}

/// True when `inner` lies inside `outer` (boundaries inclusive).
inline bool contains(const BBox& outer, const BBox& inner, double tol = 0.0) noexcept {
  return inner.x >= outer.x - tol && inner.y >= outer.y - tol &&
         inner.right() <= outer.right() + tol && inner.bottom() <= outer.bottom() + tol;
}

inline BBox union_rect(std::span<const BBox> boxes) {
  if (boxes.empty()) throw DataError("empty cluster");
  double x0 = boxes.front().x, y0 = boxes.front().y;
  double x1 = boxes.front().right(), y1 = boxes.front().bottom();
  for (const auto& b : boxes.subspan(1)) {
    x0 = std::min(x0, b.x);
    y0 = std::min(y0, b.y);
    x1 = std::max(x1, b.right());
    y1 = std::max(y1, b.bottom());
  }
  return {x0, y0, x1 - x0, y1 - y0};
}

/// Grows a box by `margin` on every side.
inline BBox inflate(const BBox& b, double margin) noexcept {
  return {b.x - margin, b.y - margin, b.w + 2.0 * margin, b.h + 2.0 * margin};
}

/// Intersection of `b` with `bounds`; width/height are zero when disjoint.
inline BBox clip(const BBox& b, const BBox& bounds) noexcept {
  const double x0 = std::max(b.x, bounds.x);
  const double y0 = std::max(b.y, bounds.y);
  const double x1 = std::min(b.right(), bounds.right());
  const double y1 = std::min(b.bottom(), bounds.bottom());
  return {x0, y0, std::max(0.0, x1 - x0), std::max(0.0, y1 - y0)};
}

/// Scale from a frame region to a square detector input. Square regions map
/// one-to-one; rectangular ones (the full frame) are letterboxed on the long
/// side.
inline double input_scale(const BBox& region, int input_size) noexcept {
  return double(input_size) / std::max(region.w, region.h);
}

inline BBox region_to_input(const BBox& box, const BBox& region, int input_size) noexcept {
  const double s = input_scale(region, input_size);
  return {(box.x - region.x) * s, (box.y - region.y) * s, box.w * s, box.h * s};
}

inline BBox input_to_region(const BBox& box, const BBox& region, int input_size) noexcept {
  const double s = input_scale(region, input_size);
  return {box.x / s + region.x, box.y / s + region.y, box.w / s, box.h / s};
}

inline BBox to_input_coords(const BBox& box, const Crop& crop) noexcept {
  return region_to_input(box, crop.rect(), crop.input_size);
}

inline BBox to_frame_coords(const BBox& box, const Crop& crop) noexcept {
  return input_to_region(box, crop.rect(), crop.input_size);
}

/// Total order used wherever detections must be ranked reproducibly:
/// confidence descending, then smaller x, then smaller y.
inline bool ranks_before(const Detection& a, const Detection& b) noexcept {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  if (a.bbox.x != b.bbox.x) return a.bbox.x < b.bbox.x;
  if (a.bbox.y != b.bbox.y) return a.bbox.y < b.bbox.y;
  return std::tie(a.bbox.w, a.bbox.h, a.class_id) < std::tie(b.bbox.w, b.bbox.h, b.class_id);
}

/// Greedy non-maximum suppression. A detection survives iff its IoU with
/// every already-kept detection is below `iou_threshold`. Output is ranked.
inline std::vector<Detection> nms(std::vector<Detection> dets, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0))
    throw DataError("nms: iou_threshold must be in (0, 1]");
  std::sort(dets.begin(), dets.end(), ranks_before);
  std::vector<Detection> kept;
  kept.reserve(dets.size());
  for (const auto& d : dets) {
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
      return iou(d.bbox, k.bbox) >= iou_threshold;
    });
    if (!suppressed) kept.push_back(d);
  }
  return kept;
}

}  // namespace aerialdet
