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

// Crop proposal: cluster the previous frame's accepted boxes and cover each
// cluster with an integer-aligned square crop.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <variant>
#include <vector>

#include "aerialdet/error.hpp"
#include "aerialdet/geometry.hpp"

namespace aerialdet {

struct ProposerConfig {
  double merge_gap = 32.0;  ///< boxes within this Chebyshev gap share a crop
  double margin = 16.0;     ///< context padding added on every side
  int min_crop_side = 128;
  int max_crops = 8;  ///< more crops than this -> fall back to full frame

  void validate() const {
    if (!(merge_gap >= 0.0)) throw DataError("proposer.merge_gap must be >= 0");
    if (!(margin >= 0.0)) throw DataError("proposer.margin must be >= 0");
    if (min_crop_side < 32) throw DataError("proposer.min_crop_side must be >= 32");
    if (max_crops < 1) throw DataError("proposer.max_crops must be >= 1");
  }

  friend bool operator==(const ProposerConfig&, const ProposerConfig&) = default;
};

/// Signals that the scene needs more crops than the budget allows.
struct FallbackFullFrame {
  friend bool operator==(const FallbackFullFrame&, const FallbackFullFrame&) = default;
};

using CropProposal = std::variant<std::vector<Crop>, FallbackFullFrame>;

/// Single-link clustering under gap(a, b) <= merge_gap. Clusters are ordered
/// by their smallest member (x, then y); members keep input order.
inline std::vector<std::vector<BBox>> cluster_boxes(std::span<const BBox> boxes, double merge_gap) {
  if (!(merge_gap >= 0.0)) throw DataError("merge_gap must be >= 0");
  const std::size_t n = boxes.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (gap(boxes[i], boxes[j]) <= merge_gap) {
        const auto ri = find(i), rj = find(j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }

  std::vector<std::vector<std::size_t>> members(n);
  for (std::size_t i = 0; i < n; ++i) members[find(i)].push_back(i);

  auto min_key = [&](const std::vector<std::size_t>& m) {
    auto best = std::min_element(m.begin(), m.end(), [&](std::size_t a, std::size_t b) {
      return std::tie(boxes[a].x, boxes[a].y, a) < std::tie(boxes[b].x, boxes[b].y, b);
    });
    return std::tuple(boxes[*best].x, boxes[*best].y, *best);
  };
  std::erase_if(members, [](const auto& m) { return m.empty(); });
  std::sort(members.begin(), members.end(),
            [&](const auto& a, const auto& b) { return min_key(a) < min_key(b); });

  std::vector<std::vector<BBox>> clusters;
  clusters.reserve(members.size());
  for (const auto& m : members) {
    auto& c = clusters.emplace_back();
    c.reserve(m.size());
    for (auto i : m) c.push_back(boxes[i]);
  }
  return clusters;
}

namespace detail {

// Start positions of `side`-long windows covering [lo, hi) inside [0, limit).
// When the range is longer than `side` it is tiled, and neighbouring windows
// overlap by at least `overlap` so that any sub-interval of that length lies
// wholly inside one window. Requires overlap < side.
inline std::vector<int> window_starts(int lo, int hi, int side, int limit, int overlap) {
  const int extent = hi - lo;
  if (extent <= side) {
    const int start = lo - (side - extent) / 2;
    return {std::clamp(start, 0, limit - side)};
  }
  const int stride = side - overlap;
  const int count = (extent - side + stride - 1) / stride + 1;
  std::vector<int> starts;
  starts.reserve(count);
  for (int k = 0; k < count; ++k) {
    const int start = lo + int(std::llround(double(extent - side) * k / (count - 1)));
    starts.push_back(std::clamp(start, 0, limit - side));
  }
  return starts;
}

// Integer hull of a box padded by `margin` and clipped to `frame`.
struct IntRect {
  int x0, y0, x1, y1;
};

inline std::optional<IntRect> padded_hull(const BBox& b, double margin, const BBox& frame) {
  const BBox p = clip(inflate(b, margin), frame);
  if (p.w <= 0.0 || p.h <= 0.0) return std::nullopt;
  return IntRect{int(std::floor(p.x)), int(std::floor(p.y)), int(std::ceil(p.right())),
                 int(std::ceil(p.bottom()))};
}

}  // namespace detail

/// Builds square crops around clusters of previous detections.
///
/// Each cluster's enclosing rectangle is padded by `margin`, clipped to the
/// frame and snapped outward to integers. The crop side is the larger extent,
/// floored at `min_crop_side` and capped at the frame's smaller dimension;
/// the square is centred on the padded rectangle and translated (never
/// shrunk) to lie inside the frame. A cluster wider than the cap is tiled
/// with overlapping squares.
/// Crops contained in another crop are dropped.
inline CropProposal propose_crops(std::span<const Detection> prev_accepted, const FrameDims& dims,
                                  const ProposerConfig& cfg, int input_size = 416) {
  if (!dims.valid()) throw DataError("frame dims must be positive");
  if (input_size <= 0) throw DataError("crop input size must be positive");
  std::vector<BBox> boxes;
  boxes.reserve(prev_accepted.size());
  for (const auto& d : prev_accepted) boxes.push_back(d.bbox);

  const int max_side = std::min(dims.width, dims.height);
  const int floor_side = std::min(cfg.min_crop_side, max_side);
  const BBox frame = dims.rect();

  std::vector<Crop> crops;
  for (const auto& cluster : cluster_boxes(boxes, cfg.merge_gap)) {
    const auto hull = detail::padded_hull(union_rect(cluster), cfg.margin, frame);
    if (!hull) continue;  // cluster entirely off-frame
    const auto [x0, y0, x1, y1] = *hull;
    const int side = std::min(std::max({x1 - x0, y1 - y0, floor_side}), max_side);
    // Tiles must overlap by the largest padded member so each member fits
    // in one tile; a member that no square crop can hold forces a fallback.
    int overlap_x = 0, overlap_y = 0;
    if (x1 - x0 > side || y1 - y0 > side)
      for (const auto& b : cluster)
        if (const auto m = detail::padded_hull(b, cfg.margin, frame)) {
          overlap_x = std::max(overlap_x, m->x1 - m->x0);
          overlap_y = std::max(overlap_y, m->y1 - m->y0);
        }
    if ((x1 - x0 > side && overlap_x >= side) || (y1 - y0 > side && overlap_y >= side))
      return FallbackFullFrame{};
    for (int cy : detail::window_starts(y0, y1, side, dims.height, overlap_y))
      for (int cx : detail::window_starts(x0, x1, side, dims.width, overlap_x))
        crops.push_back({cx, cy, side, input_size});
  }

  std::vector<Crop> kept;
  for (std::size_t i = 0; i < crops.size(); ++i) {
    bool redundant = false;
    for (std::size_t j = 0; j < crops.size() && !redundant; ++j) {
      if (i == j || !contains(crops[j].rect(), crops[i].rect())) continue;
      // Identical crops: keep the first occurrence only.
      redundant = crops[i] != crops[j] || j < i;
    }
    if (!redundant) kept.push_back(crops[i]);
  }

  if (int(kept.size()) > cfg.max_crops) return FallbackFullFrame{};
  return kept;
}

}  // namespace aerialdet
