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

// Two-threshold confidence gating with previous-frame rescue.

#include <algorithm>
#include <span>
#include <vector>

#include "aerialdet/error.hpp"
#include "aerialdet/geometry.hpp"

namespace aerialdet {

struct GateConfig {
  double tau_hi = 0.5;       ///< at or above: accepted outright
  double tau_lo = 0.2;       ///< below: rejected outright
  double tau_overlap = 0.3;  ///< IoU needed against a previous acceptance to rescue

  void validate() const {
    // tau_lo == tau_hi is allowed and disables the rescue band.
    if (!(0.0 <= tau_lo && tau_lo <= tau_hi && tau_hi <= 1.0))
      throw DataError("gate thresholds must satisfy 0 <= tau_lo <= tau_hi <= 1");
    if (!(tau_overlap > 0.0 && tau_overlap <= 1.0))
      throw DataError("gate.tau_overlap must be in (0, 1]");
  }

  friend bool operator==(const GateConfig&, const GateConfig&) = default;
};

/// The accepted detections of the most recent processed frame.
struct GateMemory {
  std::vector<Detection> prev_accepted;
  int frame_idx = -1;  ///< -1 before the first frame

  bool empty() const noexcept { return prev_accepted.empty(); }

  friend bool operator==(const GateMemory&, const GateMemory&) = default;
};

inline bool passes_gate(const Detection& d, const GateMemory& memory, const GateConfig& cfg) {
  if (d.confidence >= cfg.tau_hi) return true;
  if (d.confidence < cfg.tau_lo) return false;
  return std::any_of(memory.prev_accepted.begin(), memory.prev_accepted.end(),
                     [&](const Detection& m) { return iou(d.bbox, m.bbox) >= cfg.tau_overlap; });
}

/// Filters `dets` (order preserved). Low-confidence detections survive only
/// when they overlap something accepted on the previous frame.
inline std::vector<Detection> gate(std::span<const Detection> dets, const GateMemory& memory,
                                   const GateConfig& cfg) {
  std::vector<Detection> accepted;
  accepted.reserve(dets.size());
  std::copy_if(dets.begin(), dets.end(), std::back_inserter(accepted),
               [&](const Detection& d) { return passes_gate(d, memory, cfg); });
  return accepted;
}

/// Replaces the memory wholesale with this frame's accepted set.
inline GateMemory update_memory(const GateMemory& previous, std::vector<Detection> accepted,
                                int frame_idx) {
  if (frame_idx <= previous.frame_idx) throw DataError("frame order violation");
  return GateMemory{std::move(accepted), frame_idx};
}

}  // namespace aerialdet
