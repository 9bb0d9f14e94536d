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

// Per-frame choice between full-frame refresh, crop inference and the
// degraded fast mode, driven by an EWMA frame-rate monitor.

#include <variant>
#include <vector>

#include "aerialdet/error.hpp"
#include "aerialdet/geometry.hpp"
#include "aerialdet/proposer.hpp"

namespace aerialdet {

struct SchedulerConfig {
  int refresh_period = 5;  ///< full-frame pass every N frames
  double fps_target = 5.0;
  int base_input_size = 416;
  int crop_input_size = 416;
  double ewma_alpha = 0.3;
  double hysteresis = 0.5;  ///< fast mode exits at fps_target + hysteresis
  int warmup_samples = 3;   ///< monitor samples before fast mode may engage

  void validate() const {
    if (refresh_period < 1) throw DataError("scheduler.refresh_period must be >= 1");
    if (!(fps_target > 0.0)) throw DataError("scheduler.fps_target must be > 0");
    if (base_input_size <= 0 || crop_input_size <= 0)
      throw DataError("scheduler input sizes must be > 0");
    if (!(ewma_alpha > 0.0 && ewma_alpha <= 1.0))
      throw DataError("scheduler.ewma_alpha must be in (0, 1]");
    if (!(hysteresis >= 0.0)) throw DataError("scheduler.hysteresis must be >= 0");
    if (warmup_samples < 1) throw DataError("scheduler.warmup_samples must be >= 1");
  }

  friend bool operator==(const SchedulerConfig&, const SchedulerConfig&) = default;
};

/// Exponentially weighted moving average of frame latency.
struct FpsMonitor {
  double ewma_latency = 0.0;  ///< seconds
  int samples = 0;

  friend bool operator==(const FpsMonitor&, const FpsMonitor&) = default;
};

inline FpsMonitor record_latency(const FpsMonitor& monitor, double frame_latency, double alpha) {
  if (!(frame_latency > 0.0)) throw DataError("frame latency must be positive");
  if (monitor.samples == 0) return {frame_latency, 1};
  return {alpha * frame_latency + (1.0 - alpha) * monitor.ewma_latency, monitor.samples + 1};
}

inline double estimated_fps(const FpsMonitor& monitor) {
  if (monitor.samples < 1) throw DataError("unwarmed monitor");
  return 1.0 / monitor.ewma_latency;
}

struct FullFramePlan {
  int input_size = 416;
  friend bool operator==(const FullFramePlan&, const FullFramePlan&) = default;
};
struct CropSetPlan {
  std::vector<Crop> crops;  ///< never empty
  friend bool operator==(const CropSetPlan&, const CropSetPlan&) = default;
};
struct FastFullPlan {
  int input_size = 416;
  friend bool operator==(const FastFullPlan&, const FastFullPlan&) = default;
};

using Plan = std::variant<FullFramePlan, CropSetPlan, FastFullPlan>;

enum class PlanKind { FullFrame, CropSet, FastFull };

inline PlanKind plan_kind(const Plan& p) noexcept { return PlanKind(p.index()); }

enum class Mode { Normal, Fast };

struct PlanDecision {
  Plan plan;
  Mode mode;
};

/// Pure planning step; the mode is threaded through explicitly.
inline PlanDecision plan(int frame_idx, const CropProposal& crops, const FpsMonitor& monitor,
                         const SchedulerConfig& cfg, Mode mode) {
  if (frame_idx < 0) throw DataError("frame index must be >= 0");
  if (monitor.samples >= cfg.warmup_samples) {
    const double fps = estimated_fps(monitor);
    if (mode == Mode::Normal && fps < cfg.fps_target)
      mode = Mode::Fast;
    else if (mode == Mode::Fast && fps >= cfg.fps_target + cfg.hysteresis)
      mode = Mode::Normal;
  }
  if (mode == Mode::Fast) return {FastFullPlan{cfg.base_input_size}, mode};

  const auto* list = std::get_if<std::vector<Crop>>(&crops);
  if (frame_idx % cfg.refresh_period == 0 || list == nullptr || list->empty())
    return {FullFramePlan{cfg.base_input_size}, mode};
  return {CropSetPlan{*list}, mode};
}

}  // namespace aerialdet
