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

// The per-frame loop: propose crops from the previous frame, plan, detect,
// merge across crops, gate against the previous frame, and account latency.

#include <chrono>
#include <cmath>
#include <functional>
#include <future>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aerialdet/detector.hpp"
#include "aerialdet/error.hpp"
#include "aerialdet/geometry.hpp"
#include "aerialdet/proposer.hpp"
#include "aerialdet/scheduler.hpp"
#include "aerialdet/temporal_gate.hpp"

namespace aerialdet {

/// Per-pass inference cost used when running against simulated detectors.
struct LatencyModel {
  double t_full_416 = 0.152;  ///< full-frame pass at 416 input, seconds
  double t_full_608 = 0.333;  ///< full-frame pass at 608 input, seconds
  double t_crop = 0.04;       ///< one crop pass
  double t_overhead = 0.01;   ///< per-frame fixed cost

  void validate() const {
    if (!(t_full_416 > 0.0 && t_full_608 > 0.0 && t_crop > 0.0 && t_overhead >= 0.0))
      throw DataError("latency model times must be positive");
  }

  /// Full-frame cost at an arbitrary input size: exact at 416 and 608, and a
  /// power law through those two points elsewhere.
  double full_frame(int input_size) const {
    if (input_size == 416) return t_full_416;
    if (input_size == 608) return t_full_608;
    const double k = std::log(t_full_608 / t_full_416) / std::log(608.0 / 416.0);
    return t_full_416 * std::pow(input_size / 416.0, k);
  }

  friend bool operator==(const LatencyModel&, const LatencyModel&) = default;
};

inline double synthetic_latency(const Plan& plan, const LatencyModel& model) {
  return std::visit(
      [&](const auto& p) -> double {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, CropSetPlan>)
          return double(p.crops.size()) * model.t_crop + model.t_overhead;
        else
          return model.full_frame(p.input_size) + model.t_overhead;
      },
      plan);
}

enum class RunMode { Pipeline, FullFrameOnly };
enum class LatencySource { Synthetic, WallClock };
enum class BackendKind { Simulated, External };

struct DetectorSettings {
  BackendKind backend = BackendKind::Simulated;
  std::string command;  ///< external backend command line
  SimDetectorConfig sim;

  friend bool operator==(const DetectorSettings&, const DetectorSettings&) = default;
};

struct PipelineConfig {
  ProposerConfig proposer;
  GateConfig gate;
  SchedulerConfig scheduler;
  double cross_crop_nms_iou = 0.5;
  RunMode mode = RunMode::Pipeline;
  bool parallel_crops = false;
  LatencySource latency_source = LatencySource::Synthetic;
  LatencyModel latency;
  DetectorSettings detector;

  void validate() const {
    proposer.validate();
    gate.validate();
    scheduler.validate();
    latency.validate();
    detector.sim.validate();
    if (!(cross_crop_nms_iou > 0.0 && cross_crop_nms_iou <= 1.0))
      throw DataError("pipeline.cross_crop_nms_iou must be in (0, 1]");
    if (detector.backend == BackendKind::External && detector.command.empty())
      throw DataError("external backend needs a command");
  }

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

struct FrameResult {
  int frame_idx = 0;
  PlanKind plan_kind = PlanKind::FullFrame;
  int num_crops = 0;
  std::vector<Detection> accepted;  ///< frame coordinates, clipped to the frame
  double latency = 0.0;             ///< seconds
  double estimated_fps = 0.0;
  std::optional<std::string> error;  ///< set when the detector failed and the frame was skipped

  friend bool operator==(const FrameResult&, const FrameResult&) = default;
};

struct PipelineState {
  GateMemory memory;
  FpsMonitor monitor;
  Mode mode = Mode::Normal;
  int last_frame = -1;

  friend bool operator==(const PipelineState&, const PipelineState&) = default;
};

/// Maps backend output for one region back to frame space and clips it.
inline std::vector<Detection> to_frame_space(std::vector<Detection> dets, const BBox& region,
                                             int input_size, const FrameDims& dims) {
  const BBox frame = dims.rect();
  std::vector<Detection> out;
  out.reserve(dets.size());
  for (auto& d : dets) {
    d.bbox = clip(input_to_region(d.bbox, region, input_size), frame);
    if (d.bbox.valid()) out.push_back(d);
  }
  return out;
}

/// Pools per-crop detections (already in frame space), puts them in the
/// canonical rank order and suppresses cross-crop duplicates. The result does
/// not depend on the order the crops were processed in.
inline std::vector<Detection> merge_crop_detections(
    const std::vector<std::vector<Detection>>& per_crop, double nms_iou) {
  std::vector<Detection> pooled;
  for (const auto& v : per_crop) pooled.insert(pooled.end(), v.begin(), v.end());
  return nms(std::move(pooled), nms_iou);
}

class Pipeline {
 public:
  using Logger = std::function<void(const std::string&)>;

  Pipeline(PipelineConfig cfg, FrameDims dims, std::shared_ptr<DetectorBackend> backend,
           Logger logger = {})
      : cfg_(std::move(cfg)), dims_(dims), backend_(std::move(backend)), log_(std::move(logger)) {
    cfg_.validate();
    if (!dims_.valid()) throw DataError("frame dims must be positive");
    if (!backend_) throw DataError("pipeline needs a detector backend");
  }

  const PipelineConfig& config() const noexcept { return cfg_; }
  const FrameDims& dims() const noexcept { return dims_; }

  std::pair<FrameResult, PipelineState> step(int frame_idx, PipelineState state) {
    if (frame_idx != state.last_frame + 1)
      throw DataError("frame " + std::to_string(frame_idx) + " does not follow frame " +
                      std::to_string(state.last_frame));
    const auto started = std::chrono::steady_clock::now();
    const auto& sched = cfg_.scheduler;

    PlanDecision decision{FullFramePlan{sched.base_input_size}, state.mode};
    if (cfg_.mode == RunMode::Pipeline) {
      CropProposal proposal = std::vector<Crop>{};
      if (frame_idx % sched.refresh_period != 0 && !state.memory.empty())
        proposal = propose_crops(state.memory.prev_accepted, dims_, cfg_.proposer,
                                 sched.crop_input_size);
      decision = plan(frame_idx, proposal, state.monitor, sched, state.mode);
    }

    FrameResult result;
    result.frame_idx = frame_idx;
    result.plan_kind = plan_kind(decision.plan);
    if (const auto* cs = std::get_if<CropSetPlan>(&decision.plan)) result.num_crops = int(cs->crops.size());

    try {
      auto detections = infer(frame_idx, decision.plan);
      result.accepted = gate(detections, state.memory, cfg_.gate);
      state.memory = update_memory(state.memory, result.accepted, frame_idx);
    } catch (const DetectorError& e) {
      result.accepted.clear();
      result.error = e.what();
      if (log_) log_(std::string("skipping frame: ") + e.what());
    }

    if (cfg_.latency_source == LatencySource::Synthetic) {
      result.latency = synthetic_latency(decision.plan, cfg_.latency);
    } else {
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
      result.latency = std::max(elapsed.count(), 1e-9);
    }
    state.monitor = record_latency(state.monitor, result.latency, sched.ewma_alpha);
    result.estimated_fps = estimated_fps(state.monitor);
    state.mode = decision.mode;
    state.last_frame = frame_idx;
    return {std::move(result), std::move(state)};
  }

  std::vector<FrameResult> run(int num_frames) {
    if (num_frames < 1) throw DataError("source must have at least one frame");
    std::vector<FrameResult> results;
    results.reserve(num_frames);
    PipelineState state;
    for (int f = 0; f < num_frames; ++f) {
      auto [r, next] = step(f, std::move(state));
      results.push_back(std::move(r));
      state = std::move(next);
    }
    return results;
  }

 private:
  std::vector<Detection> infer(int frame_idx, const Plan& p) {
    if (const auto* cs = std::get_if<CropSetPlan>(&p)) {
      const auto& crops = cs->crops;
      std::vector<std::vector<Detection>> per_crop(crops.size());
      auto run_one = [&](std::size_t i) {
        const BBox region = crops[i].rect();
        return to_frame_space(backend_->detect({frame_idx, region, crops[i].input_size}), region,
                              crops[i].input_size, dims_);
      };
      if (cfg_.parallel_crops && backend_->concurrent_safe() && crops.size() > 1) {
        std::vector<std::future<std::vector<Detection>>> pending;
        pending.reserve(crops.size());
        for (std::size_t i = 0; i < crops.size(); ++i)
          pending.push_back(std::async(std::launch::async, run_one, i));
        for (std::size_t i = 0; i < crops.size(); ++i) per_crop[i] = pending[i].get();
      } else {
        for (std::size_t i = 0; i < crops.size(); ++i) per_crop[i] = run_one(i);
      }
      return merge_crop_detections(per_crop, cfg_.cross_crop_nms_iou);
    }
    const int input_size = std::visit(
        [](const auto& q) {
          if constexpr (requires { q.input_size; }) return q.input_size;
          else return 0;
        },
        p);
    const BBox frame = dims_.rect();
    return to_frame_space(backend_->detect({frame_idx, frame, input_size}), frame, input_size, dims_);
  }

  PipelineConfig cfg_;
  FrameDims dims_;
  std::shared_ptr<DetectorBackend> backend_;
  Logger log_;
};

}  // namespace aerialdet
