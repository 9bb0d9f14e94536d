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

// Backends and fixtures shared by the pipeline tests and the acceptance
// binary.

#include <memory>
#include <vector>

#include "aerialdet/detector.hpp"
#include "aerialdet/pipeline.hpp"

namespace aerialdet::testing {

/// Returns the same input-space detections for every request, whatever the
/// region. Lets tests control the output exactly, including boxes that
/// overhang the input square.
class CannedDetector final : public DetectorBackend {
 public:
  explicit CannedDetector(std::vector<Detection> dets) : dets_(std::move(dets)) {}
  bool concurrent_safe() const noexcept override { return true; }
  std::vector<Detection> detect(const DetectRequest&) override { return dets_; }

 private:
  std::vector<Detection> dets_;
};

inline constexpr FrameDims kFlickerDims{1280, 720};

/// One pedestrian seen at confidence 0.9 on frame 1 and only at 0.3 on
/// frames 2 to 4, drifting one pixel per frame. Nothing on frame 0.
inline std::shared_ptr<ScriptedDetector> flicker_detector() {
  auto det = std::make_shared<ScriptedDetector>(kFlickerDims);
  det->add(1, {{600, 300, 12, 30}, 0.9, kPedestrianClass});
  for (int f = 2; f <= 4; ++f) det->add(f, {{600.0 + (f - 1), 300, 12, 30}, 0.3, kPedestrianClass});
  return det;
}

/// Frames 0..4 of the flicker script through a pipeline with the given gate.
/// Returns, per frame, whether anything was accepted.
inline std::vector<bool> flicker_presence(const GateConfig& gate) {
  PipelineConfig cfg;
  cfg.gate = gate;
  cfg.detector.sim.fp_rate = 0;
  Pipeline p(cfg, kFlickerDims, flicker_detector());
  std::vector<bool> seen;
  for (const auto& r : p.run(5)) seen.push_back(!r.accepted.empty());
  return seen;
}

}  // namespace aerialdet::testing
