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

// Compares crop-scheduled inference with a full-frame-only baseline on a
// synthetic crowd scenario and prints accuracy and throughput for both.

#include <cstdio>
#include <cstdlib>
#include <memory>

#include "aerialdet/aerialdet.hpp"

using namespace aerialdet;

namespace {

void report(const char* name, const std::vector<FrameResult>& results, const TruthByFrame& truth) {
  const EvalReport r = evaluate(detections_by_frame(results), truth);
  const FpsSummary fps = fps_summary(latencies_of(results));
  int crops = 0, full = 0, fast = 0;
  for (const auto& f : results) {
    crops += f.num_crops;
    full += f.plan_kind == PlanKind::FullFrame;
    fast += f.plan_kind == PlanKind::FastFull;
  }
  std::printf("%-16s AP %.3f  TP %5d  FP %5d  FN %5d  mean fps %.2f  p5 fps %.2f  "
              "full %3d  fast %3d  crops/frame %.2f\n",
              name, r.ap, r.true_positives, r.false_positives, r.false_negatives, fps.mean_fps,
              fps.p5_fps, full, fast, double(crops) / results.size());
}

}  // namespace

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 7;

  ScenarioParams params;  // 30 tracks, 8-40 px, two crowds
  params.seed = seed;
  auto scenario =
      std::make_shared<const Scenario>(generate_scenario(params, {1920, 1080}, 200));
  const TruthByFrame truth = truth_from_scenario(*scenario);

  PipelineConfig cfg;
  cfg.detector.sim.seed = seed;
  auto backend = std::make_shared<SimulatedDetector>(scenario, cfg.detector.sim);

  Pipeline crops(cfg, scenario->dims, backend);
  report("crop pipeline", crops.run(scenario->num_frames), truth);

  cfg.mode = RunMode::FullFrameOnly;
  Pipeline baseline(cfg, scenario->dims, backend);
  report("full frame only", baseline.run(scenario->num_frames), truth);
  return 0;
}
