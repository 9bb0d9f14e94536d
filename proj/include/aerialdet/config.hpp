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

// JSON configuration documents. Every key is optional (defaults apply) but
// unknown keys are rejected so that typos in sweeps fail loudly.

#include <cmath>
#include <cstdint>
#include <memory>
#include <set>
#include <string>

#include "json.hpp"

#include "aerialdet/detector.hpp"
#include "aerialdet/error.hpp"
#include "aerialdet/external_backend.hpp"
#include "aerialdet/pipeline.hpp"
#include "aerialdet/simulation.hpp"

namespace aerialdet {

namespace detail {

// Reads typed fields out of one JSON object and remembers which keys it saw.
class StrictObject {
 public:
  StrictObject(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw DataError(path_ + ": expected an object");
  }

  /// Rejects any key that no get()/section() call asked for.
  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw DataError("unknown config key '" + prefixed(key) + "'");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw DataError("config key '" + prefixed(key) + "' has the wrong type");
    }
  }

  template <class Fn>
  void section(const char* key, Fn&& fn) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    StrictObject sub(j_.at(key), prefixed(key));
    fn(sub);
    sub.finish();
  }

  template <class E>
  void enumeration(const char* key, E& out, std::initializer_list<std::pair<const char*, E>> names) {
    std::string s;
    bool present = j_.contains(key);
    get(key, s);
    if (!present) return;
    for (const auto& [name, value] : names)
      if (s == name) {
        out = value;
        return;
      }
    throw DataError("config key '" + prefixed(key) + "' has unknown value '" + s + "'");
  }

 private:
  std::string prefixed(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace detail

inline nlohmann::json config_to_json(const PipelineConfig& c) {
  const auto& s = c.detector.sim;
  return {
      {"proposer",
       {{"merge_gap", c.proposer.merge_gap},
        {"margin", c.proposer.margin},
        {"min_crop_side", c.proposer.min_crop_side},
        {"max_crops", c.proposer.max_crops}}},
      {"gate",
       {{"tau_hi", c.gate.tau_hi}, {"tau_lo", c.gate.tau_lo}, {"tau_overlap", c.gate.tau_overlap}}},
      {"scheduler",
       {{"refresh_period", c.scheduler.refresh_period},
        {"fps_target", c.scheduler.fps_target},
        {"base_input_size", c.scheduler.base_input_size},
        {"crop_input_size", c.scheduler.crop_input_size},
        {"ewma_alpha", c.scheduler.ewma_alpha},
        {"hysteresis", c.scheduler.hysteresis},
        {"warmup_samples", c.scheduler.warmup_samples}}},
      {"pipeline",
       {{"cross_crop_nms_iou", c.cross_crop_nms_iou},
        {"mode", c.mode == RunMode::Pipeline ? "pipeline" : "fullframe-only"},
        {"parallel_crops", c.parallel_crops}}},
      {"latency",
       {{"source", c.latency_source == LatencySource::Synthetic ? "synthetic" : "wallclock"},
        {"t_full_416", c.latency.t_full_416},
        {"t_full_608", c.latency.t_full_608},
        {"t_crop", c.latency.t_crop},
        {"t_overhead", c.latency.t_overhead}}},
      {"detector",
       {{"backend", c.detector.backend == BackendKind::Simulated ? "simulated" : "external"},
        {"command", c.detector.command},
        {"sim",
         {{"s_min", s.s_min},
          {"s_sat", s.s_sat},
          {"p_max", s.p_max},
          {"occlusion_penalty", s.occlusion_penalty},
          {"jitter_sigma", s.jitter_sigma},
          {"conf_base", s.conf_base},
          {"conf_slope", s.conf_slope},
          {"conf_noise", s.conf_noise},
          {"fp_rate", s.fp_rate},
          {"fp_conf_max", s.fp_conf_max},
          {"min_visible", s.min_visible},
          {"nms_iou", s.nms_iou},
          {"seed", s.seed}}}}},
  };
}

inline PipelineConfig config_from_json(const nlohmann::json& j) {
  PipelineConfig c;
  detail::StrictObject root(j, "");
  root.section("proposer", [&](auto& o) {
    o.get("merge_gap", c.proposer.merge_gap);
    o.get("margin", c.proposer.margin);
    o.get("min_crop_side", c.proposer.min_crop_side);
    o.get("max_crops", c.proposer.max_crops);
  });
  root.section("gate", [&](auto& o) {
    o.get("tau_hi", c.gate.tau_hi);
    o.get("tau_lo", c.gate.tau_lo);
    o.get("tau_overlap", c.gate.tau_overlap);
  });
  root.section("scheduler", [&](auto& o) {
    o.get("refresh_period", c.scheduler.refresh_period);
    o.get("fps_target", c.scheduler.fps_target);
    o.get("base_input_size", c.scheduler.base_input_size);
    o.get("crop_input_size", c.scheduler.crop_input_size);
    o.get("ewma_alpha", c.scheduler.ewma_alpha);
    o.get("hysteresis", c.scheduler.hysteresis);
    o.get("warmup_samples", c.scheduler.warmup_samples);
  });
  root.section("pipeline", [&](auto& o) {
    o.get("cross_crop_nms_iou", c.cross_crop_nms_iou);
    o.enumeration("mode", c.mode,
                  {{"pipeline", RunMode::Pipeline}, {"fullframe-only", RunMode::FullFrameOnly}});
    o.get("parallel_crops", c.parallel_crops);
  });
  root.section("latency", [&](auto& o) {
    o.enumeration("source", c.latency_source,
                  {{"synthetic", LatencySource::Synthetic}, {"wallclock", LatencySource::WallClock}});
    o.get("t_full_416", c.latency.t_full_416);
    o.get("t_full_608", c.latency.t_full_608);
    o.get("t_crop", c.latency.t_crop);
    o.get("t_overhead", c.latency.t_overhead);
  });
  root.section("detector", [&](auto& o) {
    o.enumeration("backend", c.detector.backend,
                  {{"simulated", BackendKind::Simulated}, {"external", BackendKind::External}});
    o.get("command", c.detector.command);
    o.section("sim", [&](auto& s) {
      auto& d = c.detector.sim;
      s.get("s_min", d.s_min);
      s.get("s_sat", d.s_sat);
      s.get("p_max", d.p_max);
      s.get("occlusion_penalty", d.occlusion_penalty);
      s.get("jitter_sigma", d.jitter_sigma);
      s.get("conf_base", d.conf_base);
      s.get("conf_slope", d.conf_slope);
      s.get("conf_noise", d.conf_noise);
      s.get("fp_rate", d.fp_rate);
      s.get("fp_conf_max", d.fp_conf_max);
      s.get("min_visible", d.min_visible);
      s.get("nms_iou", d.nms_iou);
      s.get("seed", d.seed);
    });
  });
  root.finish();
  c.validate();
  return c;
}

inline PipelineConfig parse_config(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

inline nlohmann::json scenario_params_to_json(const ScenarioParams& p) {
  return {{"num_tracks", p.num_tracks},     {"height_min", p.height_min},
          {"height_max", p.height_max},     {"aspect_ratio", p.aspect_ratio},
          {"speed_min", p.speed_min},       {"speed_max", p.speed_max},
          {"cluster_fraction", p.cluster_fraction}, {"num_clusters", p.num_clusters},
          {"cluster_radius", p.cluster_radius}, {"seed", p.seed}};
}

inline ScenarioParams scenario_params_from_json(const nlohmann::json& j) {
  ScenarioParams p;
  detail::StrictObject o(j, "");
  o.get("num_tracks", p.num_tracks);
  o.get("height_min", p.height_min);
  o.get("height_max", p.height_max);
  o.get("aspect_ratio", p.aspect_ratio);
  o.get("speed_min", p.speed_min);
  o.get("speed_max", p.speed_max);
  o.get("cluster_fraction", p.cluster_fraction);
  o.get("num_clusters", p.num_clusters);
  o.get("cluster_radius", p.cluster_radius);
  o.get("seed", p.seed);
  o.finish();
  return p;
}

/// Dotted-path numeric override, e.g. set_config_value(j, "gate.tau_hi", 0.6).
/// The key must already exist; integer-valued keys only accept integers.
inline void set_config_value(nlohmann::json& j, std::string_view dotted, double value) {
  nlohmann::json* node = &j;
  std::size_t start = 0;
  for (;;) {
    const auto dot = dotted.find('.', start);
    const std::string key(dotted.substr(start, dot - start));
    if (!node->is_object() || !node->contains(key))
      throw DataError("unknown config key '" + std::string(dotted) + "'");
    node = &(*node)[key];
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  if (node->is_number_integer()) {
    if (value != std::floor(value)) throw DataError(std::string(dotted) + " takes integer values");
    *node = std::int64_t(value);
  } else if (node->is_number()) {
    *node = value;
  } else {
    throw DataError(std::string(dotted) + " is not a numeric key");
  }
}

inline std::shared_ptr<DetectorBackend> make_backend(const DetectorSettings& settings,
                                                     std::shared_ptr<const Scenario> scenario) {
  if (settings.backend == BackendKind::External)
    return std::make_shared<ExternalDetector>(settings.command);
  return std::make_shared<SimulatedDetector>(std::move(scenario), settings.sim);
}

}  // namespace aerialdet
