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

// Synthetic aerial-pedestrian scenarios: constant-size tracks moving along
// piecewise-linear waypoint paths, optionally packed into drifting crowds.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "aerialdet/error.hpp"
#include "aerialdet/geometry.hpp"
#include "aerialdet/rng.hpp"

namespace aerialdet {

struct TrackSample {
  int frame_idx = 0;
  BBox box;
  friend bool operator==(const TrackSample&, const TrackSample&) = default;
};

struct Track {
  int track_id = 0;
  int class_id = kPedestrianClass;
  std::vector<TrackSample> samples;  ///< strictly increasing frame_idx

  /// Box at `frame_idx`, or nullptr when the track is not present.
  const BBox* at(int frame_idx) const noexcept {
    auto it = std::lower_bound(samples.begin(), samples.end(), frame_idx,
                               [](const TrackSample& s, int f) { return s.frame_idx < f; });
    return it != samples.end() && it->frame_idx == frame_idx ? &it->box : nullptr;
  }

  friend bool operator==(const Track&, const Track&) = default;
};

struct Scenario {
  FrameDims dims;
  int num_frames = 0;
  std::uint64_t seed = 0;
  std::vector<Track> tracks;  ///< sorted by track_id

  void validate() const {
    if (!dims.valid()) throw DataError("scenario dims must be positive");
    if (num_frames < 1) throw DataError("scenario must have at least one frame");
    const BBox frame = dims.rect();
    for (std::size_t t = 0; t < tracks.size(); ++t) {
      const auto& tr = tracks[t];
      if (t > 0 && tracks[t - 1].track_id >= tr.track_id)
        throw DataError("scenario tracks must have unique, sorted ids");
      for (std::size_t i = 0; i < tr.samples.size(); ++i) {
        const auto& s = tr.samples[i];
        if (s.frame_idx < 0 || s.frame_idx >= num_frames)
          throw DataError("track " + std::to_string(tr.track_id) + ": frame out of range");
        if (i > 0 && tr.samples[i - 1].frame_idx >= s.frame_idx)
          throw DataError("track " + std::to_string(tr.track_id) + ": frames not increasing");
        if (!s.box.valid() || !contains(frame, s.box, 1e-9))
          throw DataError("track " + std::to_string(tr.track_id) + ": box outside frame");
      }
    }
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct LabeledBox {
  int track_id = 0;
  BBox box;
  friend bool operator==(const LabeledBox&, const LabeledBox&) = default;
};

inline std::vector<LabeledBox> ground_truth_at(const Scenario& scenario, int frame_idx) {
  if (frame_idx < 0 || frame_idx >= scenario.num_frames)
    throw DataError("frame " + std::to_string(frame_idx) + " out of range [0, " +
                    std::to_string(scenario.num_frames) + ")");
  std::vector<LabeledBox> out;
  for (const auto& tr : scenario.tracks)
    if (const BBox* b = tr.at(frame_idx)) out.push_back({tr.track_id, *b});
  return out;
}

struct ScenarioParams {
  int num_tracks = 30;
  double height_min = 8.0;
  double height_max = 40.0;
  double aspect_ratio = 0.4;  ///< width = aspect_ratio * height
  double speed_min = 0.5;     ///< pixels per frame
  double speed_max = 2.0;
  double cluster_fraction = 0.6;
  int num_clusters = 2;
  double cluster_radius = 60.0;
  std::uint64_t seed = 0;

  void validate(const FrameDims& dims) const {
    if (num_tracks < 0) throw DataError("num_tracks must be >= 0");
    if (!(height_min > 0.0 && height_max >= height_min))
      throw DataError("height range must be positive and nonempty");
    if (!(aspect_ratio > 0.0)) throw DataError("aspect_ratio must be > 0");
    if (!(speed_min >= 0.0 && speed_max >= speed_min))
      throw DataError("speed range must be nonnegative and nonempty");
    if (!(cluster_fraction >= 0.0 && cluster_fraction <= 1.0))
      throw DataError("cluster_fraction must be in [0, 1]");
    if (num_clusters < 0) throw DataError("num_clusters must be >= 0");
    if (!(cluster_radius >= 0.0)) throw DataError("cluster_radius must be >= 0");
    if (height_max > dims.height || aspect_ratio * height_max > dims.width)
      throw DataError("pedestrians larger than the frame");
  }

  friend bool operator==(const ScenarioParams&, const ScenarioParams&) = default;
};

namespace detail {

inline constexpr int kWaypointPeriod = 30;

enum SimPurpose : std::uint32_t { kClusterPath = 1, kTrackShape = 2, kTrackPath = 3 };

struct Point {
  double x, y;
};

// Waypoint chain inside [lo, hi]: uniform start, then per-segment random
// heading and speed, clamped to the box.
inline std::vector<Point> waypoint_chain(const CounterRng& rng, int segments, Point lo, Point hi,
                                         double speed_min, double speed_max) {
  std::vector<Point> wps;
  wps.reserve(segments + 1);
  wps.push_back({rng.uniform(0, lo.x, hi.x), rng.uniform(1, lo.y, hi.y)});
  for (int k = 0; k < segments; ++k) {
    const double heading = rng.uniform(2 + 2 * k, 0.0, 2.0 * std::numbers::pi);
    const double speed = rng.uniform(3 + 2 * k, speed_min, speed_max);
    const Point& p = wps.back();
    wps.push_back({std::clamp(p.x + std::cos(heading) * speed * kWaypointPeriod, lo.x, hi.x),
                   std::clamp(p.y + std::sin(heading) * speed * kWaypointPeriod, lo.y, hi.y)});
  }
  return wps;
}

inline Point along(const std::vector<Point>& wps, int frame) {
  const int k = frame / kWaypointPeriod;
  const double t = double(frame % kWaypointPeriod) / kWaypointPeriod;
  const Point& a = wps[k];
  const Point& b = wps[k + 1];
  return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
}

}  // namespace detail

/// Deterministic in `params.seed`. Every track exists on every frame and its
/// box stays inside the frame. The first round(cluster_fraction * num_tracks)
/// tracks are crowd members, assigned round-robin to clusters; each keeps a
/// fixed offset (uniform in a disk of `cluster_radius`) from its drifting
/// cluster centre.
inline Scenario generate_scenario(const ScenarioParams& params, const FrameDims& dims,
                                  int num_frames) {
  if (!dims.valid()) throw DataError("frame dims must be positive");
  if (num_frames < 1) throw DataError("num_frames must be >= 1");
  params.validate(dims);
  using namespace detail;

  const int segments = (num_frames - 1) / kWaypointPeriod + 1;
  const Point frame_lo{0.0, 0.0};
  const Point frame_hi{double(dims.width), double(dims.height)};

  std::vector<std::vector<Point>> centers;
  for (int c = 0; c < params.num_clusters; ++c)
    centers.push_back(waypoint_chain(CounterRng(params.seed, 0, std::uint32_t(c), kClusterPath),
                                     segments, frame_lo, frame_hi, params.speed_min,
                                     params.speed_max));

  const int crowd =
      params.num_clusters > 0 ? int(std::lround(params.cluster_fraction * params.num_tracks)) : 0;

  Scenario sc{dims, num_frames, params.seed, {}};
  sc.tracks.reserve(params.num_tracks);
  for (int i = 0; i < params.num_tracks; ++i) {
    const CounterRng shape(params.seed, 0, std::uint32_t(i), kTrackShape);
    const double h = shape.uniform(0, params.height_min, params.height_max);
    const double w = params.aspect_ratio * h;
    const Point hi{dims.width - w, dims.height - h};

    Track tr{i, kPedestrianClass, {}};
    tr.samples.reserve(num_frames);
    if (i < crowd) {
      const auto& center = centers[i % params.num_clusters];
      const double r = params.cluster_radius * std::sqrt(shape.uniform(1));
      const double phi = shape.uniform(2, 0.0, 2.0 * std::numbers::pi);
      const double ox = r * std::cos(phi) - 0.5 * w, oy = r * std::sin(phi) - 0.5 * h;
      for (int f = 0; f < num_frames; ++f) {
        const Point c = along(center, f);
        tr.samples.push_back(
            {f, {std::clamp(c.x + ox, 0.0, hi.x), std::clamp(c.y + oy, 0.0, hi.y), w, h}});
      }
    } else {
      const auto path = waypoint_chain(CounterRng(params.seed, 0, std::uint32_t(i), kTrackPath),
                                       segments, frame_lo, hi, params.speed_min, params.speed_max);
      for (int f = 0; f < num_frames; ++f) {
        const Point p = along(path, f);
        tr.samples.push_back({f, {p.x, p.y, w, h}});
      }
    }
    sc.tracks.push_back(std::move(tr));
  }
  return sc;
}

}  // namespace aerialdet
