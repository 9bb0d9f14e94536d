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

// Text formats.
//
//  * Annotations: comma-separated `frame,track_id,x,y,w,h,class`, one record
//    per line; blank lines and `#` comments are ignored.
//  * Scenarios: the annotation format preceded by `# key: value` header
//    lines (dims, num_frames, seed). Any scenario file is also a valid
//    annotation file.
//  * Detections: JSON lines. A header object, then one object per frame.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "aerialdet/error.hpp"
#include "aerialdet/evaluation.hpp"
#include "aerialdet/geometry.hpp"
#include "aerialdet/pipeline.hpp"
#include "aerialdet/scheduler.hpp"
#include "aerialdet/simulation.hpp"

namespace aerialdet {

struct AnnotationRecord {
  int frame_idx = 0;
  int track_id = 0;
  BBox box;
  int class_id = kPedestrianClass;

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

using AnnotationsByFrame = std::map<int, std::vector<AnnotationRecord>>;

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

/// Calls `fn(line_no, line)` for every line of `text`.
template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0, start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    fn(++line_no, text.substr(start, end - start));
    start = end + 1;
  }
}

inline double parse_number(std::string_view s, std::size_t line, const char* field) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ParseError(line, field, "not a number: '" + std::string(s) + "'");
  return v;
}

inline int parse_integral(std::string_view s, std::size_t line, const char* field) {
  const double v = parse_number(s, line, field);
  if (v != std::floor(v) || std::abs(v) > 2147483647.0)
    throw ParseError(line, field, "expected an integer: '" + std::string(s) + "'");
  return int(v);
}

/// Shortest text that parses back to exactly `v`.
inline std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline bool is_comment_or_blank(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

}  // namespace detail

inline std::vector<AnnotationRecord> parse_annotation_records(std::string_view text) {
  static constexpr const char* kFields[] = {"frame", "track_id", "x", "y", "w", "h", "class"};
  std::vector<AnnotationRecord> records;
  detail::for_each_line(text, [&](std::size_t n, std::string_view line) {
    if (detail::is_comment_or_blank(line)) return;
    const auto f = detail::split(line, ',');
    if (f.size() != 7)
      throw ParseError(n, "record", "expected 7 comma-separated fields, got " + std::to_string(f.size()));
    AnnotationRecord r;
    r.frame_idx = detail::parse_integral(f[0], n, kFields[0]);
    r.track_id = detail::parse_integral(f[1], n, kFields[1]);
    r.box = {detail::parse_number(f[2], n, kFields[2]), detail::parse_number(f[3], n, kFields[3]),
             detail::parse_number(f[4], n, kFields[4]), detail::parse_number(f[5], n, kFields[5])};
    r.class_id = detail::parse_integral(f[6], n, kFields[6]);
    if (r.frame_idx < 0) throw ParseError(n, "frame", "must be >= 0");
    if (!(r.box.w > 0.0)) throw ParseError(n, "w", "must be positive");
    if (!(r.box.h > 0.0)) throw ParseError(n, "h", "must be positive");
    records.push_back(r);
  });
  return records;
}

inline AnnotationsByFrame parse_annotations(std::string_view text) {
  AnnotationsByFrame by_frame;
  for (const auto& r : parse_annotation_records(text)) by_frame[r.frame_idx].push_back(r);
  return by_frame;
}

inline TruthByFrame truth_boxes(const AnnotationsByFrame& annotations) {
  TruthByFrame out;
  for (const auto& [frame, recs] : annotations) {
    auto& boxes = out[frame];
    for (const auto& r : recs) boxes.push_back(r.box);
  }
  return out;
}

inline std::string format_annotation(const AnnotationRecord& r) {
  using detail::format_number;
  return std::to_string(r.frame_idx) + "," + std::to_string(r.track_id) + "," + format_number(r.box.x) +
         "," + format_number(r.box.y) + "," + format_number(r.box.w) + "," + format_number(r.box.h) +
         "," + std::to_string(r.class_id);
}

// ---------------------------------------------------------------------------
// Scenario files

inline std::string write_scenario(const Scenario& sc) {
  std::ostringstream os;
  os << "# aerialdet scenario v1\n"
     << "# dims: " << sc.dims.width << "x" << sc.dims.height << "\n"
     << "# num_frames: " << sc.num_frames << "\n"
     << "# seed: " << sc.seed << "\n"
     << "# frame,track_id,x,y,w,h,class\n";
  std::vector<AnnotationRecord> recs;
  for (const auto& tr : sc.tracks)
    for (const auto& s : tr.samples) recs.push_back({s.frame_idx, tr.track_id, s.box, tr.class_id});
  std::stable_sort(recs.begin(), recs.end(), [](const auto& a, const auto& b) {
    return std::tie(a.frame_idx, a.track_id) < std::tie(b.frame_idx, b.track_id);
  });
  for (const auto& r : recs) os << format_annotation(r) << "\n";
  return os.str();
}

inline FrameDims parse_dims(std::string_view s) {
  const auto x = s.find('x');
  if (x == std::string_view::npos) throw DataError("dims must look like WIDTHxHEIGHT");
  int w = 0, h = 0;
  const auto a = detail::trim(s.substr(0, x)), b = detail::trim(s.substr(x + 1));
  const auto r1 = std::from_chars(a.data(), a.data() + a.size(), w);
  const auto r2 = std::from_chars(b.data(), b.data() + b.size(), h);
  if (r1.ec != std::errc{} || r1.ptr != a.data() + a.size() || r2.ec != std::errc{} ||
      r2.ptr != b.data() + b.size() || w < 1 || h < 1)
    throw DataError("dims must look like WIDTHxHEIGHT with positive integers");
  return {w, h};
}

inline Scenario parse_scenario(std::string_view text) {
  Scenario sc;
  bool have_dims = false, have_frames = false;
  detail::for_each_line(text, [&](std::size_t n, std::string_view line) {
    const auto t = detail::trim(line);
    if (t.empty() || t.front() != '#') return;
    const auto colon = t.find(':');
    if (colon == std::string_view::npos) return;
    const auto key = detail::trim(t.substr(1, colon - 1));
    const auto value = detail::trim(t.substr(colon + 1));
    try {
      if (key == "dims") {
        sc.dims = parse_dims(value);
        have_dims = true;
      } else if (key == "num_frames") {
        sc.num_frames = detail::parse_integral(value, n, "num_frames");
        have_frames = true;
      } else if (key == "seed") {
        std::uint64_t seed = 0;
        const auto r = std::from_chars(value.data(), value.data() + value.size(), seed);
        if (r.ec != std::errc{} || r.ptr != value.data() + value.size())
          throw ParseError(n, "seed", "expected an unsigned integer");
        sc.seed = seed;
      }
    } catch (const ParseError&) {
      throw;
    } catch (const DataError& e) {
      throw ParseError(n, std::string(key), e.what());
    }
  });
  if (!have_dims) throw DataError("scenario header lacks '# dims: WxH'");
  if (!have_frames) throw DataError("scenario header lacks '# num_frames: N'");

  std::map<int, Track> tracks;
  for (const auto& r : parse_annotation_records(text)) {
    auto& tr = tracks[r.track_id];
    tr.track_id = r.track_id;
    tr.class_id = r.class_id;
    tr.samples.push_back({r.frame_idx, r.box});
  }
  for (auto& [id, tr] : tracks) {
    std::stable_sort(tr.samples.begin(), tr.samples.end(),
                     [](const auto& a, const auto& b) { return a.frame_idx < b.frame_idx; });
    sc.tracks.push_back(std::move(tr));
  }
  sc.validate();
  return sc;
}

/// Ground truth of every frame of a scenario, including empty frames.
inline TruthByFrame truth_from_scenario(const Scenario& sc) {
  TruthByFrame out;
  for (int f = 0; f < sc.num_frames; ++f) out[f];
  for (const auto& tr : sc.tracks)
    for (const auto& s : tr.samples) out[s.frame_idx].push_back(s.box);
  return out;
}

// ---------------------------------------------------------------------------
// Detection streams

inline constexpr std::string_view kDetectionsFormat = "aerialdet-detections";

inline const char* to_string(PlanKind k) {
  switch (k) {
    case PlanKind::FullFrame: return "full_frame";
    case PlanKind::CropSet: return "crop_set";
    case PlanKind::FastFull: return "fast_full";
  }
  return "unknown";
}

inline PlanKind plan_kind_from_string(std::string_view s) {
  if (s == "full_frame") return PlanKind::FullFrame;
  if (s == "crop_set") return PlanKind::CropSet;
  if (s == "fast_full") return PlanKind::FastFull;
  throw DataError("unknown plan kind '" + std::string(s) + "'");
}

inline nlohmann::json frame_result_to_json(const FrameResult& r) {
  nlohmann::json dets = nlohmann::json::array();
  for (const auto& d : r.accepted)
    dets.push_back({d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h, d.confidence, d.class_id});
  nlohmann::json j = {{"frame", r.frame_idx},      {"plan", to_string(r.plan_kind)},
                      {"num_crops", r.num_crops},  {"latency", r.latency},
                      {"fps", r.estimated_fps},    {"detections", std::move(dets)}};
  if (r.error) j["error"] = *r.error;
  return j;
}

inline std::string write_detections(const std::vector<FrameResult>& results) {
  std::string out = nlohmann::json{{"format", kDetectionsFormat}, {"version", 1}}.dump() + "\n";
  for (const auto& r : results) out += frame_result_to_json(r).dump() + "\n";
  return out;
}

inline std::vector<FrameResult> read_detections(std::string_view text) {
  std::vector<FrameResult> results;
  bool header_seen = false;
  detail::for_each_line(text, [&](std::size_t n, std::string_view line) {
    if (detail::trim(line).empty()) return;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      throw ParseError(n, "record", "not valid JSON");
    }
    if (!header_seen) {
      if (!j.is_object() || j.value("format", "") != kDetectionsFormat)
        throw ParseError(n, "format", "missing detections header");
      if (j.value("version", 0) != 1) throw ParseError(n, "version", "unsupported version");
      header_seen = true;
      return;
    }
    const char* field = "record";
    try {
      FrameResult r;
      field = "frame";
      r.frame_idx = j.at("frame").get<int>();
      field = "plan";
      r.plan_kind = plan_kind_from_string(j.at("plan").get<std::string>());
      field = "num_crops";
      r.num_crops = j.at("num_crops").get<int>();
      field = "latency";
      r.latency = j.at("latency").get<double>();
      field = "fps";
      r.estimated_fps = j.at("fps").get<double>();
      field = "error";
      if (j.contains("error")) r.error = j.at("error").get<std::string>();
      field = "detections";
      for (const auto& d : j.at("detections")) {
        if (!d.is_array() || d.size() != 6) throw DataError("each detection needs 6 values");
        Detection det{{d[0].get<double>(), d[1].get<double>(), d[2].get<double>(), d[3].get<double>()},
                      d[4].get<double>(),
                      d[5].get<int>()};
        if (!det.valid()) throw DataError("invalid box or confidence");
        r.accepted.push_back(det);
      }
      results.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(n, field, e.what());
    } catch (const ParseError&) {
      throw;
    } catch (const DataError& e) {
      throw ParseError(n, field, e.what());
    }
  });
  if (!header_seen) throw DataError("detections document is empty (no header)");
  return results;
}

inline DetectionsByFrame detections_by_frame(const std::vector<FrameResult>& results) {
  DetectionsByFrame out;
  for (const auto& r : results) {
    auto& v = out[r.frame_idx];
    v.insert(v.end(), r.accepted.begin(), r.accepted.end());
  }
  return out;
}

inline std::vector<double> latencies_of(const std::vector<FrameResult>& results) {
  std::vector<double> out;
  out.reserve(results.size());
  for (const auto& r : results) out.push_back(r.latency);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation output

inline nlohmann::json eval_report_to_json(const EvalReport& r) {
  return {{"ap", r.ap},
          {"true_positives", r.true_positives},
          {"false_positives", r.false_positives},
          {"false_negatives", r.false_negatives},
          {"mean_fps", r.mean_fps},
          {"p5_fps", r.p5_fps},
          {"pr_points", r.recall.size()}};
}

/// Two-column recall,precision CSV of the PR curve.
inline std::string pr_curve_csv(const EvalReport& r) {
  std::string out = "recall,precision\n";
  for (std::size_t i = 0; i < r.recall.size(); ++i)
    out += detail::format_number(r.recall[i]) + "," + detail::format_number(r.precision[i]) + "\n";
  return out;
}

}  // namespace aerialdet
