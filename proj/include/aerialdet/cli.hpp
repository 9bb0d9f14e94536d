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

// Command-line front end: simulate, run, eval and bench.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "aerialdet/config.hpp"
#include "aerialdet/evaluation.hpp"
#include "aerialdet/io.hpp"
#include "aerialdet/pipeline.hpp"
#include "aerialdet/simulation.hpp"

namespace aerialdet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << content;
  if (!out) throw DataError("failed writing '" + path + "'");
}

/// Parses `a:b:step` (inclusive) or `v1,v2,...` into a list of values.
inline std::vector<double> parse_sweep_values(std::string_view range) {
  std::vector<double> values;
  if (range.find(':') != std::string_view::npos) {
    const auto parts = detail::split(range, ':');
    if (parts.size() != 3) throw DataError("sweep range must be start:stop:step");
    const double a = detail::parse_number(parts[0], 1, "start");
    const double b = detail::parse_number(parts[1], 1, "stop");
    const double step = detail::parse_number(parts[2], 1, "step");
    if (!(step > 0.0) || b < a) throw DataError("sweep range needs start <= stop and step > 0");
    const auto n = std::size_t(std::floor((b - a) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < n; ++i) values.push_back(a + double(i) * step);
  } else {
    for (auto v : detail::split(range, ',')) values.push_back(detail::parse_number(v, 1, "value"));
  }
  if (values.empty()) throw DataError("empty sweep");
  return values;
}

struct RunOptions {
  std::string scenario;
  std::string config;
  std::string out;
  std::string mode;
  std::string backend;
  std::string command;
  std::optional<std::uint64_t> seed;
};

inline PipelineConfig load_config(const RunOptions& o) {
  PipelineConfig cfg = o.config.empty() ? PipelineConfig{} : parse_config(read_file(o.config));
  if (o.mode == "pipeline") cfg.mode = RunMode::Pipeline;
  if (o.mode == "fullframe-only") cfg.mode = RunMode::FullFrameOnly;
  if (o.backend == "simulated") cfg.detector.backend = BackendKind::Simulated;
  if (o.backend == "external") cfg.detector.backend = BackendKind::External;
  if (!o.command.empty()) cfg.detector.command = o.command;
  if (o.seed) cfg.detector.sim.seed = *o.seed;
  cfg.validate();
  return cfg;
}

inline std::vector<FrameResult> run_scenario(const PipelineConfig& cfg,
                                             std::shared_ptr<const Scenario> scenario,
                                             std::ostream& log) {
  auto backend = make_backend(cfg.detector, scenario);
  Pipeline pipeline(cfg, scenario->dims, backend, [&log](const std::string& m) { log << m << "\n"; });
  return pipeline.run(scenario->num_frames);
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Crop-scheduled pedestrian detection on aerial video"};
  app.require_subcommand(1);

  // simulate
  std::string params_path, dims_text = "1920x1080", scenario_out;
  int frames = 200;
  std::optional<std::uint64_t> sim_seed;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic scenario");
  simulate->add_option("--params", params_path, "Scenario parameters (JSON)");
  simulate->add_option("--frames", frames, "Number of frames")->check(CLI::PositiveNumber);
  simulate->add_option("--dims", dims_text, "Frame size WIDTHxHEIGHT");
  simulate->add_option("--seed", sim_seed, "Random seed (overrides the params file)");
  simulate->add_option("--out", scenario_out, "Output scenario file")->required();

  // run
  RunOptions run_opts;
  auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("--scenario", run_opts.scenario, "Scenario file")->required();
    sub->add_option("--config", run_opts.config, "Pipeline config (JSON)");
    sub->add_option("--mode", run_opts.mode, "pipeline | fullframe-only")
        ->check(CLI::IsMember({"pipeline", "fullframe-only"}));
    sub->add_option("--backend", run_opts.backend, "simulated | external")
        ->check(CLI::IsMember({"simulated", "external"}));
    sub->add_option("--cmd", run_opts.command, "External backend command");
    sub->add_option("--seed", run_opts.seed, "Detector seed (overrides the config)");
  };
  auto* run = app.add_subcommand("run", "Run the pipeline on a scenario");
  add_run_flags(run);
  run->add_option("--out", run_opts.out, "Output detections file")->required();

  // eval
  std::string det_path, truth_path, pr_csv;
  double eval_iou = 0.5;
  auto* eval = app.add_subcommand("eval", "Score detections against ground truth");
  eval->add_option("--detections", det_path, "Detections file")->required();
  eval->add_option("--truth", truth_path, "Annotation or scenario file")->required();
  eval->add_option("--iou", eval_iou, "IoU match threshold")->check(CLI::Range(0.0, 1.0));
  eval->add_option("--pr-csv", pr_csv, "Write the PR curve as CSV");

  // bench
  std::string sweep, bench_out;
  auto* bench = app.add_subcommand("bench", "Sweep one config parameter");
  add_run_flags(bench);
  bench->add_option("--sweep", sweep, "param=start:stop:step or param=v1,v2,...")->required();
  bench->add_option("--out", bench_out, "Output CSV (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*simulate) {
      ScenarioParams params;
      if (!params_path.empty())
        params = scenario_params_from_json(nlohmann::json::parse(read_file(params_path)));
      if (sim_seed) params.seed = *sim_seed;
      const Scenario sc = generate_scenario(params, parse_dims(dims_text), frames);
      write_file(scenario_out, write_scenario(sc));
      err << "wrote " << sc.tracks.size() << " tracks x " << sc.num_frames << " frames to "
          << scenario_out << "\n";
    } else if (*run) {
      const auto cfg = load_config(run_opts);
      auto scenario = std::make_shared<const Scenario>(parse_scenario(read_file(run_opts.scenario)));
      const auto results = run_scenario(cfg, scenario, err);
      write_file(run_opts.out, write_detections(results));
      const auto fps = fps_summary(latencies_of(results));
      err << "processed " << results.size() << " frames, mean fps " << fps.mean_fps << "\n";
    } else if (*eval) {
      const auto results = read_detections(read_file(det_path));
      const auto truth = truth_boxes(parse_annotations(read_file(truth_path)));
      EvalReport report = evaluate(detections_by_frame(results), truth, EvalConfig{eval_iou});
      if (!results.empty()) {
        const auto fps = fps_summary(latencies_of(results));
        report.mean_fps = fps.mean_fps;
        report.p5_fps = fps.p5_fps;
      }
      out << eval_report_to_json(report).dump(2) << "\n";
      if (!pr_csv.empty()) write_file(pr_csv, pr_curve_csv(report));
    } else if (*bench) {
      const auto eq = sweep.find('=');
      if (eq == std::string::npos) throw DataError("--sweep must look like param=range");
      const std::string param = sweep.substr(0, eq);
      const auto values = parse_sweep_values(std::string_view(sweep).substr(eq + 1));
      const auto base = config_to_json(load_config(run_opts));
      auto scenario = std::make_shared<const Scenario>(parse_scenario(read_file(run_opts.scenario)));
      const auto truth = truth_from_scenario(*scenario);

      std::string csv = param + ",ap,mean_fps\n";
      for (double v : values) {
        auto j = base;
        set_config_value(j, param, v);
        const auto cfg = config_from_json(j);
        const auto results = run_scenario(cfg, scenario, err);
        const double ap = average_precision(detections_by_frame(results), truth);
        const auto fps = fps_summary(latencies_of(results));
        csv += detail::format_number(v) + "," + detail::format_number(ap) + "," +
               detail::format_number(fps.mean_fps) + "\n";
      }
      if (bench_out.empty())
        out << csv;
      else
        write_file(bench_out, csv);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace aerialdet::cli
