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

#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include <unistd.h>

#include "aerialdet/cli.hpp"
#include "aerialdet/config.hpp"
#include "aerialdet/io.hpp"

namespace aerialdet {
namespace {

namespace fs = std::filesystem;

TEST(Annotations, Examples) {
  EXPECT_TRUE(parse_annotations("").empty());
  const auto a = parse_annotations("0,1,10,20,5,9,0\n0,2,40,40,6,12,0");
  ASSERT_EQ(a.size(), 1u);
  ASSERT_EQ(a.at(0).size(), 2u);
  EXPECT_EQ(a.at(0)[1], (AnnotationRecord{0, 2, {40, 40, 6, 12}, 0}));
  try {
    parse_annotations("0,1,10,20,-5,9,0");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_EQ(e.field(), "w");
  }
}

TEST(Annotations, CommentsDecimalsAndErrors) {
  const auto a = parse_annotations("# header\n\n3, 7, 1.5, 2.25, 4, 8, 0\n");
  EXPECT_EQ(a.at(3)[0].box, (BBox{1.5, 2.25, 4, 8}));
  auto field_of = [](const char* text) {
    try {
      parse_annotations(text);
    } catch (const ParseError& e) {
      return std::to_string(e.line()) + ":" + e.field();
    }
    return std::string("ok");
  };
  EXPECT_EQ(field_of("0,1,2,3,4,5,0\n0,1,x,3,4,5,0"), "2:x");
  EXPECT_EQ(field_of("0,1,2,3,4,0,0"), "1:h");
  EXPECT_EQ(field_of("-1,1,2,3,4,5,0"), "1:frame");
  EXPECT_EQ(field_of("0,1,2,3"), "1:record");
  EXPECT_EQ(field_of("0,1.5,2,3,4,5,0"), "1:track_id");
}

TEST(Annotations, FormatRoundTrip) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.001, 1000);
  for (int i = 0; i < 500; ++i) {
    const AnnotationRecord r{int(rng() % 1000), int(rng() % 50), {u(rng), u(rng), u(rng), u(rng)}, 0};
    EXPECT_EQ(parse_annotation_records(format_annotation(r)).at(0), r);
  }
}

std::vector<FrameResult> sample_run(int frames, std::uint64_t seed = 1) {
  ScenarioParams params;
  params.seed = seed;
  auto sc = std::make_shared<const Scenario>(generate_scenario(params, {1920, 1080}, frames));
  PipelineConfig cfg;
  Pipeline p(cfg, sc->dims, std::make_shared<SimulatedDetector>(sc, cfg.detector.sim));
  return p.run(frames);
}

TEST(Detections, HeaderOnlyForEmptyResults) {
  const auto text = write_detections({});
  EXPECT_EQ(text, "{\"format\":\"aerialdet-detections\",\"version\":1}\n");
  EXPECT_TRUE(read_detections(text).empty());
  EXPECT_THROW(read_detections(""), DataError);
}

TEST(Detections, OneRecordPerFrame) {
  const auto text = write_detections(sample_run(3));
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}

TEST(Detections, RoundTripIsExact) {
  auto results = sample_run(40);
  results[7].error = "frame 7: backend crashed";
  EXPECT_EQ(read_detections(write_detections(results)), results);
}

TEST(Detections, ParseErrorsNameLineAndField) {
  const std::string header = write_detections({});
  auto field_of = [&](const std::string& body) {
    try {
      read_detections(header + body);
    } catch (const ParseError& e) {
      return std::to_string(e.line()) + ":" + e.field();
    }
    return std::string("ok");
  };
  EXPECT_EQ(field_of(R"({"frame":0,"plan":"crop_set","num_crops":1,"latency":0.1,"fps":5,"detections":[]})"), "ok");
  EXPECT_EQ(field_of(R"({"frame":0,"plan":"warp","num_crops":1,"latency":0.1,"fps":5,"detections":[]})"), "2:plan");
  EXPECT_EQ(field_of(R"({"frame":0,"plan":"full_frame","num_crops":0,"fps":5,"detections":[]})"), "2:latency");
  EXPECT_EQ(field_of(R"({"frame":0,"plan":"full_frame","num_crops":0,"latency":0.1,"fps":5,"detections":[[1,2,3,4,1.5,0]]})"),
            "2:detections");
  EXPECT_EQ(field_of("{oops"), "2:record");
  EXPECT_THROW(read_detections(R"({"format":"other","version":1})"), ParseError);
}

TEST(ScenarioFile, RoundTrip) {
  ScenarioParams params;
  params.seed = 9;
  const auto sc = generate_scenario(params, {1280, 720}, 25);
  EXPECT_EQ(parse_scenario(write_scenario(sc)), sc);
  EXPECT_THROW(parse_scenario("0,1,10,20,5,9,0\n"), DataError);
  EXPECT_THROW(parse_scenario("# dims: 100x100\n# num_frames: 2\n0,1,98,20,5,9,0\n"), DataError);
  EXPECT_THROW(parse_dims("100"), DataError);
  EXPECT_THROW(parse_dims("0x5"), DataError);
  EXPECT_EQ(parse_dims("640x480"), (FrameDims{640, 480}));
}

TEST(Config, RoundTripAndDefaults) {
  PipelineConfig c;
  c.gate.tau_hi = 0.6;
  c.scheduler.refresh_period = 7;
  c.mode = RunMode::FullFrameOnly;
  c.detector.backend = BackendKind::External;
  c.detector.command = "./detector --fp16";
  c.detector.sim.seed = 12;
  const auto text = config_to_json(c).dump(2);
  const auto parsed = parse_config(text);
  EXPECT_EQ(parsed, c);
  EXPECT_EQ(config_to_json(parsed).dump(2), text);
  EXPECT_EQ(parse_config("{}"), PipelineConfig{});
}

TEST(Config, CheckedInFilesMatchLibraryDefaults) {
  const std::string dir = AERIALDET_SOURCE_DIR "/configs/";
  EXPECT_EQ(parse_config(cli::read_file(dir + "default.json")), PipelineConfig{});
  ScenarioParams dense;
  dense.seed = 7;
  EXPECT_EQ(scenario_params_from_json(nlohmann::json::parse(cli::read_file(dir + "scenario_dense.json"))), dense);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(parse_config(R"({"gate":{"tau_hi":0.5,"tau_high":0.6}})"), DataError);
  EXPECT_THROW(parse_config(R"({"gates":{}})"), DataError);
  EXPECT_THROW(parse_config(R"({"detector":{"sim":{"smin":3}}})"), DataError);
  EXPECT_THROW(parse_config(R"({"gate":{"tau_hi":"high"}})"), DataError);
  EXPECT_THROW(parse_config(R"({"gate":{"tau_lo":0.7}})"), DataError);
  EXPECT_THROW(parse_config(R"({"pipeline":{"mode":"turbo"}})"), DataError);
  EXPECT_THROW(parse_config("not json"), DataError);
}

TEST(Config, DottedOverrides) {
  auto j = config_to_json(PipelineConfig{});
  set_config_value(j, "gate.tau_hi", 0.6);
  set_config_value(j, "scheduler.refresh_period", 10);
  const auto c = config_from_json(j);
  EXPECT_EQ(c.gate.tau_hi, 0.6);
  EXPECT_EQ(c.scheduler.refresh_period, 10);
  EXPECT_THROW(set_config_value(j, "gate.tau_high", 0.6), DataError);
  EXPECT_THROW(set_config_value(j, "scheduler.refresh_period", 2.5), DataError);
  EXPECT_THROW(set_config_value(j, "pipeline.mode", 1), DataError);
}

TEST(ScenarioParamsJson, RoundTripAndStrictness) {
  ScenarioParams p;
  p.num_tracks = 12;
  p.cluster_radius = 80;
  EXPECT_EQ(scenario_params_from_json(scenario_params_to_json(p)), p);
  EXPECT_THROW(scenario_params_from_json(nlohmann::json{{"tracks", 3}}), DataError);
}

TEST(SweepValues, RangesAndLists) {
  EXPECT_EQ(cli::parse_sweep_values("0.1:0.3:0.1").size(), 3u);
  EXPECT_EQ(cli::parse_sweep_values("1,2,5"), (std::vector<double>{1, 2, 5}));
  EXPECT_THROW(cli::parse_sweep_values("1:0:1"), DataError);
  EXPECT_THROW(cli::parse_sweep_values("1:2"), DataError);
}

/// Runs the CLI in-process inside a scratch directory.
class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("aerialdet_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "aerialdet");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return cli::run_cli(int(argv.size()), argv.data(), out_, err_);
  }

  void simulate(const std::string& name, int frames = 30) {
    ASSERT_EQ(cli({"simulate", "--frames", std::to_string(frames), "--seed", "5", "--out", path(name)}), 0)
        << err_.str();
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(CliTest, SimulateRunEval) {
  simulate("scene.csv");
  ASSERT_EQ(cli({"run", "--scenario", path("scene.csv"), "--out", path("det.jsonl")}), 0) << err_.str();
  EXPECT_EQ(read_detections(cli::read_file(path("det.jsonl"))).size(), 30u);
  ASSERT_EQ(cli({"eval", "--detections", path("det.jsonl"), "--truth", path("scene.csv"), "--pr-csv",
                 path("pr.csv")}),
            0);
  const auto report = nlohmann::json::parse(out_.str());
  EXPECT_GT(report.at("ap").get<double>(), 0.0);
  EXPECT_GT(report.at("mean_fps").get<double>(), 0.0);
  EXPECT_TRUE(fs::exists(path("pr.csv")));
}

TEST_F(CliTest, RunIsByteDeterministic) {
  simulate("scene.csv");
  for (const char* name : {"a.jsonl", "b.jsonl"})
    ASSERT_EQ(cli({"run", "--scenario", path("scene.csv"), "--seed", "3", "--out", path(name)}), 0);
  EXPECT_EQ(cli::read_file(path("a.jsonl")), cli::read_file(path("b.jsonl")));
  ASSERT_EQ(cli({"run", "--scenario", path("scene.csv"), "--seed", "4", "--out", path("c.jsonl")}), 0);
  EXPECT_NE(cli::read_file(path("a.jsonl")), cli::read_file(path("c.jsonl")));
}

TEST_F(CliTest, FullFrameOnlyMode) {
  simulate("scene.csv", 12);
  ASSERT_EQ(cli({"run", "--scenario", path("scene.csv"), "--mode", "fullframe-only", "--out", path("d.jsonl")}), 0);
  for (const auto& r : read_detections(cli::read_file(path("d.jsonl")))) EXPECT_EQ(r.plan_kind, PlanKind::FullFrame);
}

TEST_F(CliTest, EvalPrintsWorkedExample) {
  cli::write_file(path("truth.csv"), "0,1,0,0,10,10,0\n1,2,50,50,10,10,0\n");
  FrameResult f0{0, PlanKind::FullFrame, 0, {{{0, 0, 10, 10}, 0.9, 0}, {{200, 200, 10, 10}, 0.8, 0}}, 0.2, 5, {}};
  FrameResult f1{1, PlanKind::FullFrame, 0, {{{50, 50, 10, 10}, 0.7, 0}}, 0.2, 5, {}};
  cli::write_file(path("det.jsonl"), write_detections({f0, f1}));
  ASSERT_EQ(cli({"eval", "--detections", path("det.jsonl"), "--truth", path("truth.csv"), "--iou", "0.5"}), 0);
  EXPECT_NEAR(nlohmann::json::parse(out_.str()).at("ap").get<double>(), 0.8333333333, 1e-9);

  FrameResult g1{1, PlanKind::FullFrame, 0, {{{50, 50, 10, 10}, 0.7, 0}}, 0.2, 5, {}};
  FrameResult g0{0, PlanKind::FullFrame, 0, {{{0, 0, 10, 10}, 0.9, 0}}, 0.2, 5, {}};
  cli::write_file(path("perfect.jsonl"), write_detections({g0, g1}));
  ASSERT_EQ(cli({"eval", "--detections", path("perfect.jsonl"), "--truth", path("truth.csv")}), 0);
  EXPECT_EQ(nlohmann::json::parse(out_.str()).at("ap").get<double>(), 1.0);
}

TEST_F(CliTest, BenchSweepsParameter) {
  simulate("scene.csv", 20);
  ASSERT_EQ(cli({"bench", "--scenario", path("scene.csv"), "--sweep", "gate.tau_hi=0.4,0.6"}), 0) << err_.str();
  std::istringstream lines(out_.str());
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], "gate.tau_hi,ap,mean_fps");
  EXPECT_EQ(rows[1].rfind("0.4,", 0), 0u);
  EXPECT_EQ(cli({"bench", "--scenario", path("scene.csv"), "--sweep", "gate.tau_hgh=0.4"}), 2);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(cli({}), 1);
  EXPECT_EQ(cli({"run", "--bogus"}), 1);
  EXPECT_FALSE(err_.str().empty());
  EXPECT_EQ(cli({"frobnicate"}), 1);
  EXPECT_EQ(cli({"run", "--scenario", path("missing.csv"), "--out", path("x.jsonl")}), 2);
  cli::write_file(path("bad.json"), R"({"gate":{"tau_hi":0.5,"typo":1}})");
  simulate("scene.csv", 5);
  EXPECT_EQ(cli({"run", "--scenario", path("scene.csv"), "--config", path("bad.json"), "--out", path("x.jsonl")}), 2);
  cli::write_file(path("truth.csv"), "0,1,0,0,-10,10,0\n");
  cli::write_file(path("det.jsonl"), write_detections({}));
  EXPECT_EQ(cli({"eval", "--detections", path("det.jsonl"), "--truth", path("truth.csv")}), 2);
  EXPECT_NE(err_.str().find("line 1"), std::string::npos) << err_.str();
  EXPECT_EQ(cli({"run", "--help"}), 0);
}

}  // namespace
}  // namespace aerialdet
