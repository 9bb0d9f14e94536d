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

#include <random>

#include "aerialdet/proposer.hpp"
#include "support/oracles.hpp"

namespace aerialdet {
namespace {

Detection det(double x, double y, double w, double h, double conf = 0.9) { return {{x, y, w, h}, conf, 0}; }

std::vector<Crop> crops_of(const CropProposal& p) {
  const auto* v = std::get_if<std::vector<Crop>>(&p);
  if (!v) ADD_FAILURE() << "unexpected fallback";
  return v ? *v : std::vector<Crop>{};
}

// Labels each input box with the index of the cluster that contains it.
std::vector<int> cluster_labels(const std::vector<BBox>& boxes,
                                const std::vector<std::vector<BBox>>& clusters) {
  std::vector<int> label(boxes.size(), -1);
  std::vector<bool> used(boxes.size(), false);
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (const auto& m : clusters[c])
      for (std::size_t i = 0; i < boxes.size(); ++i)
        if (!used[i] && boxes[i] == m) {
          used[i] = true;
          label[i] = int(c);
          break;
        }
  return label;
}

// Two labelings describe the same partition.
bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
  return true;
}

TEST(Proposer, ClusterExamples) {
  const std::vector<BBox> boxes{{0, 0, 10, 10}, {12, 0, 10, 10}, {50, 0, 10, 10}};
  const auto c5 = cluster_boxes(boxes, 5);
  ASSERT_EQ(c5.size(), 2u);
  EXPECT_EQ(c5[0], (std::vector<BBox>{boxes[0], boxes[1]}));
  EXPECT_EQ(c5[1], (std::vector<BBox>{boxes[2]}));
  EXPECT_TRUE(same_partition(cluster_labels(boxes, c5), oracle::closure_components(boxes, 5)));

  const auto c1 = cluster_boxes(boxes, 1);
  EXPECT_EQ(c1.size(), 3u);
  EXPECT_TRUE(same_partition(cluster_labels(boxes, c1), oracle::closure_components(boxes, 1)));

  EXPECT_TRUE(cluster_boxes(std::vector<BBox>{}, 5).empty());
}

TEST(Proposer, ClusterOrderIsBySmallestMember) {
  const std::vector<BBox> boxes{{100, 0, 5, 5}, {0, 50, 5, 5}, {0, 10, 5, 5}};
  const auto c = cluster_boxes(boxes, 0);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0][0], boxes[2]);
  EXPECT_EQ(c[1][0], boxes[1]);
  EXPECT_EQ(c[2][0], boxes[0]);
}

TEST(Proposer, ClustersMatchTransitiveClosure) {
  std::mt19937 rng(21);
  std::uniform_int_distribution<int> pos(0, 120), side(2, 12), gap_pick(0, 20);
  for (int t = 0; t < 60; ++t) {
    std::vector<BBox> boxes(2 + t % 10);
    for (auto& b : boxes) b = {double(pos(rng)), double(pos(rng)), double(side(rng)), double(side(rng))};
    const double merge_gap = gap_pick(rng);
    const auto clusters = cluster_boxes(boxes, merge_gap);
    std::size_t total = 0;
    for (const auto& c : clusters) total += c.size();
    EXPECT_EQ(total, boxes.size());
    EXPECT_TRUE(same_partition(cluster_labels(boxes, clusters), oracle::closure_components(boxes, merge_gap)));
  }
}

TEST(Proposer, LargerMergeGapNeverAddsClusters) {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> pos(0, 500), side(4, 40);
  for (int t = 0; t < 200; ++t) {
    std::vector<BBox> boxes(1 + t % 30);
    for (auto& b : boxes) b = {pos(rng), pos(rng), side(rng), side(rng)};
    std::size_t prev = boxes.size() + 1;
    for (double g : {0.0, 4.0, 16.0, 32.0, 64.0, 200.0}) {
      const auto n = cluster_boxes(boxes, g).size();
      EXPECT_LE(n, prev);
      prev = n;
    }
  }
}

TEST(Proposer, SingleDetectionCrop) {
  ProposerConfig cfg;
  cfg.margin = 16;
  cfg.min_crop_side = 128;
  const std::vector<Detection> dets{det(100, 100, 20, 40)};
  EXPECT_EQ(crops_of(propose_crops(dets, {1920, 1080}, cfg)), (std::vector<Crop>{{46, 56, 128, 416}}));
}

TEST(Proposer, CornerDetectionIsTranslatedInside) {
  ProposerConfig cfg;
  const std::vector<Detection> dets{det(0, 0, 20, 20)};
  EXPECT_EQ(crops_of(propose_crops(dets, {1920, 1080}, cfg)), (std::vector<Crop>{{0, 0, 128, 416}}));
}

TEST(Proposer, TooManyCropsFallsBack) {
  ProposerConfig cfg;
  cfg.max_crops = 8;
  std::vector<Detection> dets;
  for (int i = 0; i < 20; ++i) dets.push_back(det(50 + (i % 10) * 180, 100 + (i / 10) * 500, 10, 25));
  EXPECT_TRUE(std::holds_alternative<FallbackFullFrame>(propose_crops(dets, {1920, 1080}, cfg)));
}

TEST(Proposer, NoDetectionsNoCrops) {
  EXPECT_TRUE(crops_of(propose_crops(std::vector<Detection>{}, {1920, 1080}, ProposerConfig{})).empty());
}

TEST(Proposer, DuplicateCropsCollapse) {
  ProposerConfig cfg;
  cfg.merge_gap = 10;
  // Separate clusters whose crops both translate to the frame corner.
  const std::vector<Detection> dets{det(0, 0, 5, 5), det(40, 40, 5, 5)};
  ASSERT_EQ(cluster_boxes(std::vector<BBox>{dets[0].bbox, dets[1].bbox}, cfg.merge_gap).size(), 2u);
  EXPECT_EQ(crops_of(propose_crops(dets, {1920, 1080}, cfg)), (std::vector<Crop>{{0, 0, 128, 416}}));
}

TEST(Proposer, ClusterWiderThanFrameIsTiled) {
  ProposerConfig cfg;
  std::vector<Detection> dets;
  for (int i = 0; i < 40; ++i) dets.push_back(det(10 + i * 45, 500, 20, 40));
  const FrameDims dims{1920, 1080};
  const auto crops = crops_of(propose_crops(dets, dims, cfg));
  ASSERT_EQ(crops.size(), 2u);
  for (const auto& c : crops) EXPECT_EQ(c.side, 1080);
  for (const auto& d : dets) {
    const BBox need = clip(inflate(d.bbox, cfg.margin), dims.rect());
    EXPECT_TRUE(std::any_of(crops.begin(), crops.end(), [&](const Crop& c) { return contains(c.rect(), need); }));
  }
}

TEST(Proposer, TilesOverlapEnoughToHoldEveryMember) {
  // A tall chain in a narrow frame: members straddle any naive tile seam.
  ProposerConfig cfg;
  cfg.margin = 20;
  std::vector<Detection> dets;
  for (int i = 0; i < 7; ++i) dets.push_back(det(90, 10 + i * 110, 40, 100));
  const FrameDims dims{224, 781};
  const auto crops = crops_of(propose_crops(dets, dims, cfg));
  ASSERT_GT(crops.size(), 1u);
  for (const auto& d : dets) {
    const BBox need = clip(inflate(d.bbox, cfg.margin), dims.rect());
    EXPECT_TRUE(std::any_of(crops.begin(), crops.end(), [&](const Crop& c) { return contains(c.rect(), need); }));
  }
}

TEST(Proposer, MemberTallerThanAnyCropFallsBack) {
  ProposerConfig cfg;
  const std::vector<Detection> dets{det(50, 100, 40, 250)};
  EXPECT_TRUE(std::holds_alternative<FallbackFullFrame>(propose_crops(dets, {200, 1000}, cfg)));
}

TEST(Proposer, RejectsInvalidConfig) {
  ProposerConfig cfg;
  cfg.min_crop_side = 16;
  EXPECT_THROW(cfg.validate(), DataError);
  cfg = {};
  cfg.max_crops = 0;
  EXPECT_THROW(cfg.validate(), DataError);
  cfg = {};
  cfg.margin = -1;
  EXPECT_THROW(cfg.validate(), DataError);
}

TEST(Proposer, CoverageAndCropInvariants) {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> ndet(1, 25), dim(200, 2000);
  std::uniform_real_distribution<double> unit(0, 1);
  for (int t = 0; t < 1000; ++t) {
    const FrameDims dims{dim(rng), dim(rng)};
    ProposerConfig cfg;
    cfg.merge_gap = 64 * unit(rng);
    cfg.margin = 32 * unit(rng);
    cfg.min_crop_side = 32 + int(200 * unit(rng));
    cfg.max_crops = 1000;
    std::vector<Detection> dets(ndet(rng));
    for (auto& d : dets) {
      const double h = 4 + 60 * unit(rng), w = 0.4 * h;
      d = det(unit(rng) * (dims.width - w), unit(rng) * (dims.height - h), w, h);
    }
    const auto crops = crops_of(propose_crops(dets, dims, cfg));
    for (const auto& c : crops) {
      EXPECT_GE(c.side, std::min(cfg.min_crop_side, std::min(dims.width, dims.height)));
      EXPECT_TRUE(contains(dims.rect(), c.rect()));
    }
    for (const auto& d : dets) {
      const BBox need = clip(inflate(d.bbox, cfg.margin), dims.rect());
      EXPECT_TRUE(std::any_of(crops.begin(), crops.end(), [&](const Crop& c) { return contains(c.rect(), need); }));
    }
    for (std::size_t i = 0; i < crops.size(); ++i)
      for (std::size_t j = 0; j < crops.size(); ++j)
        if (i != j) {
          EXPECT_FALSE(contains(crops[j].rect(), crops[i].rect()));
        }
    EXPECT_EQ(crops_of(propose_crops(dets, dims, cfg)), crops);
  }
}

}  // namespace
}  // namespace aerialdet
