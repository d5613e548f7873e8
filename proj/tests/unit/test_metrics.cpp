#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "vipr/error.hpp"
#include "vipr/metrics.hpp"
#include "vipr/rng.hpp"

using namespace vipr;

namespace {

BBox box(double cx, double cy, double w, double h) { return {0, cx, cy, w, h}; }

// Boxes on a coarse grid so that IoU ties and exact threshold hits happen.
BBox random_box(RngStream& r) {
  const double w = double(1 + r.below(8)) / 16, h = double(1 + r.below(8)) / 16;
  const double cx = w / 2 + double(r.below(std::uint64_t((1 - w) * 32) + 1)) / 32;
  const double cy = h / 2 + double(r.below(std::uint64_t((1 - h) * 32) + 1)) / 32;
  return box(cx, cy, w, h);
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no vipr::Error thrown";
  return ErrorKind::kIo;
}

}  // namespace

TEST(Iou, BasicCases) {
  const auto a = box(0.25, 0.5, 0.5, 0.5);
  EXPECT_EQ(iou(a, a), 1.0);
  EXPECT_EQ(iou(a, box(0.8, 0.5, 0.2, 0.2)), 0.0);
  // x in [0,2] and [1,3], y in [0,2], scaled by 1/4.
  EXPECT_NEAR(iou(box(0.25, 0.25, 0.5, 0.5), box(0.5, 0.25, 0.5, 0.5)), 1.0 / 3.0, 1e-15);
}

TEST(Ciou, IdenticalAndSameShape) {
  const auto a = box(0.4, 0.5, 0.2, 0.3);
  EXPECT_NEAR(ciou(a, a), 1.0, 1e-15);
  const auto b = box(0.45, 0.55, 0.2, 0.3);
  const double rho2 = 0.05 * 0.05 * 2;
  const double c2 = 0.25 * 0.25 + 0.35 * 0.35;
  EXPECT_NEAR(ciou(a, b), iou(a, b) - rho2 / c2, 1e-14);
}

TEST(Ciou, MatchesHandEvaluation) {
  const auto a = box(0.3, 0.4, 0.2, 0.4), b = box(0.4, 0.5, 0.3, 0.2);
  EXPECT_NEAR(ciou(a, b), oracle::ciou_by_hand(a, b), 1e-14);
  EXPECT_EQ(kind_of([] { ciou(box(0.5, 0.5, 0.0, 0.2), box(0.5, 0.5, 0.2, 0.2)); }), ErrorKind::kInvalidArgument);
}

TEST(Match, SimpleCases) {
  const auto g = box(0.5, 0.5, 0.2, 0.2);
  auto m = match_greedy({{g, 0.9}}, {g}, 0.5);
  EXPECT_EQ(m.tp_count(), 1u);
  EXPECT_EQ(m.fp_count(), 0u);
  EXPECT_EQ(m.false_negatives, 0u);
  m = match_greedy({}, {g, g, g}, 0.5);
  EXPECT_EQ(m.false_negatives, 3u);
  m = match_greedy({{g, 0.3}, {g, 0.8}}, {g}, 0.5);
  EXPECT_FALSE(m.true_positive[0]);
  EXPECT_TRUE(m.true_positive[1]);
  EXPECT_EQ(m.matched_gt[1], 0);
}

TEST(Match, AgreesWithExhaustiveSearch) {
  RngStream r(21);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Detection> dets;
    std::vector<BBox> gts;
    for (auto n = r.below(6); n > 0; --n) dets.push_back({random_box(r), double(r.below(5)) / 4});
    for (auto n = r.below(4); n > 0; --n) gts.push_back(random_box(r));
    const double thr = 0.3 + 0.1 * double(r.below(4));
    EXPECT_EQ(match_greedy(dets, gts, thr).matched_gt, oracle::match_exhaustive(dets, gts, thr)) << trial;
  }
}

TEST(Ap, HandCases) {
  const auto g1 = box(0.25, 0.25, 0.2, 0.2), g2 = box(0.75, 0.75, 0.2, 0.2);
  EXPECT_EQ(average_precision({{g1, 0.3}}, {g1}, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(average_precision({{g1, 0.9}}, {g1, g2}, 0.5), 51.0 / 101.0);
  EXPECT_EQ(average_precision({{box(0.5, 0.5, 0.1, 0.1), 0.9}}, {g1, g2}, 0.5), 0.0);
  EXPECT_EQ(kind_of([] { average_precision(std::vector<Detection>{}, std::vector<BBox>{}, 0.5); }),
            ErrorKind::kUndefinedAp);
}

TEST(Ap, AgreesWithPrefixEnumeration) {
  RngStream r(22);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::vector<Detection>> dets(1 + r.below(3));
    std::vector<std::vector<BBox>> gts(dets.size());
    for (std::size_t i = 0; i < dets.size(); ++i) {
      for (auto n = r.below(6); n > 0; --n) dets[i].push_back({random_box(r), double(r.below(6)) / 5});
      for (auto n = r.below(4); n > 0; --n) gts[i].push_back(random_box(r));
    }
    if (gts[0].empty()) gts[0].push_back(random_box(r));
    const double thr = kMapIouThresholds[r.below(10)];
    EXPECT_NEAR(average_precision(dets, gts, thr), oracle::ap_exhaustive(dets, gts, thr), 1e-12) << trial;
  }
}

TEST(Map, ThresholdCounting) {
  const auto gt = box(0.5, 0.5, 0.5, 0.625);
  const auto det = box(0.5, 0.5, 0.5, 0.375);
  ASSERT_EQ(iou(det, gt), 0.6);
  const auto m = map_range({{{det, 0.9}}}, {{gt}});
  EXPECT_EQ(m.map50, 1.0);
  EXPECT_DOUBLE_EQ(m.map50_95, 3.0 / 10.0);
  const auto perfect = map_range({{{gt, 0.5}}}, {{gt}});
  EXPECT_EQ(perfect.map50, 1.0);
  EXPECT_EQ(perfect.map50_95, 1.0);
  const auto empty = map_range({{}}, {{gt}});
  EXPECT_EQ(empty.map50, 0.0);
  EXPECT_EQ(empty.map50_95, 0.0);
  for (std::size_t k = 0; k < 10; ++k) EXPECT_NEAR(kMapIouThresholds[k], 0.5 + 0.05 * double(k), 1e-15);
}

TEST(Curves, KnownArgmax) {
  const std::vector<BBox> gts = {box(0.1, 0.1, 0.1, 0.1), box(0.3, 0.3, 0.1, 0.1), box(0.5, 0.5, 0.1, 0.1)};
  const std::vector<Detection> dets = {{gts[0], 0.9},
                                       {gts[1], 0.8},
                                       {gts[2], 0.75},
                                       {box(0.8, 0.8, 0.1, 0.1), 0.6},
                                       {box(0.8, 0.2, 0.1, 0.1), 0.3}};
  const auto c = confidence_curves(dets, gts, 0.5);
  EXPECT_EQ(c.optimal_threshold, 0.75);
  EXPECT_EQ(c.optimal_f1, 1.0);
  ASSERT_EQ(c.f1.points.size(), 7u);
  EXPECT_EQ(c.precision.points.back().y, 1.0);
  EXPECT_EQ(c.recall.points.back().y, 0.0);
  EXPECT_EQ(c.to_csv().substr(0, 30), "threshold,precision,recall,f1\n");
}

TEST(Curves, AllTruePositivesPickZero) {
  const std::vector<BBox> gts = {box(0.1, 0.1, 0.1, 0.1), box(0.5, 0.5, 0.1, 0.1)};
  const auto c = confidence_curves({{gts[0], 0.4}, {gts[1], 0.7}}, gts, 0.5);
  EXPECT_EQ(c.optimal_threshold, 0.0);
  EXPECT_EQ(c.optimal_f1, 1.0);
}

TEST(Curves, RecallNeverIncreases) {
  RngStream r(23);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Detection> dets;
    std::vector<BBox> gts;
    for (auto n = r.below(6); n > 0; --n) dets.push_back({random_box(r), r.uniform()});
    for (auto n = r.below(4); n > 0; --n) gts.push_back(random_box(r));
    const auto c = confidence_curves(dets, gts, 0.5);
    for (std::size_t i = 1; i < c.recall.points.size(); ++i) {
      ASSERT_GT(c.recall.points[i].x, c.recall.points[i - 1].x);
      ASSERT_LE(c.recall.points[i].y, c.recall.points[i - 1].y);
    }
  }
}

TEST(Confusion, DetectionLayout) {
  std::vector<std::vector<Detection>> dets;
  std::vector<std::vector<BBox>> gts;
  for (int i = 0; i < 100; ++i) {
    const auto g = box(0.5, 0.5, 0.2, 0.2);
    gts.push_back({g});
    dets.push_back(i < 96 ? std::vector<Detection>{{g, 0.9}} : std::vector<Detection>{});
  }
  const auto cm = detection_confusion(dets, gts, 0.5, 0.5);
  EXPECT_DOUBLE_EQ(cm.normalized[0][0], 0.96);
  EXPECT_DOUBLE_EQ(cm.normalized[0][1], 0.04);
  EXPECT_EQ(cm.counts[0][0], 96);
  EXPECT_EQ(cm.counts[0][1], 4);

  const auto none = detection_confusion({{}}, {{box(0.5, 0.5, 0.2, 0.2)}}, 0.5, 0.5);
  EXPECT_EQ(none.normalized[0][0], 0.0);
  EXPECT_EQ(none.normalized[0][1], 1.0);
  const auto perfect = detection_confusion({{{box(0.5, 0.5, 0.2, 0.2), 0.9}}}, {{box(0.5, 0.5, 0.2, 0.2)}}, 0.5, 0.5);
  EXPECT_EQ(perfect.normalized[0][0], 1.0);
}

TEST(Confusion, ZeroSupportRow) {
  const auto cm = make_confusion({"a", "b"}, {{{3, 1}, {0, 0}}});
  EXPECT_TRUE(cm.zero_support[1]);
  EXPECT_FALSE(cm.zero_support[0]);
  EXPECT_EQ(cm.normalized[0][0], 0.75);
  EXPECT_EQ(cm.to_csv().substr(0, cm.to_csv().find('\n')), "truth,predicted,count,normalized");
}

TEST(Classification, PerfectPredictor) {
  const auto r = classification_report({0.1, 0.9, 0.2, 0.8}, {0, 1, 0, 1});
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.confusion.normalized[0][0], 1.0);
  EXPECT_EQ(r.confusion.normalized[1][1], 1.0);
}

TEST(Classification, ThresholdIsInclusive) {
  const auto r = classification_report({0.5, 0.5, 0.5}, {1, 0, 1}, 0.5);
  EXPECT_EQ(r.recall, 1.0);
  EXPECT_EQ(r.confusion.counts[0][1], 1);
}

TEST(Classification, CountingExample) {
  // 8 correct, 2 wrong: TP 4, TN 4, FP 1, FN 1.
  const std::vector<double> p = {0.9, 0.8, 0.7, 0.6, 0.1, 0.2, 0.3, 0.4, 0.55, 0.45};
  const std::vector<int> y = {1, 1, 1, 1, 0, 0, 0, 0, 0, 1};
  const auto r = classification_report(p, y);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.8);
  EXPECT_DOUBLE_EQ(r.precision, 4.0 / 5.0);
  EXPECT_DOUBLE_EQ(r.recall, 4.0 / 5.0);
  EXPECT_DOUBLE_EQ(r.f1, 0.8);
  EXPECT_FALSE(r.pr_curve.empty());
  EXPECT_THROW(classification_report({0.5}, {1, 0}), Error);
  EXPECT_THROW(classification_report({}, {}), Error);
}
