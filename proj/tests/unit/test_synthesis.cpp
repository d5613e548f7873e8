#include <gtest/gtest.h>

#include <cmath>

#include "vipr/error.hpp"
#include "vipr/rng.hpp"
#include "vipr/synthesis.hpp"

using namespace vipr;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no vipr::Error thrown";
  return ErrorKind::kIo;
}

GrayImage noise(int w, int h, std::uint64_t seed) {
  GrayImage img(w, h);
  CounterRng r(seed);
  for (std::size_t i = 0; i < img.size(); ++i) img.pixels()[i] = r.uniform(i);
  return img;
}

RoiInput constant_input(double v) {
  return {GrayImage(256, 256, v), GrayImage(400, 400, v), PixelRect{50, 40, 306, 296}, "f0"};
}

}  // namespace

TEST(Halves, SplitWidths) {
  auto [l, r] = split_halves(GrayImage(256, 256));
  EXPECT_EQ(l.width(), 128);
  EXPECT_EQ(r.width(), 128);
  auto [l3, r3] = split_halves(GrayImage(3, 2));
  EXPECT_EQ(l3.width(), 1);
  EXPECT_EQ(r3.width(), 2);
  const auto img = noise(9, 5, 1);
  auto [a, b] = split_halves(img);
  EXPECT_EQ(join_halves(a, b), img);
}

TEST(Compress, HeightAndConstants) {
  EXPECT_EQ(compress_half(GrayImage(128, 256), 0.75).height(), 192);
  EXPECT_EQ(compress_half(GrayImage(128, 256), 0.75).width(), 128);
  const auto flat = compress_half(GrayImage(128, 256, 0.6), 0.75);
  for (double p : flat.pixels()) ASSERT_EQ(p, 0.6);
  EXPECT_EQ(kind_of([] { compress_half(GrayImage(4, 1), 0.3); }), ErrorKind::kInvalidArgument);
  EXPECT_EQ(kind_of([] { compress_half(GrayImage(4, 4), 1.0); }), ErrorKind::kInvalidArgument);
}

TEST(FillGap, ConstantSourceFillsConstant) {
  const GrayImage canvas = noise(256, 256, 2);
  const PixelRect gap{0, 192, 128, 256};
  const auto out = fill_gap(canvas, gap, GrayImage(400, 400, 0.35), {50, 40, 306, 296});
  for (int y = 0; y < 256; ++y)
    for (int x = 0; x < 256; ++x) ASSERT_EQ(out.at(x, y), gap.contains(x, y) ? 0.35 : canvas.at(x, y));
}

TEST(FillGap, TakesBandBelowRoi) {
  GrayImage frame(400, 400, 0.2);
  const PixelRect roi{50, 40, 306, 296};
  for (int y = roi.y1; y < 400; ++y)
    for (int x = 0; x < 400; ++x) frame.at(x, y) = 0.9;
  const PixelRect gap{128, 192, 256, 256};
  const auto out = fill_gap(GrayImage(256, 256, 0.5), gap, frame, roi);
  double sum = 0;
  for (int y = gap.y0; y < gap.y1; ++y)
    for (int x = gap.x0; x < gap.x1; ++x) sum += out.at(x, y);
  EXPECT_NEAR(sum / (gap.width() * gap.height()), 0.9, 0.02);
}

TEST(FillGap, MirrorsWhenNoRowsBelow) {
  GrayImage canvas(8, 8, 0.0);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) canvas.at(x, y) = y / 10.0;
  const auto out = fill_gap(canvas, {0, 6, 4, 8}, GrayImage(8, 8, 0.9), {0, 0, 8, 8});
  EXPECT_EQ(out.at(0, 6), canvas.at(0, 5));
  EXPECT_EQ(out.at(0, 7), canvas.at(0, 4));
  EXPECT_EQ(out.at(5, 7), canvas.at(5, 7));
}

TEST(FillGap, RejectsGapOutsideCanvas) {
  EXPECT_EQ(kind_of([] { fill_gap(GrayImage(8, 8), {0, 6, 9, 8}, GrayImage(20, 20), {0, 0, 8, 8}); }),
            ErrorKind::kInvalidArgument);
}

TEST(Seam, LinearRampBetweenAnchors) {
  GrayImage img(256, 2, 0.5);
  img.at(121, 0) = 0.0;
  img.at(134, 0) = 1.0;
  const auto out = seam_fill(img, 128, 6);
  for (int k = 1; k <= 12; ++k) EXPECT_NEAR(out.at(121 + k, 0), k / 13.0, 1e-15) << k;
  for (int x = 122; x < 134; ++x) EXPECT_EQ(out.at(x, 1), 0.5);
  EXPECT_EQ(out.at(120, 0), 0.5);
  EXPECT_EQ(out.at(135, 0), 0.5);
}

TEST(Seam, RejectsStripAtBorder) {
  EXPECT_EQ(kind_of([] { seam_fill(GrayImage(10, 2), 5, 5); }), ErrorKind::kInvalidArgument);
}

TEST(Paralyzed, ConstantIsFixedPoint) {
  for (Side side : {Side::kLeft, Side::kRight}) {
    const auto s = make_paralyzed(constant_input(0.4), side, 1);
    for (double p : s.image.pixels()) ASSERT_NEAR(p, 0.4, 1e-12);
    EXPECT_EQ(s.label, kParalyzedLabel);
    EXPECT_EQ(s.group, side == Side::kLeft ? GroupTag::kLeftPar : GroupTag::kRightPar);
  }
}

TEST(Paralyzed, OtherHalfUntouchedOutsideSeam) {
  RoiInput in{noise(256, 256, 3), noise(400, 400, 4), {50, 40, 306, 296}, "f"};
  const auto s = make_paralyzed(in, Side::kLeft, 9);
  for (int y = 0; y < 256; ++y)
    for (int x = 134; x < 256; ++x) ASSERT_EQ(s.image.at(x, y), in.roi_image.at(x, y));
  const auto r = make_paralyzed(in, Side::kRight, 9);
  for (int y = 0; y < 256; ++y)
    for (int x = 0; x < 122; ++x) ASSERT_EQ(r.image.at(x, y), in.roi_image.at(x, y));
}

TEST(Healthy2, ConstantIsUnchanged) {
  const GrayImage img(256, 256, 0.25);
  const auto s = make_healthy2(img, "f");
  EXPECT_EQ(s.image, img);
  EXPECT_EQ(s.label, kHealthyLabel);
  EXPECT_EQ(s.group, GroupTag::kHealthy2);
}

TEST(Groups, FourPerInputInOrder) {
  std::vector<RoiInput> inputs;
  for (int i = 0; i < 3; ++i)
    inputs.push_back({noise(256, 256, std::uint64_t(i)), noise(300, 320, 10 + std::uint64_t(i)), {20, 10, 276, 266},
                      "frame" + std::to_string(i)});
  const auto out = build_groups(inputs, 5);
  ASSERT_EQ(out.size(), 12u);
  int paralyzed = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const GroupTag want[4] = {GroupTag::kHealthy, GroupTag::kHealthy2, GroupTag::kLeftPar, GroupTag::kRightPar};
    EXPECT_EQ(out[i].group, want[i % 4]);
    EXPECT_EQ(out[i].label, binary_label(out[i].group));
    EXPECT_EQ(out[i].source_frame, inputs[i / 4].frame_id);
    EXPECT_EQ(out[i].seed, item_seed(5, inputs[i / 4].frame_id));
    paralyzed += out[i].label;
  }
  EXPECT_EQ(paralyzed, 6);
  EXPECT_EQ(out[0].image, inputs[0].roi_image);
  const auto again = build_groups(inputs, 5);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i].image, again[i].image);
}

TEST(Groups, TagNamesRoundTrip) {
  for (GroupTag g : {GroupTag::kHealthy, GroupTag::kHealthy2, GroupTag::kLeftPar, GroupTag::kRightPar})
    EXPECT_EQ(parse_group(to_string(g)), g);
  EXPECT_FALSE(parse_group("sick").has_value());
}
