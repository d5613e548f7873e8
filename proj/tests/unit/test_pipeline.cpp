#include <gtest/gtest.h>

#include <numeric>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "vipr/error.hpp"
#include "vipr/pipeline.hpp"
#include "vipr/rng.hpp"

using namespace vipr;
using namespace std::string_literals;

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

Manifest sources_manifest(int n, int frames_each) {
  Manifest m;
  for (int s = 0; s < n; ++s)
    for (int f = 0; f < frames_each; ++f)
      m.records.push_back({"v" + std::to_string(s) + "/" + std::to_string(f) + ".png", std::nullopt,
                           "video" + std::to_string(s), Split::kTrain, std::nullopt, std::nullopt, std::nullopt,
                           std::nullopt});
  return m;
}

}  // namespace

TEST(Y4m, DecodesHandBuiltStream) {
  const std::string bytes = "YUV4MPEG2 W2 H2 F25:1 Ip A1:1 Cmono\nFRAME\n"s + std::string("\x00\xff\xff\x00", 4);
  const auto frames = read_y4m_luma(bytes);
  ASSERT_EQ(frames.size(), 1u);
  EXPECT_EQ(frames[0], GrayImage(2, 2, std::vector<double>{0, 1, 1, 0}));
}

TEST(Y4m, SkipsChromaOf420) {
  std::string bytes = "YUV4MPEG2 W2 H2 F30:1 C420jpeg\n";
  for (int f = 0; f < 2; ++f) bytes += "FRAME\n"s + std::string(4, char(f * 200)) + std::string(2, '\x80');
  const auto frames = read_y4m_luma(bytes);
  ASSERT_EQ(frames.size(), 2u);
  EXPECT_EQ(frames[1].at(1, 1), 200.0 / 255.0);
}

TEST(Y4m, HeaderOnlyIsEmpty) { EXPECT_TRUE(read_y4m_luma("YUV4MPEG2 W4 H4 F25:1 Cmono\n").empty()); }

TEST(Y4m, ReportsMalformedStreams) {
  EXPECT_EQ(kind_of([] { read_y4m_luma("MPEG2 W2 H2\n"); }), ErrorKind::kParse);
  EXPECT_EQ(kind_of([] { read_y4m_luma("YUV4MPEG2 H2 Cmono\n"); }), ErrorKind::kParse);
  EXPECT_EQ(kind_of([] { read_y4m_luma("YUV4MPEG2 W2 H2 Cmono\nFRAME\n\x01\x02"); }), ErrorKind::kParse);
  EXPECT_EQ(kind_of([] { read_y4m_luma("YUV4MPEG2 W2 H2 C411\n"); }), ErrorKind::kUnsupportedFormat);
  try {
    read_y4m_luma("YUV4MPEG2 W2 H2 Cmono\nFRAME\n\x01\x02");
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("truncated"), std::string::npos);
  }
}

TEST(Y4m, WriteReadRoundTrip) {
  std::vector<GrayImage> frames;
  for (int f = 0; f < 3; ++f) {
    GrayImage img(6, 4);
    for (std::size_t i = 0; i < img.size(); ++i) img.pixels()[i] = double((i * 11 + std::size_t(f) * 7) % 256) / 255.0;
    frames.push_back(img);
  }
  for (auto cs : {Y4mColorspace::kMono, Y4mColorspace::k420, Y4mColorspace::k444}) {
    std::stringstream ss;
    write_y4m(ss, frames, cs);
    EXPECT_EQ(read_y4m_luma(ss), frames);
  }
}

TEST(Extract, StrideArithmetic) {
  std::vector<int> idx(200);
  std::iota(idx.begin(), idx.end(), 0);
  const auto kept = extract_every_nth(idx, {20, 0});
  ASSERT_EQ(kept.size(), 10u);
  for (std::size_t i = 0; i < kept.size(); ++i) EXPECT_EQ(kept[i], int(20 * i));
  EXPECT_EQ(extract_every_nth(idx, {1, 0}), idx);
  EXPECT_EQ(extract_every_nth(std::vector<int>{0, 1, 2, 3, 4}, {20, 0}), std::vector<int>{0});
  EXPECT_EQ(extract_every_nth(idx, {20, 5}).front(), 5);
  EXPECT_EQ(kind_of([&] { extract_every_nth(idx, {0, 0}); }), ErrorKind::kInvalidArgument);
}

TEST(MaskConfigTest, ParsesDeviceAndMasks) {
  const auto cfg = parse_mask_config("# probe A\ndevice = sonosite\nmask = 0,0,100,20\nmask=10, 400, 50, 448\n");
  EXPECT_EQ(cfg.device, "sonosite");
  ASSERT_EQ(cfg.masks.size(), 2u);
  EXPECT_EQ(cfg.masks[1], (MaskRegion{10, 400, 50, 448}));
  EXPECT_EQ(kind_of([] { parse_mask_config("mask = 1,2,3"); }), ErrorKind::kParse);
  EXPECT_EQ(kind_of([] { parse_mask_config("colour = red"); }), ErrorKind::kParse);
}

TEST(Anonymize, ChangesOnlyMaskedPixels) {
  GrayImage img(40, 30);
  CounterRng r(1);
  for (std::size_t i = 0; i < img.size(); ++i) img.pixels()[i] = 0.01 + 0.98 * r.uniform(i);
  EXPECT_EQ(anonymize(img, {}), img);
  const std::vector<MaskRegion> masks = {{2, 3, 10, 8}, {35, 25, 60, 60}};
  const auto out = anonymize(img, masks);
  for (int y = 0; y < 30; ++y)
    for (int x = 0; x < 40; ++x) {
      const bool masked = masks[0].contains(x, y) || masks[1].contains(x, y);
      ASSERT_EQ(out.at(x, y), masked ? 0.0 : img.at(x, y)) << x << "," << y;
    }
  const std::vector<MaskRegion> full = {{0, 0, 40, 30}};
  const auto blank = anonymize(img, full);
  for (double p : blank.pixels()) ASSERT_EQ(p, 0.0);
}

TEST(Standardize, SizesAndInvariants) {
  GrayImage img(256, 256);
  for (std::size_t i = 0; i < img.size(); ++i) img.pixels()[i] = double((i * 7) % 256) / 255.0;
  const auto same = standardize(img);
  for (std::size_t i = 0; i < img.size(); ++i) ASSERT_NEAR(same.pixels()[i], img.pixels()[i], 1e-6);
  const auto flat = standardize(GrayImage(480, 360, 0.42));
  EXPECT_EQ(flat.width(), 256);
  for (double p : flat.pixels()) ASSERT_EQ(p, 0.42);
}

TEST(Standardize, MatchesDirectSummationOn512Pattern) {
  GrayImage img(512, 512);
  for (int y = 0; y < 512; ++y)
    for (int x = 0; x < 512; ++x) img.at(x, y) = ((x / 8 + y / 8) % 2 == 0) ? 0.9 : 0.1;
  const auto got = standardize(img);
  const auto want = oracle::resize_direct(img, 256, 256);
  for (std::size_t i = 0; i < got.size(); ++i) ASSERT_NEAR(got.pixels()[i], want.pixels()[i], 1e-9);
}

TEST(Splits, HashIsSeededFnv) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const std::uint64_t seed = 0x0102030405060708ULL;
  auto feed = [&](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (int i = 0; i < 8; ++i) feed(static_cast<unsigned char>(seed >> (8 * i)));
  for (char c : std::string("video3")) feed(static_cast<unsigned char>(c));
  EXPECT_EQ(split_hash("video3", seed), h);
}

TEST(Splits, ThirtySourcesTenPercent) {
  const auto m = assign_splits(sources_manifest(30, 3), std::nullopt, 0.1, 7);
  std::set<std::string> val;
  for (const auto& r : m.records)
    if (r.split == Split::kVal) val.insert(r.source_id);
  EXPECT_EQ(val.size(), 3u);
  EXPECT_NO_THROW(validate_manifest(m));
  EXPECT_EQ(assign_splits(sources_manifest(30, 3), std::nullopt, 0.1, 7), m);
}

TEST(Splits, ZeroFractionAndHoldouts) {
  for (const auto& r : assign_splits(sources_manifest(5, 2), std::nullopt, 0.0, 1).records)
    EXPECT_EQ(r.split, Split::kTrain);
  const auto m = assign_splits(sources_manifest(5, 2), std::set<std::string>{"video2"}, 0.5, 1);
  for (const auto& r : m.records) EXPECT_EQ(r.split == Split::kVal, r.source_id == "video2");
  EXPECT_EQ(kind_of([] { assign_splits(sources_manifest(5, 2), std::set<std::string>{"nope"}, 0.0, 1); }),
            ErrorKind::kValidation);
}

TEST(Splits, SmallestHashesGoToVal) {
  const auto m = assign_splits(sources_manifest(10, 1), std::nullopt, 0.2, 42);
  std::vector<std::pair<std::uint64_t, std::string>> keyed;
  for (int s = 0; s < 10; ++s) keyed.emplace_back(split_hash("video" + std::to_string(s), 42), "video" + std::to_string(s));
  std::sort(keyed.begin(), keyed.end());
  for (const auto& r : m.records)
    EXPECT_EQ(r.split == Split::kVal, r.source_id == keyed[0].second || r.source_id == keyed[1].second);
}
