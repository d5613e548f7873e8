#include "vipr/synthesis.hpp"

#include <algorithm>
#include <cmath>

#include "vipr/error.hpp"
#include "vipr/rng.hpp"

namespace vipr {
namespace {

constexpr int kMinRowsBelowRoi = 4;

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

GrayImage mirror_fill(const GrayImage& canvas, const PixelRect& gap) {
  GrayImage out = canvas;
  if (gap.y0 == 0) fail(ErrorKind::kInvalidArgument, "mirror fill needs rows above the gap");
  const int above = gap.y0;
  for (int k = 0; k < gap.height(); ++k) {
    // Reflect back and forth across the rows above the gap.
    const int period = 2 * above;
    int m = k % period;
    if (m >= above) m = period - 1 - m;
    const int src_row = gap.y0 - 1 - m;
    for (int x = gap.x0; x < gap.x1; ++x) out.at(x, gap.y0 + k) = canvas.at(x, src_row);
  }
  return out;
}

}  // namespace

std::string_view to_string(GroupTag group) {
  switch (group) {
    case GroupTag::kHealthy: return "healthy";
    case GroupTag::kHealthy2: return "healthy2";
    case GroupTag::kLeftPar: return "leftpar";
    case GroupTag::kRightPar: return "rightpar";
  }
  return "healthy";
}

std::optional<GroupTag> parse_group(std::string_view text) {
  if (text == "healthy") return GroupTag::kHealthy;
  if (text == "healthy2") return GroupTag::kHealthy2;
  if (text == "leftpar") return GroupTag::kLeftPar;
  if (text == "rightpar") return GroupTag::kRightPar;
  return std::nullopt;
}

int binary_label(GroupTag group) noexcept {
  return group == GroupTag::kLeftPar || group == GroupTag::kRightPar ? kParalyzedLabel : kHealthyLabel;
}

void SquishParams::validate(int width) const {
  if (!(factor > 0.0 && factor < 1.0)) fail(ErrorKind::kInvalidArgument, "squish factor must lie in (0, 1)");
  if (strip < 1 || 4 * strip >= width) {
    fail(ErrorKind::kInvalidArgument, "seam strip must satisfy 1 <= strip < width/4");
  }
}

std::pair<GrayImage, GrayImage> split_halves(const GrayImage& img) {
  if (img.width() < 2) fail(ErrorKind::kInvalidArgument, "split_halves needs width >= 2");
  const int mid = img.width() / 2;
  return {crop(img, {0, 0, mid, img.height()}), crop(img, {mid, 0, img.width(), img.height()})};
}

GrayImage join_halves(const GrayImage& left, const GrayImage& right) {
  if (left.height() != right.height()) fail(ErrorKind::kInvalidArgument, "halves differ in height");
  GrayImage out(left.width() + right.width(), left.height());
  paste(out, left, 0, 0);
  paste(out, right, left.width(), 0);
  return out;
}

GrayImage compress_half(const GrayImage& half, double factor) {
  if (!(factor > 0.0 && factor < 1.0)) fail(ErrorKind::kInvalidArgument, "compression factor must lie in (0, 1)");
  const int h = round_half_up(factor * half.height());
  if (h < 1) fail(ErrorKind::kInvalidArgument, "compressed height rounds to zero");
  return resize_lanczos(half, half.width(), h);
}

GrayImage fill_gap(const GrayImage& canvas, const PixelRect& gap, const GrayImage& source_frame,
                   const PixelRect& roi) {
  if (gap.x0 < 0 || gap.y0 < 0 || gap.x1 > canvas.width() || gap.y1 > canvas.height() || gap.width() <= 0 ||
      gap.height() <= 0) {
    fail(ErrorKind::kInvalidArgument, "gap rectangle outside canvas");
  }
  if (roi.x0 < 0 || roi.y0 < 0 || roi.x1 > source_frame.width() || roi.y1 > source_frame.height() ||
      roi.width() <= 0 || roi.height() <= 0) {
    fail(ErrorKind::kInvalidArgument, "roi rectangle outside source frame");
  }
  const int rows_below = source_frame.height() - roi.y1;
  if (rows_below < kMinRowsBelowRoi) return mirror_fill(canvas, gap);

  const double sx = static_cast<double>(roi.width()) / canvas.width();
  const double sy = static_cast<double>(roi.height()) / canvas.height();
  PixelRect band;
  band.x0 = roi.x0 + round_half_up(gap.x0 * sx);
  band.x1 = std::max(band.x0 + 1, roi.x0 + round_half_up(gap.x1 * sx));
  band.x1 = std::min(band.x1, source_frame.width());
  band.x0 = std::min(band.x0, band.x1 - 1);
  band.y0 = roi.y1;
  band.y1 = roi.y1 + std::clamp(round_half_up(gap.height() * sy), 1, rows_below);

  const GrayImage patch = resize_lanczos(crop(source_frame, band), gap.width(), gap.height());
  GrayImage out = canvas;
  paste(out, patch, gap.x0, gap.y0);
  return out;
}

GrayImage seam_fill(const GrayImage& img, int seam_col, int strip) {
  const int left_anchor = seam_col - strip - 1;
  const int right_anchor = seam_col + strip;
  if (strip < 1 || left_anchor < 0 || right_anchor >= img.width()) {
    fail(ErrorKind::kInvalidArgument, "seam strip too close to the image border");
  }
  GrayImage out = img;
  const double span = right_anchor - left_anchor;
  for (int y = 0; y < img.height(); ++y) {
    const double lv = img.at(left_anchor, y);
    const double rv = img.at(right_anchor, y);
    for (int x = left_anchor + 1; x < right_anchor; ++x) {
      const double t = (x - left_anchor) / span;
      out.at(x, y) = lv + (rv - lv) * t;
    }
  }
  return out;
}

SynthSample make_paralyzed(const RoiInput& input, Side side, std::uint64_t seed, const SquishParams& params) {
  const GrayImage& roi_img = input.roi_image;
  params.validate(roi_img.width());
  auto [left, right] = split_halves(roi_img);
  GrayImage& target = side == Side::kLeft ? left : right;
  const int x_offset = side == Side::kLeft ? 0 : left.width();

  const GrayImage squeezed = compress_half(target, params.factor);
  GrayImage rebuilt = target;
  paste(rebuilt, squeezed, 0, 0);
  target = rebuilt;

  GrayImage canvas = join_halves(left, right);
  const PixelRect gap{x_offset, squeezed.height(), x_offset + target.width(), roi_img.height()};
  if (gap.height() > 0) canvas = fill_gap(canvas, gap, input.source_frame, input.roi);
  canvas = seam_fill(canvas, roi_img.width() / 2, params.strip);

  SynthSample s;
  s.image = std::move(canvas);
  s.label = kParalyzedLabel;
  s.group = side == Side::kLeft ? GroupTag::kLeftPar : GroupTag::kRightPar;
  s.source_frame = input.frame_id;
  s.seed = seed;
  return s;
}

SynthSample make_healthy2(const GrayImage& roi_image, std::string frame_id, std::uint64_t seed,
                          const SquishParams& params) {
  params.validate(roi_image.width());
  auto [left, right] = split_halves(roi_image);
  SynthSample s;
  s.image = seam_fill(join_halves(left, right), roi_image.width() / 2, params.strip);
  s.label = kHealthyLabel;
  s.group = GroupTag::kHealthy2;
  s.source_frame = std::move(frame_id);
  s.seed = seed;
  return s;
}

std::uint64_t item_seed(std::uint64_t seed, std::string_view frame_id) noexcept {
  return seed ^ fnv1a64(frame_id);
}

std::vector<SynthSample> build_groups(std::span<const RoiInput> inputs, std::uint64_t seed,
                                      const SquishParams& params) {
  if (inputs.empty()) fail(ErrorKind::kInvalidArgument, "build_groups needs at least one input");
  std::vector<SynthSample> out;
  out.reserve(4 * inputs.size());
  for (const RoiInput& in : inputs) {
    const std::uint64_t s = item_seed(seed, in.frame_id);
    out.push_back({in.roi_image, kHealthyLabel, GroupTag::kHealthy, in.frame_id, s});
    out.push_back(make_healthy2(in.roi_image, in.frame_id, s, params));
    out.push_back(make_paralyzed(in, Side::kLeft, s, params));
    out.push_back(make_paralyzed(in, Side::kRight, s, params));
  }
  return out;
}

}  // namespace vipr
