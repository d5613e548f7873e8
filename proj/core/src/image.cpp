#include "vipr/image.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "vipr/error.hpp"

namespace vipr {
namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    fail(ErrorKind::kInvalidArgument,
         "image dimensions must be positive, got " + std::to_string(width) + "x" + std::to_string(height));
  }
}

}  // namespace

GrayImage::GrayImage(int width, int height, double fill) : width_(width), height_(height) {
  check_dims(width, height);
  if (!(fill >= 0.0 && fill <= 1.0)) fail(ErrorKind::kInvalidArgument, "fill intensity outside [0,1]");
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dims(width, height);
  if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    fail(ErrorKind::kInvalidArgument, "pixel buffer length " + std::to_string(pixels_.size()) +
                                          " does not match " + std::to_string(width) + "x" +
                                          std::to_string(height));
  }
  for (double p : pixels_) {
    if (!(p >= 0.0 && p <= 1.0)) fail(ErrorKind::kInvalidArgument, "pixel intensity outside [0,1]");
  }
}

AffineTransform AffineTransform::translation(double dx, double dy) noexcept {
  return {1, 0, -dx, 0, 1, -dy};
}

AffineTransform AffineTransform::rotation(double degrees, double cx, double cy) noexcept {
  const double rad = degrees * std::numbers::pi / 180.0;
  const double cs = std::cos(rad);
  const double sn = std::sin(rad);
  AffineTransform t{cs, -sn, 0, sn, cs, 0};
  t.c = cx - t.a * cx - t.b * cy;
  t.f = cy - t.d * cx - t.e * cy;
  return t;
}

AffineTransform AffineTransform::from_forward(const double (&linear)[4], double cx, double cy,
                                              double shift_x, double shift_y) {
  const double det = linear[0] * linear[3] - linear[1] * linear[2];
  if (det == 0.0) fail(ErrorKind::kInvalidArgument, "singular affine transform");
  const double i00 = linear[3] / det;
  const double i01 = -linear[1] / det;
  const double i10 = -linear[2] / det;
  const double i11 = linear[0] / det;
  const double ox = cx + shift_x;
  const double oy = cy + shift_y;
  return {i00, i01, cx - i00 * ox - i01 * oy, i10, i11, cy - i10 * ox - i11 * oy};
}

double lanczos3(double x) noexcept {
  if (x == 0.0) return 1.0;
  const double ax = std::abs(x);
  if (ax >= 3.0) return 0.0;
  const double px = std::numbers::pi * x;
  return 3.0 * std::sin(px) * std::sin(px / 3.0) / (px * px);
}

std::vector<ResampleTap> lanczos_taps(int in_size, int out_size) {
  if (in_size < 1 || out_size < 1) fail(ErrorKind::kInvalidArgument, "resample sizes must be positive");
  const double scale = static_cast<double>(in_size) / static_cast<double>(out_size);
  std::vector<ResampleTap> taps(static_cast<std::size_t>(out_size));
  for (int i = 0; i < out_size; ++i) {
    const double center = (i + 0.5) * scale - 0.5;
    const int first = static_cast<int>(std::floor(center - 3.0)) + 1;
    const int last = static_cast<int>(std::ceil(center + 3.0)) - 1;
    ResampleTap& tap = taps[static_cast<std::size_t>(i)];
    tap.first = first;
    tap.weights.reserve(static_cast<std::size_t>(last - first + 1));
    double sum = 0.0;
    for (int j = first; j <= last; ++j) {
      const double w = lanczos3(j - center);
      tap.weights.push_back(w);
      sum += w;
    }
    for (double& w : tap.weights) w /= sum;
  }
  return taps;
}

namespace {

// Sums are taken relative to the heaviest tap's sample so constant regions
// come out exact despite rounding in the normalized weights.
std::size_t peak_tap(const ResampleTap& tap) {
  return static_cast<std::size_t>(std::max_element(tap.weights.begin(), tap.weights.end()) - tap.weights.begin());
}

int tap_source(const ResampleTap& tap, std::size_t k, int size) {
  return std::clamp(tap.first + static_cast<int>(k), 0, size - 1);
}

}  // namespace

GrayImage resize_lanczos(const GrayImage& img, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1) {
    fail(ErrorKind::kInvalidArgument,
         "resize target must be positive, got " + std::to_string(out_w) + "x" + std::to_string(out_h));
  }
  const int in_w = img.width();
  const int in_h = img.height();
  const auto htaps = lanczos_taps(in_w, out_w);
  const auto vtaps = lanczos_taps(in_h, out_h);
  std::vector<std::size_t> hpeak;
  for (const ResampleTap& tap : htaps) hpeak.push_back(peak_tap(tap));

  // Horizontal pass into an unclamped intermediate.
  std::vector<double> tmp(static_cast<std::size_t>(out_w) * static_cast<std::size_t>(in_h));
  for (int y = 0; y < in_h; ++y) {
    const auto src = img.row(y);
    double* dst = tmp.data() + static_cast<std::size_t>(y) * out_w;
    for (int x = 0; x < out_w; ++x) {
      const ResampleTap& tap = htaps[static_cast<std::size_t>(x)];
      const double base = src[static_cast<std::size_t>(tap_source(tap, hpeak[static_cast<std::size_t>(x)], in_w))];
      double acc = 0.0;
      for (std::size_t k = 0; k < tap.weights.size(); ++k) {
        acc += tap.weights[k] * (src[static_cast<std::size_t>(tap_source(tap, k, in_w))] - base);
      }
      dst[x] = base + acc;
    }
  }

  GrayImage out(out_w, out_h);
  std::vector<double> acc(static_cast<std::size_t>(out_w));
  for (int y = 0; y < out_h; ++y) {
    const ResampleTap& tap = vtaps[static_cast<std::size_t>(y)];
    const double* base = tmp.data() + static_cast<std::size_t>(tap_source(tap, peak_tap(tap), in_h)) * out_w;
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t k = 0; k < tap.weights.size(); ++k) {
      const double w = tap.weights[k];
      const double* src = tmp.data() + static_cast<std::size_t>(tap_source(tap, k, in_h)) * out_w;
      for (int x = 0; x < out_w; ++x) acc[static_cast<std::size_t>(x)] += w * (src[x] - base[x]);
    }
    auto dst = out.row(y);
    for (int x = 0; x < out_w; ++x) {
      dst[static_cast<std::size_t>(x)] = std::clamp(base[x] + acc[static_cast<std::size_t>(x)], 0.0, 1.0);
    }
  }
  return out;
}

GrayImage flip_horizontal(const GrayImage& img) {
  GrayImage out = img;
  for (int y = 0; y < out.height(); ++y) {
    auto r = out.row(y);
    std::reverse(r.begin(), r.end());
  }
  return out;
}

GrayImage warp_affine(const GrayImage& img, const AffineTransform& t, double fill) {
  if (t.determinant() == 0.0 || !std::isfinite(t.determinant())) {
    fail(ErrorKind::kInvalidArgument, "warp_affine requires an invertible transform");
  }
  constexpr double kEdge = 1e-9;
  const int w = img.width();
  const int h = img.height();
  const double max_x = w - 1;
  const double max_y = h - 1;
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    auto dst = out.row(y);
    for (int x = 0; x < w; ++x) {
      double sx = t.a * x + t.b * y + t.c;
      double sy = t.d * x + t.e * y + t.f;
      if (sx < -kEdge || sy < -kEdge || sx > max_x + kEdge || sy > max_y + kEdge) {
        dst[static_cast<std::size_t>(x)] = fill;
        continue;
      }
      sx = std::clamp(sx, 0.0, max_x);
      sy = std::clamp(sy, 0.0, max_y);
      const int x0 = static_cast<int>(std::floor(sx));
      const int y0 = static_cast<int>(std::floor(sy));
      const int x1 = std::min(x0 + 1, w - 1);
      const int y1 = std::min(y0 + 1, h - 1);
      const double fx = sx - x0;
      const double fy = sy - y0;
      const double top = (1.0 - fx) * img.at(x0, y0) + fx * img.at(x1, y0);
      const double bottom = (1.0 - fx) * img.at(x0, y1) + fx * img.at(x1, y1);
      dst[static_cast<std::size_t>(x)] = std::clamp((1.0 - fy) * top + fy * bottom, 0.0, 1.0);
    }
  }
  return out;
}

GrayImage rotate_about_center(const GrayImage& img, double degrees) {
  const double cx = (img.width() - 1) / 2.0;
  const double cy = (img.height() - 1) / 2.0;
  return warp_affine(img, AffineTransform::rotation(degrees, cx, cy), 0.0);
}

GrayImage crop(const GrayImage& img, const PixelRect& rect) {
  if (rect.x0 < 0 || rect.y0 < 0 || rect.x1 > img.width() || rect.y1 > img.height() || rect.width() <= 0 ||
      rect.height() <= 0) {
    fail(ErrorKind::kInvalidArgument, "crop rectangle outside image or empty");
  }
  GrayImage out(rect.width(), rect.height());
  for (int y = 0; y < rect.height(); ++y) {
    const auto src = img.row(rect.y0 + y).subspan(static_cast<std::size_t>(rect.x0), static_cast<std::size_t>(rect.width()));
    std::copy(src.begin(), src.end(), out.row(y).begin());
  }
  return out;
}

void paste(GrayImage& dst, const GrayImage& patch, int x, int y) {
  if (x < 0 || y < 0 || x + patch.width() > dst.width() || y + patch.height() > dst.height()) {
    fail(ErrorKind::kInvalidArgument, "paste target outside image");
  }
  for (int r = 0; r < patch.height(); ++r) {
    const auto src = patch.row(r);
    std::copy(src.begin(), src.end(), dst.row(y + r).begin() + x);
  }
}

}  // namespace vipr
