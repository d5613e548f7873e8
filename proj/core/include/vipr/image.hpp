#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vipr {

/// Standard frame edge used throughout the pipeline.
inline constexpr int kStandardSize = 256;

/// Half-open integer pixel rectangle [x0, x1) x [y0, y1).
struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const noexcept { return x1 - x0; }
  int height() const noexcept { return y1 - y0; }
  bool contains(int x, int y) const noexcept { return x >= x0 && x < x1 && y >= y0 && y < y1; }
  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

/// Row-major single-channel raster with intensities in [0, 1].
///
/// Values are kept as doubles between PNG boundaries so chains of resampling
/// steps do not accumulate 8-bit quantization error.
class GrayImage {
 public:
  GrayImage() = default;
  // Throws kInvalidArgument for zero dimensions or a fill outside [0, 1].
  GrayImage(int width, int height, double fill = 0.0);
  // Takes ownership of pixels; validates length and range.
  GrayImage(int width, int height, std::vector<double> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }
  bool empty() const noexcept { return pixels_.empty(); }

  double at(int x, int y) const { return pixels_[index(x, y)]; }
  // Writers are responsible for keeping values inside [0, 1].
  double& at(int x, int y) { return pixels_[index(x, y)]; }

  std::span<const double> pixels() const noexcept { return pixels_; }
  std::span<double> pixels() noexcept { return pixels_; }
  std::span<const double> row(int y) const noexcept {
    return {pixels_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }
  std::span<double> row(int y) noexcept {
    return {pixels_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> pixels_;
};

/// Maps output coordinates (x, y) to source coordinates
/// (a*x + b*y + c, d*x + e*y + f). Pixel centers sit on integer coordinates.
struct AffineTransform {
  double a = 1, b = 0, c = 0;
  double d = 0, e = 1, f = 0;

  double determinant() const noexcept { return a * e - b * d; }

  static AffineTransform identity() noexcept { return {}; }
  // Content moves by (+dx, +dy).
  static AffineTransform translation(double dx, double dy) noexcept;
  // Content rotates counter-clockwise on screen (y axis pointing down) about
  // (cx, cy).
  static AffineTransform rotation(double degrees, double cx, double cy) noexcept;
  // Inverse of the forward map dest = center + linear * (src - center) + shift,
  // linear given row-major as {m00, m01, m10, m11}.
  static AffineTransform from_forward(const double (&linear)[4], double cx, double cy,
                                      double shift_x, double shift_y);
};

/// One output sample of a separable resampling pass.
struct ResampleTap {
  int first = 0;                 // unclamped source index of weights[0]
  std::vector<double> weights;   // normalized to sum 1
};

double lanczos3(double x) noexcept;

/// Lanczos-3 taps for each output index: source center (i + 0.5) * in/out - 0.5,
/// weights normalized per sample.
std::vector<ResampleTap> lanczos_taps(int in_size, int out_size);

/// Separable Lanczos-3 resize with clamp-to-edge; result clamped to [0, 1].
GrayImage resize_lanczos(const GrayImage& img, int out_w, int out_h);

GrayImage flip_horizontal(const GrayImage& img);

/// Bilinear warp; source coordinates outside the image produce `fill`.
GrayImage warp_affine(const GrayImage& img, const AffineTransform& t, double fill = 0.0);

/// Rotation about the image center ((W-1)/2, (H-1)/2), fill 0.
GrayImage rotate_about_center(const GrayImage& img, double degrees);

/// Copies the pixels of `rect`; throws kInvalidArgument if it leaves the image.
GrayImage crop(const GrayImage& img, const PixelRect& rect);

/// Writes `patch` with its top-left corner at (x, y).
void paste(GrayImage& dst, const GrayImage& patch, int x, int y);

}  // namespace vipr
