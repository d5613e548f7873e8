#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "vipr/image.hpp"

namespace vipr {

/// Normalized YOLO box: center, width and height as fractions of the image.
struct BBox {
  int class_id = 0;
  double cx = 0.5;
  double cy = 0.5;
  double w = 1.0;
  double h = 1.0;

  double x_min() const noexcept { return cx - w / 2; }
  double x_max() const noexcept { return cx + w / 2; }
  double y_min() const noexcept { return cy - h / 2; }
  double y_max() const noexcept { return cy + h / 2; }

  // Throws kInvalidArgument when a range or containment invariant fails.
  void validate() const;

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Tolerance for a box poking past the image border.
inline constexpr double kBoxEdgeTolerance = 1e-6;

/// One "class cx cy w h" line per box; blank lines skipped. Errors report the
/// 1-based line number.
std::vector<BBox> parse_yolo_label(std::string_view text);

/// Six decimals per coordinate, one line per box, each newline-terminated.
std::string serialize_yolo_label(const std::vector<BBox>& boxes);

std::vector<BBox> read_yolo_label_file(const std::string& path);
void write_yolo_label_file(const std::string& path, const std::vector<BBox>& boxes);

/// Rounds each edge half-up and clamps to the image; zero area raises
/// kDegenerateRoi.
PixelRect to_pixel_rect(const BBox& box, int width, int height);

/// Box -> pixel rect -> crop -> Lanczos back to the 256x256 standard.
GrayImage crop_to_roi(const GrayImage& img, const BBox& box);

}  // namespace vipr
