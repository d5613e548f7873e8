#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vipr/image.hpp"
#include "vipr/labels.hpp"
#include "vipr/synthesis.hpp"

namespace vipr {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct Asymmetry {
  Side side = Side::kRight;  // image side, as in synthesis
  double fraction = 0.25;    // cord length reduction
};

struct PhantomParams {
  int width = 512;
  int height = 448;

  double background = 0.10;
  double tissue = 0.38;  // mean level inside the laryngeal window

  // Commissure position as a fraction of the frame.
  Range commissure_x{0.44, 0.56};
  Range commissure_y{0.16, 0.26};

  Range cord_length{150.0, 200.0};     // px
  Range cord_angle{20.0, 32.0};        // degrees from vertical
  Range cord_width{14.0, 20.0};        // px
  Range cord_intensity{0.05, 0.12};
  double edge_width = 3.0;             // bright medial rim, px
  double edge_intensity = 0.80;

  Range arytenoid_radius{12.0, 18.0};  // px
  Range arytenoid_intensity{0.75, 0.95};

  double speckle = 0.22;  // std-dev of the multiplicative noise

  std::optional<PixelRect> text_band = PixelRect{8, 6, 260, 26};
  double text_intensity = 0.97;

  std::optional<Asymmetry> asymmetry;

  void validate() const;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Analytic geometry a frame was rendered from.
struct PhantomGeometry {
  Point apex;
  Point left_end;
  Point right_end;
  double cord_width = 0.0;
  double left_intensity = 0.0;
  double right_intensity = 0.0;
  double arytenoid_radius = 0.0;
  double arytenoid_intensity = 0.0;

  double left_length() const noexcept;
  double right_length() const noexcept;
};

struct PhantomFrame {
  GrayImage image;
  BBox roi;
  PixelRect roi_pixels;
  PhantomGeometry geometry;
  PhantomParams params;
  std::uint64_t seed = 0;
};

PhantomGeometry sample_geometry(const PhantomParams& params, std::uint64_t seed);

/// Renders `geometry`; speckle and text glyphs are keyed by `seed`.
PhantomFrame render_phantom(const PhantomParams& params, const PhantomGeometry& geometry, std::uint64_t seed);

PhantomFrame generate_phantom(const PhantomParams& params, std::uint64_t seed);

/// Frame k shifts the commissure by up to `jitter` of the frame size and
/// scales cord length by up to 1 +- jitter along slow sinusoids that vanish at
/// k = 0. Speckle is shared by every frame.
std::vector<PhantomFrame> generate_sequence(const PhantomParams& params, std::uint64_t seed, int n, double jitter);

std::optional<Asymmetry> parse_asymmetry(const std::string& text);  // "left:0.25"

}  // namespace vipr
