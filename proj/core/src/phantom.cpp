#include "vipr/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vipr/error.hpp"
#include "vipr/rng.hpp"

namespace vipr {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kRoiMargin = 4.0;

void check_range(const Range& r, const char* name, double lo, double hi) {
  if (!(r.lo <= r.hi) || r.lo < lo || r.hi > hi) {
    fail(ErrorKind::kInvalidArgument, std::string("phantom ") + name + " range is invalid");
  }
}

double draw(RngStream& rng, const Range& r) { return rng.uniform(r.lo, r.hi); }

// Distance from p to segment ab and the signed offset across it (positive to
// the left of a->b).
void segment_coords(Point p, Point a, Point b, double* dist, double* across) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  const double t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  const double qx = a.x + t * dx - p.x, qy = a.y + t * dy - p.y;
  *dist = std::sqrt(qx * qx + qy * qy);
  *across = (dx * (p.y - a.y) - dy * (p.x - a.x)) / std::sqrt(len2);
}

double smoothstep(double e0, double e1, double x) {
  const double t = std::clamp((x - e0) / (e1 - e0), 0.0, 1.0);
  return t * t * (3 - 2 * t);
}

struct RoiBox {
  double x0, y0, x1, y1;
};

RoiBox cord_extent(const PhantomGeometry& g) {
  const double hw = g.cord_width / 2 + kRoiMargin;
  return {std::min({g.apex.x, g.left_end.x, g.right_end.x}) - hw, g.apex.y - hw,
          std::max({g.apex.x, g.left_end.x, g.right_end.x}) + hw, std::max(g.left_end.y, g.right_end.y) + hw};
}

void paint_cord(GrayImage& img, Point a, Point b, double width, double level, double edge_w, double edge_level,
                bool medial_is_left) {
  const double hw = width / 2;
  const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - hw - 1)));
  const int x1 = std::min(img.width() - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + hw + 1)));
  const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - hw - 1)));
  const int y1 = std::min(img.height() - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + hw + 1)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      double dist = 0, across = 0;
      segment_coords({double(x), double(y)}, a, b, &dist, &across);
      const double cover = std::clamp(hw - dist + 0.5, 0.0, 1.0);
      if (cover <= 0) continue;
      const double medial = medial_is_left ? across : -across;
      const double v = medial > hw - edge_w ? edge_level : level;
      double& p = img.at(x, y);
      p = p * (1 - cover) + v * cover;
    }
  }
}

void paint_blob(GrayImage& img, Point c, double radius, double level) {
  const int x0 = std::max(0, static_cast<int>(c.x - 2 * radius));
  const int x1 = std::min(img.width() - 1, static_cast<int>(c.x + 2 * radius));
  const int y0 = std::max(0, static_cast<int>(c.y - 2 * radius));
  const int y1 = std::min(img.height() - 1, static_cast<int>(c.y + 2 * radius));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double dx = (x - c.x) / radius, dy = (y - c.y) / (0.7 * radius);
      const double w = std::exp(-(dx * dx + dy * dy));
      double& p = img.at(x, y);
      p = p * (1 - w) + level * w;
    }
  }
}

}  // namespace

void PhantomParams::validate() const {
  if (width < 64 || height < 64) fail(ErrorKind::kInvalidArgument, "phantom frame must be at least 64x64");
  check_range(commissure_x, "commissure_x", 0.0, 1.0);
  check_range(commissure_y, "commissure_y", 0.0, 1.0);
  check_range(cord_length, "cord_length", 1.0, 1e6);
  check_range(cord_angle, "cord_angle", 1.0, 80.0);
  check_range(cord_width, "cord_width", 1.0, 1e6);
  check_range(cord_intensity, "cord_intensity", 0.0, 1.0);
  check_range(arytenoid_radius, "arytenoid_radius", 0.5, 1e6);
  check_range(arytenoid_intensity, "arytenoid_intensity", 0.0, 1.0);
  for (double v : {background, tissue, edge_intensity, text_intensity}) {
    if (!(v >= 0.0 && v <= 1.0)) fail(ErrorKind::kInvalidArgument, "phantom intensities must lie in [0, 1]");
  }
  if (!(speckle >= 0.0)) fail(ErrorKind::kInvalidArgument, "speckle must be non-negative");
  if (!(edge_width >= 0.0)) fail(ErrorKind::kInvalidArgument, "edge width must be non-negative");
  if (asymmetry && !(asymmetry->fraction >= 0.0 && asymmetry->fraction < 1.0)) {
    fail(ErrorKind::kInvalidArgument, "asymmetry fraction must lie in [0, 1)");
  }
  if (text_band) {
    const PixelRect& t = *text_band;
    if (t.x0 < 0 || t.y0 < 0 || t.x1 > width || t.y1 > height || t.x0 >= t.x1 || t.y0 >= t.y1) {
      fail(ErrorKind::kInvalidArgument, "text band must be a non-empty rectangle inside the frame");
    }
  }
  // Worst case: longest, widest cords at the steepest spread from the extreme
  // commissure positions, plus the arytenoid blob below the cord end.
  const double hw = cord_width.hi / 2 + kRoiMargin;
  const double reach_x = cord_length.hi * std::sin(cord_angle.hi * kDeg) + hw;
  const double reach_y = cord_length.hi * std::cos(cord_angle.lo * kDeg) + std::max(hw, 3 * arytenoid_radius.hi);
  if (commissure_x.lo * width - reach_x < 0 || commissure_x.hi * width + reach_x > width ||
      commissure_y.lo * height - hw < 0 || commissure_y.hi * height + reach_y > height) {
    fail(ErrorKind::kInvalidArgument, "phantom geometry ranges cannot fit a " + std::to_string(width) + "x" +
                                          std::to_string(height) + " frame");
  }
}

double PhantomGeometry::left_length() const noexcept { return std::hypot(left_end.x - apex.x, left_end.y - apex.y); }
double PhantomGeometry::right_length() const noexcept {
  return std::hypot(right_end.x - apex.x, right_end.y - apex.y);
}

PhantomGeometry sample_geometry(const PhantomParams& params, std::uint64_t seed) {
  params.validate();
  RngStream rng(derive_key({seed, 0x9e0ULL}));
  PhantomGeometry g;
  g.apex = {draw(rng, params.commissure_x) * params.width, draw(rng, params.commissure_y) * params.height};
  const double length = draw(rng, params.cord_length);
  const double left_angle = draw(rng, params.cord_angle) * kDeg;
  const double right_angle = draw(rng, params.cord_angle) * kDeg;
  g.cord_width = draw(rng, params.cord_width);
  g.left_intensity = draw(rng, params.cord_intensity);
  g.right_intensity = draw(rng, params.cord_intensity);
  g.arytenoid_radius = draw(rng, params.arytenoid_radius);
  g.arytenoid_intensity = draw(rng, params.arytenoid_intensity);
  double left_len = length, right_len = length;
  if (params.asymmetry) {
    (params.asymmetry->side == Side::kLeft ? left_len : right_len) *= 1.0 - params.asymmetry->fraction;
  }
  g.left_end = {g.apex.x - left_len * std::sin(left_angle), g.apex.y + left_len * std::cos(left_angle)};
  g.right_end = {g.apex.x + right_len * std::sin(right_angle), g.apex.y + right_len * std::cos(right_angle)};
  return g;
}

PhantomFrame render_phantom(const PhantomParams& params, const PhantomGeometry& g, std::uint64_t seed) {
  params.validate();
  const int W = params.width, H = params.height;
  GrayImage img(W, H, params.background);

  // Laryngeal window: soft ellipse around the cords.
  const double ecx = g.apex.x, ecy = (g.apex.y + std::max(g.left_end.y, g.right_end.y)) / 2;
  const double erx = 0.45 * W, ery = 0.48 * H;
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const double r = std::hypot((x - ecx) / erx, (y - ecy) / ery);
      const double w = 1.0 - smoothstep(0.8, 1.0, r);
      img.at(x, y) = params.background + (params.tissue - params.background) * w;
    }
  }
  // Thyroid cartilage: a faint bright arc above the commissure.
  paint_cord(img, {g.apex.x - 0.35 * W, g.apex.y - 0.02 * H}, {g.apex.x, g.apex.y - 0.12 * H}, 6.0, 0.6, 0.0, 0.6,
             true);
  paint_cord(img, {g.apex.x, g.apex.y - 0.12 * H}, {g.apex.x + 0.35 * W, g.apex.y - 0.02 * H}, 6.0, 0.6, 0.0, 0.6,
             true);

  const double ary_drop = 1.2 * g.arytenoid_radius;
  paint_blob(img, {g.left_end.x, g.left_end.y + ary_drop}, g.arytenoid_radius, g.arytenoid_intensity);
  paint_blob(img, {g.right_end.x, g.right_end.y + ary_drop}, g.arytenoid_radius, g.arytenoid_intensity);
  // Walking apex->end, the interior of the V lies to the left of the left cord
  // and to the right of the right cord.
  paint_cord(img, g.apex, g.left_end, g.cord_width, g.left_intensity, params.edge_width, params.edge_intensity, true);
  paint_cord(img, g.apex, g.right_end, g.cord_width, g.right_intensity, params.edge_width, params.edge_intensity,
             false);

  const CounterRng speckle(derive_key({seed, 0x5eedULL}));
  auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = std::clamp(px[i] * (1.0 + params.speckle * speckle.normal(i)), 0.0, 1.0);
  }

  if (params.text_band) {
    const PixelRect& band = *params.text_band;
    RngStream glyphs(derive_key({seed, 0x7e47ULL}));
    const int gh = band.y1 - band.y0;
    int x = band.x0;
    while (true) {
      const int gw = 4 + static_cast<int>(glyphs.below(7));
      if (x + gw > band.x1) break;
      const int top = band.y0 + static_cast<int>(glyphs.below(static_cast<std::uint64_t>(std::max(1, gh / 4))));
      for (int y = top; y < band.y1; ++y) {
        for (int xx = x; xx < x + gw; ++xx) img.at(xx, y) = params.text_intensity;
      }
      x += gw + 2 + static_cast<int>(glyphs.below(5)) + (glyphs.below(6) == 0 ? 8 : 0);
    }
  }

  PhantomFrame f;
  const RoiBox e = cord_extent(g);
  f.roi_pixels = {std::max(0, static_cast<int>(std::floor(e.x0))), std::max(0, static_cast<int>(std::floor(e.y0))),
                  std::min(W, static_cast<int>(std::ceil(e.x1))), std::min(H, static_cast<int>(std::ceil(e.y1)))};
  const PixelRect& r = f.roi_pixels;
  f.roi = {0, (r.x0 + r.x1) / (2.0 * W), (r.y0 + r.y1) / (2.0 * H), double(r.x1 - r.x0) / W,
           double(r.y1 - r.y0) / H};
  f.image = std::move(img);
  f.geometry = g;
  f.params = params;
  f.seed = seed;
  return f;
}

PhantomFrame generate_phantom(const PhantomParams& params, std::uint64_t seed) {
  return render_phantom(params, sample_geometry(params, seed), seed);
}

std::vector<PhantomFrame> generate_sequence(const PhantomParams& params, std::uint64_t seed, int n, double jitter) {
  if (n < 1) fail(ErrorKind::kInvalidArgument, "sequence needs at least one frame");
  if (!(jitter >= 0.0 && jitter < 0.5)) fail(ErrorKind::kInvalidArgument, "jitter must lie in [0, 0.5)");
  const PhantomGeometry base = sample_geometry(params, seed);
  RngStream rng(derive_key({seed, 0x5e0ULL}));
  const double wx = rng.uniform(0.05, 0.15), wy = rng.uniform(0.05, 0.15), wl = rng.uniform(0.05, 0.15);
  std::vector<PhantomFrame> frames;
  frames.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double dx = jitter * params.width * std::sin(wx * k);
    const double dy = jitter * params.height * std::sin(wy * k);
    const double scale = 1.0 + jitter * std::sin(wl * k);
    PhantomGeometry g = base;
    g.apex = {base.apex.x + dx, base.apex.y + dy};
    g.left_end = {g.apex.x + (base.left_end.x - base.apex.x) * scale, g.apex.y + (base.left_end.y - base.apex.y) * scale};
    g.right_end = {g.apex.x + (base.right_end.x - base.apex.x) * scale,
                   g.apex.y + (base.right_end.y - base.apex.y) * scale};
    frames.push_back(render_phantom(params, g, seed));
  }
  return frames;
}

std::optional<Asymmetry> parse_asymmetry(const std::string& text) {
  if (text.empty() || text == "none") return std::nullopt;
  const auto colon = text.find(':');
  const std::string side = text.substr(0, colon);
  Asymmetry a;
  if (side == "left") {
    a.side = Side::kLeft;
  } else if (side == "right") {
    a.side = Side::kRight;
  } else {
    fail(ErrorKind::kInvalidArgument, "asymmetry must be left|right[:fraction], got '" + text + "'");
  }
  if (colon != std::string::npos) {
    try {
      std::size_t used = 0;
      a.fraction = std::stod(text.substr(colon + 1), &used);
      if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      fail(ErrorKind::kInvalidArgument, "bad asymmetry fraction in '" + text + "'");
    }
  }
  if (!(a.fraction >= 0.0 && a.fraction < 1.0)) fail(ErrorKind::kInvalidArgument, "asymmetry fraction must lie in [0, 1)");
  return a;
}

}  // namespace vipr
