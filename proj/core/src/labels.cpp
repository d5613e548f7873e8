#include "vipr/labels.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vipr/error.hpp"

namespace vipr {
namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  fail(ErrorKind::kParse, "yolo label line " + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

double parse_real(std::string_view tok, std::size_t line) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    parse_fail(line, "non-numeric token '" + std::string(tok) + "'");
  }
  return v;
}

long round_half_up(double v) { return static_cast<long>(std::floor(v + 0.5)); }

}  // namespace

void BBox::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorKind::kInvalidArgument, "bbox " + what); };
  if (class_id < 0) bad("class id is negative");
  if (!(cx >= 0 && cx <= 1 && cy >= 0 && cy <= 1)) bad("center outside [0,1]");
  if (!(w > 0 && w <= 1 && h > 0 && h <= 1)) bad("size outside (0,1]");
  if (x_min() < -kBoxEdgeTolerance || x_max() > 1 + kBoxEdgeTolerance || y_min() < -kBoxEdgeTolerance ||
      y_max() > 1 + kBoxEdgeTolerance) {
    bad("extends outside the image");
  }
}

std::vector<BBox> parse_yolo_label(std::string_view text) {
  std::vector<BBox> boxes;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    const std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    const auto tokens = split_ws(line);
    if (tokens.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (tokens.size() != 5) {
      parse_fail(line_no, "expected 5 tokens, got " + std::to_string(tokens.size()));
    }
    int cls = 0;
    const auto [ptr, ec] = std::from_chars(tokens[0].data(), tokens[0].data() + tokens[0].size(), cls);
    if (ec != std::errc() || ptr != tokens[0].data() + tokens[0].size()) {
      parse_fail(line_no, "non-numeric class id '" + std::string(tokens[0]) + "'");
    }
    BBox b{cls, parse_real(tokens[1], line_no), parse_real(tokens[2], line_no), parse_real(tokens[3], line_no),
           parse_real(tokens[4], line_no)};
    try {
      b.validate();
    } catch (const Error& e) {
      parse_fail(line_no, std::string("out-of-range coordinate (") + e.message() + ")");
    }
    boxes.push_back(b);
    if (end == text.size()) break;
  }
  return boxes;
}

std::string serialize_yolo_label(const std::vector<BBox>& boxes) {
  std::string out;
  char buf[128];
  for (const BBox& b : boxes) {
    std::snprintf(buf, sizeof(buf), "%d %.6f %.6f %.6f %.6f\n", b.class_id, b.cx, b.cy, b.w, b.h);
    out += buf;
  }
  return out;
}

std::vector<BBox> read_yolo_label_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open label file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_yolo_label(ss.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.message());
  }
}

void write_yolo_label_file(const std::string& path, const std::vector<BBox>& boxes) {
  const std::filesystem::path fp(path);
  if (fp.has_parent_path()) std::filesystem::create_directories(fp.parent_path());
  std::ofstream out(fp, std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write label file " + path);
  out << serialize_yolo_label(boxes);
}

PixelRect to_pixel_rect(const BBox& box, int width, int height) {
  box.validate();
  if (width < 1 || height < 1) fail(ErrorKind::kInvalidArgument, "image dimensions must be positive");
  auto edge = [](double v, int extent) {
    return static_cast<int>(std::clamp<long>(round_half_up(v * extent), 0, extent));
  };
  PixelRect r{edge(box.x_min(), width), edge(box.y_min(), height), edge(box.x_max(), width),
              edge(box.y_max(), height)};
  if (r.x1 <= r.x0 || r.y1 <= r.y0) {
    fail(ErrorKind::kDegenerateRoi, "box collapses to zero pixel area on a " + std::to_string(width) + "x" +
                                        std::to_string(height) + " image");
  }
  return r;
}

GrayImage crop_to_roi(const GrayImage& img, const BBox& box) {
  const PixelRect r = to_pixel_rect(box, img.width(), img.height());
  return resize_lanczos(crop(img, r), kStandardSize, kStandardSize);
}

}  // namespace vipr
