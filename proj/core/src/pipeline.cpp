#include "vipr/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "vipr/error.hpp"
#include "vipr/rng.hpp"

namespace vipr {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

bool is_extracted(std::size_t index, const ExtractionConfig& cfg) {
  if (cfg.stride == 0) fail(ErrorKind::kInvalidArgument, "extraction stride must be >= 1");
  return index >= cfg.offset && (index - cfg.offset) % cfg.stride == 0;
}

MaskConfig parse_mask_config(std::string_view text) {
  MaskConfig cfg;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorKind::kParse, "mask config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "device") {
      cfg.device = value;
    } else if (key == "mask") {
      MaskRegion r;
      char c1 = 0, c2 = 0, c3 = 0;
      std::istringstream vs(value);
      if (!(vs >> r.x0 >> c1 >> r.y0 >> c2 >> r.x1 >> c3 >> r.y1) || c1 != ',' || c2 != ',' || c3 != ',' ||
          !(vs >> std::ws).eof()) {
        fail(ErrorKind::kParse, "mask config line " + std::to_string(line_no) + ": expected mask = x0,y0,x1,y1");
      }
      if (r.x1 <= r.x0 || r.y1 <= r.y0) {
        fail(ErrorKind::kParse, "mask config line " + std::to_string(line_no) + ": empty mask rectangle");
      }
      cfg.masks.push_back(r);
    } else {
      fail(ErrorKind::kParse, "mask config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

GrayImage anonymize(const GrayImage& img, std::span<const MaskRegion> masks) {
  GrayImage out = img;
  for (const MaskRegion& m : masks) {
    const int x0 = std::clamp(m.x0, 0, img.width());
    const int x1 = std::clamp(m.x1, 0, img.width());
    const int y0 = std::clamp(m.y0, 0, img.height());
    const int y1 = std::clamp(m.y1, 0, img.height());
    for (int y = y0; y < y1; ++y) {
      auto r = out.row(y);
      std::fill(r.begin() + x0, r.begin() + std::max(x0, x1), 0.0);
    }
  }
  return out;
}

GrayImage standardize(const GrayImage& img) { return resize_lanczos(img, kStandardSize, kStandardSize); }

std::uint64_t split_hash(std::string_view source_id, std::uint64_t seed) noexcept {
  char seed_bytes[8];
  for (int i = 0; i < 8; ++i) seed_bytes[i] = static_cast<char>((seed >> (8 * i)) & 0xff);
  return fnv1a64(source_id, fnv1a64(std::string_view(seed_bytes, 8)));
}

Manifest assign_splits(const Manifest& m, const std::optional<std::set<std::string>>& holdout_sources,
                       double val_fraction, std::uint64_t seed) {
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) {
    fail(ErrorKind::kInvalidArgument, "val_fraction must lie in [0, 1)");
  }
  std::set<std::string> sources;
  for (const FrameRecord& r : m.records) sources.insert(r.source_id);

  std::set<std::string> val;
  if (holdout_sources) {
    for (const std::string& s : *holdout_sources) {
      if (!sources.contains(s)) fail(ErrorKind::kValidation, "holdout source '" + s + "' is not in the manifest");
    }
    val = *holdout_sources;
  } else {
    std::vector<std::pair<std::uint64_t, std::string>> keyed;
    for (const std::string& s : sources) keyed.emplace_back(split_hash(s, seed), s);
    std::sort(keyed.begin(), keyed.end());
    // Guard against 0.1 * 30 = 3.0000000000000004 rounding up to 4.
    const double want = val_fraction * static_cast<double>(sources.size());
    const auto n_val = static_cast<std::size_t>(std::ceil(want - 1e-9));
    for (std::size_t i = 0; i < n_val && i < keyed.size(); ++i) val.insert(keyed[i].second);
  }

  Manifest out = m;
  for (FrameRecord& r : out.records) r.split = val.contains(r.source_id) ? Split::kVal : Split::kTrain;
  validate_manifest(out);
  return out;
}

}  // namespace vipr
