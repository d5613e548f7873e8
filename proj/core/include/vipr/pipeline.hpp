#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vipr/image.hpp"
#include "vipr/manifest.hpp"

namespace vipr {

// ---------------------------------------------------------------------------
// Y4M (YUV4MPEG2) frame source. Only the 8-bit luma plane is surfaced.

enum class Y4mColorspace { k420, k422, k444, kMono };

struct Y4mHeader {
  int width = 0;
  int height = 0;
  Y4mColorspace colorspace = Y4mColorspace::k420;
  std::string frame_rate = "25:1";

  // Bytes of chroma that follow each luma plane.
  std::size_t chroma_bytes() const noexcept;
};

/// Streaming reader; frames are decoded one at a time.
class Y4mReader {
 public:
  // Parses the stream header; throws kParse / kUnsupportedFormat.
  explicit Y4mReader(std::istream& in);

  const Y4mHeader& header() const noexcept { return header_; }
  // Next luma plane, or nullopt at a clean end of stream.
  std::optional<GrayImage> next();
  std::size_t frames_read() const noexcept { return frames_read_; }

 private:
  std::istream& in_;
  Y4mHeader header_;
  std::size_t frames_read_ = 0;
  std::uint64_t offset_ = 0;
  std::vector<std::uint8_t> buffer_;
};

std::vector<GrayImage> read_y4m_luma(std::istream& in);
std::vector<GrayImage> read_y4m_luma(std::string_view bytes);

/// Writes 8-bit frames; 4:2:0 output carries neutral (128) chroma.
void write_y4m(std::ostream& out, std::span<const GrayImage> frames,
               Y4mColorspace colorspace = Y4mColorspace::kMono);

// ---------------------------------------------------------------------------
// Frame extraction, anonymization, standardization.

struct ExtractionConfig {
  std::size_t stride = 20;
  std::size_t offset = 0;
};

/// True when frame `index` survives extraction (index >= offset and
/// index == offset mod stride). Throws kInvalidArgument for stride 0.
bool is_extracted(std::size_t index, const ExtractionConfig& cfg);

template <typename T>
std::vector<T> extract_every_nth(std::span<const T> frames, const ExtractionConfig& cfg) {
  std::vector<T> out;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (is_extracted(i, cfg)) out.push_back(frames[i]);
  }
  return out;
}

template <typename T>
std::vector<T> extract_every_nth(const std::vector<T>& frames, const ExtractionConfig& cfg) {
  return extract_every_nth(std::span<const T>(frames), cfg);
}

using MaskRegion = PixelRect;

/// Per-device anonymization config: `device = name` and repeated
/// `mask = x0,y0,x1,y1` lines; `#` starts a comment.
struct MaskConfig {
  std::string device;
  std::vector<MaskRegion> masks;
};

MaskConfig parse_mask_config(std::string_view text);

/// Zeroes every pixel covered by a mask (masks are clamped to the frame).
GrayImage anonymize(const GrayImage& img, std::span<const MaskRegion> masks);

/// Lanczos resize to the 256x256 standard frame.
GrayImage standardize(const GrayImage& img);

// ---------------------------------------------------------------------------
// Source-level train/val assignment.

/// Seeded FNV-1a key of a source id: FNV-1a over the seed's eight
/// little-endian bytes followed by the id bytes.
std::uint64_t split_hash(std::string_view source_id, std::uint64_t seed) noexcept;

/// With holdout sources: exactly those become val. Otherwise the
/// ceil(val_fraction * #sources) sources with the smallest split_hash (ties by
/// id) become val.
Manifest assign_splits(const Manifest& m, const std::optional<std::set<std::string>>& holdout_sources,
                       double val_fraction, std::uint64_t seed);

}  // namespace vipr
