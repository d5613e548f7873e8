#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vipr/image.hpp"

namespace vipr {

enum class Side { kLeft, kRight };

enum class GroupTag { kHealthy, kHealthy2, kLeftPar, kRightPar };

std::string_view to_string(GroupTag group);
std::optional<GroupTag> parse_group(std::string_view text);
// 1 for leftpar/rightpar, 0 otherwise.
int binary_label(GroupTag group) noexcept;

inline constexpr int kHealthyLabel = 0;
inline constexpr int kParalyzedLabel = 1;

struct SquishParams {
  double factor = 0.75;  // vertical scale of the compressed half, in (0, 1)
  int strip = 6;         // columns replaced on each side of the seam

  void validate(int width) const;
};

struct SynthSample {
  GrayImage image;
  int label = kHealthyLabel;
  GroupTag group = GroupTag::kHealthy;
  std::string source_frame;
  std::uint64_t seed = 0;
};

/// A labelled ROI ready for synthesis: the 256x256 crop plus the frame and
/// pixel rectangle it came from (needed for gap filling).
struct RoiInput {
  GrayImage roi_image;
  GrayImage source_frame;
  PixelRect roi;
  std::string frame_id;
};

/// Left = columns [0, W/2), right = [W/2, W).
std::pair<GrayImage, GrayImage> split_halves(const GrayImage& img);
GrayImage join_halves(const GrayImage& left, const GrayImage& right);

/// Lanczos resize to (width, round(factor * height)); top-aligned content only.
GrayImage compress_half(const GrayImage& half, double factor);

/// Fills `gap` on the canvas with the band of `source_frame` directly below
/// `roi`. The band spans the gap's pre-image under the roi->canvas scaling
/// (same columns, same relative height) and is Lanczos-resampled into the gap.
/// With fewer than 4 rows below the roi the gap instead mirrors the canvas
/// rows immediately above it. Pixels outside `gap` are untouched.
GrayImage fill_gap(const GrayImage& canvas, const PixelRect& gap, const GrayImage& source_frame,
                   const PixelRect& roi);

/// Replaces columns [seam_col - strip, seam_col + strip) with the per-row
/// linear interpolation between anchor columns seam_col - strip - 1 and
/// seam_col + strip.
GrayImage seam_fill(const GrayImage& img, int seam_col, int strip);

/// Compress one half by `params.factor`, gap-fill beneath it, rejoin, and
/// repair the center seam.
SynthSample make_paralyzed(const RoiInput& input, Side side, std::uint64_t seed, const SquishParams& params = {});

/// Split and rejoin with the same seam repair, no compression.
SynthSample make_healthy2(const GrayImage& roi_image, std::string frame_id = {}, std::uint64_t seed = 0,
                          const SquishParams& params = {});

/// Per-item seed used by build_groups.
std::uint64_t item_seed(std::uint64_t seed, std::string_view frame_id) noexcept;

/// Four samples per input, in order healthy, healthy2, leftpar, rightpar.
std::vector<SynthSample> build_groups(std::span<const RoiInput> inputs, std::uint64_t seed,
                                      const SquishParams& params = {});

}  // namespace vipr
