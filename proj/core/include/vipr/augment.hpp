#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "vipr/synthesis.hpp"

namespace vipr {

/// The eight expansion recipes; names list the transforms in application order.
enum class AugmentRecipe : std::uint8_t {
  kIdentity,
  kRot,
  kFlip,
  kAffine,
  kRotFlip,
  kAffineRot,
  kAffineFlip,
  kAffineRotFlip,
};

inline constexpr std::array<AugmentRecipe, 8> kAllRecipes = {
    AugmentRecipe::kIdentity,  AugmentRecipe::kRot,       AugmentRecipe::kFlip,
    AugmentRecipe::kAffine,    AugmentRecipe::kRotFlip,   AugmentRecipe::kAffineRot,
    AugmentRecipe::kAffineFlip, AugmentRecipe::kAffineRotFlip,
};

std::string_view to_string(AugmentRecipe recipe);
bool has_flip(AugmentRecipe recipe) noexcept;
bool has_rotation(AugmentRecipe recipe) noexcept;
bool has_affine(AugmentRecipe recipe) noexcept;

struct AugmentParams {
  double max_rotation_deg = 10.0;
  double translate_frac = 0.05;
  double scale_min = 0.95;
  double scale_max = 1.05;
  double shear_max_deg = 5.0;

  void validate() const;
};

/// Applies `recipe` with parameters drawn from a counter-based stream keyed by
/// (seed, sample_index, recipe). Flips swap leftpar and rightpar; the binary
/// label never changes.
SynthSample augment_one(const SynthSample& sample, AugmentRecipe recipe, const AugmentParams& params,
                        std::uint64_t seed, std::uint64_t sample_index);

/// All eight recipes for every input, sample-major: out[8*i + r].
std::vector<SynthSample> expand_dataset(std::span<const SynthSample> samples, const AugmentParams& params,
                                        std::uint64_t seed);

}  // namespace vipr
