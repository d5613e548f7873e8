#include "vipr/augment.hpp"

#include <cmath>
#include <numbers>

#include "vipr/error.hpp"
#include "vipr/rng.hpp"

namespace vipr {

std::string_view to_string(AugmentRecipe recipe) {
  switch (recipe) {
    case AugmentRecipe::kIdentity: return "identity";
    case AugmentRecipe::kRot: return "rot";
    case AugmentRecipe::kFlip: return "flip";
    case AugmentRecipe::kAffine: return "affine";
    case AugmentRecipe::kRotFlip: return "rot_flip";
    case AugmentRecipe::kAffineRot: return "affine_rot";
    case AugmentRecipe::kAffineFlip: return "affine_flip";
    case AugmentRecipe::kAffineRotFlip: return "affine_rot_flip";
  }
  return "identity";
}

bool has_flip(AugmentRecipe r) noexcept {
  return r == AugmentRecipe::kFlip || r == AugmentRecipe::kRotFlip || r == AugmentRecipe::kAffineFlip ||
         r == AugmentRecipe::kAffineRotFlip;
}

bool has_rotation(AugmentRecipe r) noexcept {
  return r == AugmentRecipe::kRot || r == AugmentRecipe::kRotFlip || r == AugmentRecipe::kAffineRot ||
         r == AugmentRecipe::kAffineRotFlip;
}

bool has_affine(AugmentRecipe r) noexcept {
  return r == AugmentRecipe::kAffine || r == AugmentRecipe::kAffineRot || r == AugmentRecipe::kAffineFlip ||
         r == AugmentRecipe::kAffineRotFlip;
}

void AugmentParams::validate() const {
  if (max_rotation_deg < 0 || translate_frac < 0 || shear_max_deg < 0 || scale_min <= 0 ||
      !(scale_min <= 1.0 && 1.0 <= scale_max)) {
    fail(ErrorKind::kInvalidArgument, "augment parameters must be nonnegative with scale range containing 1");
  }
}

SynthSample augment_one(const SynthSample& sample, AugmentRecipe recipe, const AugmentParams& params,
                        std::uint64_t seed, std::uint64_t sample_index) {
  params.validate();
  RngStream rng(derive_key({seed, sample_index, static_cast<std::uint64_t>(recipe)}));
  // Fixed draw order so each parameter keeps its counter regardless of recipe.
  const double angle = rng.uniform(-params.max_rotation_deg, params.max_rotation_deg);
  const double tx = rng.uniform(-params.translate_frac, params.translate_frac);
  const double ty = rng.uniform(-params.translate_frac, params.translate_frac);
  const double scale = rng.uniform(params.scale_min, params.scale_max);
  const double shear = rng.uniform(-params.shear_max_deg, params.shear_max_deg) * std::numbers::pi / 180.0;

  SynthSample out = sample;
  GrayImage& img = out.image;
  const double cx = (img.width() - 1) / 2.0;
  const double cy = (img.height() - 1) / 2.0;
  if (has_affine(recipe)) {
    const double k = std::tan(shear);
    const double linear[4] = {scale, scale * k, 0.0, scale};
    img = warp_affine(img, AffineTransform::from_forward(linear, cx, cy, tx * img.width(), ty * img.height()), 0.0);
  }
  if (has_rotation(recipe)) img = rotate_about_center(img, angle);
  if (has_flip(recipe)) {
    img = flip_horizontal(img);
    if (out.group == GroupTag::kLeftPar) {
      out.group = GroupTag::kRightPar;
    } else if (out.group == GroupTag::kRightPar) {
      out.group = GroupTag::kLeftPar;
    }
  }
  return out;
}

std::vector<SynthSample> expand_dataset(std::span<const SynthSample> samples, const AugmentParams& params,
                                        std::uint64_t seed) {
  if (samples.empty()) fail(ErrorKind::kInvalidArgument, "expand_dataset needs at least one sample");
  std::vector<SynthSample> out;
  out.reserve(samples.size() * kAllRecipes.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (AugmentRecipe r : kAllRecipes) out.push_back(augment_one(samples[i], r, params, seed, i));
  }
  return out;
}

}  // namespace vipr
