#pragma once

#include <cstdint>
#include <string>

#include "vipr/network.hpp"

namespace vipr {

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
  bool finite = true;  // no NaN/Inf in loss or gradients
};

struct GradCheckOptions {
  std::size_t batch = 3;
  bool zero_inputs = false;  // all-zero images and labels, for the degenerate case
};

/// Compares every analytic parameter gradient of `cfg`'s network against
/// central differences at double precision. Dropout stays active with a fixed
/// mask so its backward path is covered. Relative error is
/// |a - n| / max(|a|, |n|, 1e-6).
GradCheckReport grad_check(const NetConfig& cfg, std::uint64_t seed, double eps,
                           const GradCheckOptions& options = {});

}  // namespace vipr
