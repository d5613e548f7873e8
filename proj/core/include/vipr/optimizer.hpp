#pragma once

#include <string_view>
#include <vector>

#include "vipr/network.hpp"

namespace vipr {

enum class OptimizerKind { kAdam, kSgdMomentum };

std::string_view to_string(OptimizerKind kind);
OptimizerKind parse_optimizer(std::string_view text);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double momentum = 0.9;
};

/// Adam with bias correction, or SGD with heavy-ball momentum (the first step
/// seeds the velocity with the raw gradient).
template <typename T>
class Optimizer {
 public:
  Optimizer(const OptimizerConfig& cfg, const std::vector<nn::Parameter<T>>& params);

  void step(std::vector<nn::Parameter<T>>& params);
  long steps_taken() const noexcept { return step_; }

 private:
  OptimizerConfig cfg_;
  std::vector<std::vector<T>> first_;
  std::vector<std::vector<T>> second_;
  long step_ = 0;
};

extern template class Optimizer<float>;
extern template class Optimizer<double>;

}  // namespace vipr
