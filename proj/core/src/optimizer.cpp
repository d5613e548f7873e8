#include "vipr/optimizer.hpp"

#include <cmath>
#include <string>

namespace vipr {

std::string_view to_string(OptimizerKind kind) { return kind == OptimizerKind::kAdam ? "adam" : "sgd-momentum"; }

OptimizerKind parse_optimizer(std::string_view text) {
  if (text == "adam") return OptimizerKind::kAdam;
  if (text == "sgd-momentum" || text == "sgd") return OptimizerKind::kSgdMomentum;
  fail(ErrorKind::kInvalidArgument, "unknown optimizer '" + std::string(text) + "'");
}

template <typename T>
Optimizer<T>::Optimizer(const OptimizerConfig& cfg, const std::vector<nn::Parameter<T>>& params) : cfg_(cfg) {
  if (!(cfg.learning_rate > 0)) fail(ErrorKind::kInvalidArgument, "learning rate must be positive");
  for (const auto& p : params) {
    first_.emplace_back(p.value.numel(), T(0));
    if (cfg_.kind == OptimizerKind::kAdam) second_.emplace_back(p.value.numel(), T(0));
  }
}

template <typename T>
void Optimizer<T>::step(std::vector<nn::Parameter<T>>& params) {
  ++step_;
  if (cfg_.kind == OptimizerKind::kAdam) {
    const T b1 = static_cast<T>(cfg_.beta1);
    const T b2 = static_cast<T>(cfg_.beta2);
    const T eps = static_cast<T>(cfg_.epsilon);
    const T c1 = static_cast<T>(1.0 - std::pow(cfg_.beta1, static_cast<double>(step_)));
    const T c2 = static_cast<T>(1.0 - std::pow(cfg_.beta2, static_cast<double>(step_)));
    const T lr = static_cast<T>(cfg_.learning_rate);
    for (std::size_t i = 0; i < params.size(); ++i) {
      T* w = params[i].value.data();
      const T* g = params[i].grad.data();
      T* m = first_[i].data();
      T* v = second_[i].data();
      const std::size_t n = params[i].value.numel();
      for (std::size_t k = 0; k < n; ++k) {
        m[k] = b1 * m[k] + (T(1) - b1) * g[k];
        v[k] = b2 * v[k] + (T(1) - b2) * g[k] * g[k];
        const T mhat = m[k] / c1;
        const T vhat = v[k] / c2;
        w[k] -= lr * mhat / (std::sqrt(vhat) + eps);
      }
    }
    return;
  }
  const T mu = static_cast<T>(cfg_.momentum);
  const T lr = static_cast<T>(cfg_.learning_rate);
  for (std::size_t i = 0; i < params.size(); ++i) {
    T* w = params[i].value.data();
    const T* g = params[i].grad.data();
    T* buf = first_[i].data();
    const std::size_t n = params[i].value.numel();
    for (std::size_t k = 0; k < n; ++k) {
      buf[k] = step_ == 1 ? g[k] : mu * buf[k] + g[k];
      w[k] -= lr * buf[k];
    }
  }
}

template class Optimizer<float>;
template class Optimizer<double>;

}  // namespace vipr
