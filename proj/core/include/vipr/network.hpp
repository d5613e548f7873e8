#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vipr/tensor.hpp"

namespace vipr {

/// Conv(3x3,pad 1)+ReLU+MaxPool(2) x3 -> Flatten -> Linear -> ReLU ->
/// Dropout -> Linear(1). Single-channel square input.
struct NetConfig {
  int input_size = 256;
  std::array<int, 3> channels = {32, 64, 128};
  int hidden = 128;
  double dropout = 0.5;

  int pooled_size() const noexcept { return input_size / 8; }
  std::size_t flattened_features() const noexcept {
    return static_cast<std::size_t>(channels[2]) * static_cast<std::size_t>(pooled_size()) *
           static_cast<std::size_t>(pooled_size());
  }
  void validate() const;

  // 8x8 input variant of the same stack, small enough for finite differences.
  static NetConfig tiny();

  friend bool operator==(const NetConfig&, const NetConfig&) = default;
};

/// Parameter names and shapes in canonical (checkpoint) order.
std::vector<std::pair<std::string, Shape>> parameter_layout(const NetConfig& cfg);

namespace nn {

template <typename T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;
};

enum class Mode { kTrain, kEval };

/// Activations kept by a training forward pass for the backward pass. Only
/// pooled block outputs are stored: the ReLU mask at each pooling argmax is
/// recoverable from the pooled value itself.
template <typename T>
struct ForwardCache {
  Tensor<T> input;
  std::array<Tensor<T>, 3> pooled;
  std::array<std::vector<std::uint8_t>, 3> argmax;
  Tensor<T> fc1_pre;
  Tensor<T> dropped;
  std::vector<std::uint8_t> dropout_mask;
  // Per-sample output shape of every layer, in execution order.
  std::vector<std::pair<std::string, Shape>> trace;
};

template <typename T>
class Network {
 public:
  explicit Network(const NetConfig& cfg);

  const NetConfig& config() const noexcept { return cfg_; }
  std::vector<Parameter<T>>& parameters() noexcept { return params_; }
  const std::vector<Parameter<T>>& parameters() const noexcept { return params_; }
  Parameter<T>& parameter(std::string_view name);
  const Parameter<T>& parameter(std::string_view name) const;

  /// batch [N,1,S,S] -> logits [N,1]. Dropout only runs in kTrain; `cache`
  /// may be null when no backward pass follows.
  Tensor<T> forward(const Tensor<T>& batch, Mode mode, std::uint64_t dropout_key = 0,
                    ForwardCache<T>* cache = nullptr) const;

  /// Accumulates d(loss)/d(param) into every Parameter::grad.
  void backward(const ForwardCache<T>& cache, const Tensor<T>& grad_logits);

  void zero_grad();

 private:
  NetConfig cfg_;
  std::vector<Parameter<T>> params_;
};

extern template class Network<float>;
extern template class Network<double>;

}  // namespace nn
}  // namespace vipr
