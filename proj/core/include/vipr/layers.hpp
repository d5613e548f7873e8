#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vipr/tensor.hpp"

// Fixed layer set for the classifier: 3x3/stride-1/pad-1 convolution, 2x2
// max pooling, ReLU, dense, flatten, inverted dropout and the logistic loss.
// Each forward has a matching backward; all are instantiated for float and
// double.
namespace vipr::nn {

template <typename T>
struct Conv2dGrads {
  Tensor<T> input;
  Tensor<T> weight;
  Tensor<T> bias;
};

/// input [N,Cin,H,W], weight [Cout,Cin,3,3], bias [Cout] -> [N,Cout,H,W].
template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias);

template <typename T>
Conv2dGrads<T> conv2d_backward(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& grad_output,
                               bool want_input_grad = true);

/// Adds weight/bias gradients into the given tensors; writes the input
/// gradient only when `grad_input` is non-null.
template <typename T>
void conv2d_backward_accumulate(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& grad_output,
                                Tensor<T>* grad_input, Tensor<T>& grad_weight, Tensor<T>& grad_bias);

template <typename T>
struct PoolResult {
  Tensor<T> output;
  std::vector<std::uint8_t> argmax;  // window slot 0..3 (row-major) per output
};

/// 2x2 stride-2 max pooling; ties keep the first slot in row-major order.
template <typename T>
PoolResult<T> maxpool2(const Tensor<T>& input);

template <typename T>
Tensor<T> maxpool2_backward(const Tensor<T>& grad_output, std::span<const std::uint8_t> argmax,
                            const Shape& input_shape);

template <typename T>
Tensor<T> relu(const Tensor<T>& input);

/// Subgradient 0 at 0.
template <typename T>
Tensor<T> relu_backward(const Tensor<T>& input, const Tensor<T>& grad_output);

template <typename T>
struct LinearGrads {
  Tensor<T> input;
  Tensor<T> weight;
  Tensor<T> bias;
};

/// input [N,F], weight [O,F], bias [O] -> [N,O] (y = W x + b per row).
template <typename T>
Tensor<T> linear(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias);

template <typename T>
LinearGrads<T> linear_backward(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& grad_output);

template <typename T>
void linear_backward_accumulate(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& grad_output,
                                Tensor<T>* grad_input, Tensor<T>& grad_weight, Tensor<T>& grad_bias);

/// [N, ...] -> [N, prod(...)].
template <typename T>
Tensor<T> flatten(Tensor<T> input);

template <typename T>
struct DropoutResult {
  Tensor<T> output;
  std::vector<std::uint8_t> mask;  // empty in evaluation mode
};

/// Inverted dropout: kept units scaled by 1/(1-p). Element i is kept when
/// CounterRng(key).uniform(i) >= p. Evaluation mode is the identity.
template <typename T>
DropoutResult<T> dropout(const Tensor<T>& input, double p, bool training, std::uint64_t key);

template <typename T>
Tensor<T> dropout_backward(const Tensor<T>& grad_output, std::span<const std::uint8_t> mask, double p);

template <typename T>
struct BceResult {
  double loss = 0.0;
  Tensor<T> grad;  // d(mean loss)/d(logits), same shape as logits
};

/// Mean of max(z,0) - z*y + log(1 + exp(-|z|)); gradient (sigmoid(z) - y)/N.
template <typename T>
BceResult<T> bce_with_logits(const Tensor<T>& logits, std::span<const int> labels);

double sigmoid(double z) noexcept;

}  // namespace vipr::nn
