#pragma once

#include <cstddef>
#include <cstdint>

// Single-sample kernels behind the tensor-level layers. Scratch buffers are
// thread-local and reused across calls.
namespace vipr::nn::detail {

/// out[cout,h,w] = conv3x3(in[cin,h,w]) + bias, zero padding 1.
template <typename T>
void conv3x3(const T* in, std::size_t cin, std::size_t h, std::size_t w, const T* weight, const T* bias,
             std::size_t cout, T* out);

/// Adds weight and bias gradients; when gin is non-null adds the input gradient too.
template <typename T>
void conv3x3_backward(const T* in, std::size_t cin, std::size_t h, std::size_t w, const T* weight, std::size_t cout,
                      const T* gout, T* gw, T* gb, T* gin);

/// maxpool2(relu(x)) over `planes` planes of h x w.
template <typename T>
void relu_pool(const T* x, std::size_t planes, std::size_t h, std::size_t w, T* pooled, std::uint8_t* argmax);

/// Gradient of relu_pool wrt x; gx (planes*h*w) is fully overwritten.
template <typename T>
void relu_pool_backward(const T* gpooled, const T* pooled, const std::uint8_t* argmax, std::size_t planes,
                        std::size_t h, std::size_t w, T* gx);

/// Grow-only thread-local scratch buffer; slot distinguishes concurrent uses.
template <typename T>
T* scratch(int slot, std::size_t n);

}  // namespace vipr::nn::detail
