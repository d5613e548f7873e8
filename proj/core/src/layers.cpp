#include "vipr/layers.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "vipr/rng.hpp"
#include "kernels.hpp"

namespace vipr::nn {
namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMat<T>>;

constexpr std::size_t kTaps = 9;

struct ConvDims {
  std::size_t n, cin, h, w, cout;
  std::size_t hw() const { return h * w; }
  std::size_t k() const { return cin * kTaps; }
};

template <typename T>
ConvDims check_conv(const Tensor<T>& input, const Tensor<T>& weight) {
  if (input.rank() != 4) fail(ErrorKind::kShape, "conv2d input must be [N,C,H,W], got " + shape_to_string(input.shape()));
  if (weight.rank() != 4 || weight.dim(2) != 3 || weight.dim(3) != 3 || weight.dim(1) != input.dim(1)) {
    fail(ErrorKind::kShape, "conv2d weight: expected [Cout," + std::to_string(input.dim(1)) + ",3,3], got " +
                                shape_to_string(weight.shape()));
  }
  return {input.dim(0), input.dim(1), input.dim(2), input.dim(3), weight.dim(0)};
}

// Column matrix [Cin*9, H*W] for one sample, zero padding 1.
template <typename T>
void im2col(const T* in, const ConvDims& d, T* col) {
  const std::size_t h = d.h, w = d.w;
  for (std::size_t c = 0; c < d.cin; ++c) {
    const T* plane = in + c * h * w;
    for (std::size_t ky = 0; ky < 3; ++ky) {
      for (std::size_t kx = 0; kx < 3; ++kx) {
        T* dst = col + ((c * 3 + ky) * 3 + kx) * h * w;
        for (std::size_t y = 0; y < h; ++y) {
          T* drow = dst + y * w;
          const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(y + ky) - 1;
          if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(h)) {
            std::fill(drow, drow + w, T(0));
            continue;
          }
          const T* srow = plane + static_cast<std::size_t>(sy) * w;
          if (kx == 1) {
            std::copy(srow, srow + w, drow);
          } else if (kx == 0) {
            drow[0] = T(0);
            std::copy(srow, srow + w - 1, drow + 1);
          } else {
            std::copy(srow + 1, srow + w, drow);
            drow[w - 1] = T(0);
          }
        }
      }
    }
  }
}

// Scatter-adds a column-gradient matrix back onto one input sample.
template <typename T>
void col2im_add(const T* col, const ConvDims& d, T* in) {
  const std::size_t h = d.h, w = d.w;
  for (std::size_t c = 0; c < d.cin; ++c) {
    T* plane = in + c * h * w;
    for (std::size_t ky = 0; ky < 3; ++ky) {
      for (std::size_t kx = 0; kx < 3; ++kx) {
        const T* src = col + ((c * 3 + ky) * 3 + kx) * h * w;
        for (std::size_t y = 0; y < h; ++y) {
          const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(y + ky) - 1;
          if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(h)) continue;
          const T* srow = src + y * w;
          T* drow = plane + static_cast<std::size_t>(sy) * w;
          if (kx == 1) {
            for (std::size_t x = 0; x < w; ++x) drow[x] += srow[x];
          } else if (kx == 0) {
            for (std::size_t x = 1; x < w; ++x) drow[x - 1] += srow[x];
          } else {
            for (std::size_t x = 0; x + 1 < w; ++x) drow[x + 1] += srow[x];
          }
        }
      }
    }
  }
}

}  // namespace

namespace detail {

template <typename T>
T* scratch(int slot, std::size_t n) {
  thread_local std::vector<T> buffers[4];
  auto& b = buffers[slot];
  if (b.size() < n) b.resize(n);
  return b.data();
}

template <typename T>
void conv3x3(const T* in, std::size_t cin, std::size_t h, std::size_t w, const T* weight, const T* bias,
             std::size_t cout, T* out) {
  const ConvDims d{1, cin, h, w, cout};
  T* col = scratch<T>(0, d.k() * d.hw());
  im2col(in, d, col);
  ConstMatMap<T> wmat(weight, static_cast<Eigen::Index>(cout), static_cast<Eigen::Index>(d.k()));
  ConstMatMap<T> cmat(col, static_cast<Eigen::Index>(d.k()), static_cast<Eigen::Index>(d.hw()));
  MatMap<T> omat(out, static_cast<Eigen::Index>(cout), static_cast<Eigen::Index>(d.hw()));
  omat.noalias() = wmat * cmat;
  for (std::size_t c = 0; c < cout; ++c) omat.row(static_cast<Eigen::Index>(c)).array() += bias[c];
}

template <typename T>
void conv3x3_backward(const T* in, std::size_t cin, std::size_t h, std::size_t w, const T* weight, std::size_t cout,
                      const T* gout, T* gw, T* gb, T* gin) {
  const ConvDims d{1, cin, h, w, cout};
  const auto co = static_cast<Eigen::Index>(cout);
  const auto k = static_cast<Eigen::Index>(d.k());
  const auto hw = static_cast<Eigen::Index>(d.hw());
  T* col = scratch<T>(0, d.k() * d.hw());
  im2col(in, d, col);
  ConstMatMap<T> g(gout, co, hw);
  MatMap<T>(gw, co, k).noalias() += g * ConstMatMap<T>(col, k, hw).transpose();
  for (Eigen::Index c = 0; c < co; ++c) gb[c] += g.row(c).sum();
  if (gin) {
    T* gcol = scratch<T>(1, d.k() * d.hw());
    MatMap<T>(gcol, k, hw).noalias() = ConstMatMap<T>(weight, co, k).transpose() * g;
    col2im_add(gcol, d, gin);
  }
}

template <typename T>
void relu_pool(const T* x, std::size_t planes, std::size_t h, std::size_t w, T* pooled, std::uint8_t* argmax) {
  const std::size_t oh = h / 2, ow = w / 2;
  for (std::size_t p = 0; p < planes; ++p) {
    const T* plane = x + p * h * w;
    T* out = pooled + p * oh * ow;
    std::uint8_t* am = argmax + p * oh * ow;
    for (std::size_t y = 0; y < oh; ++y) {
      const T* r0 = plane + 2 * y * w;
      const T* r1 = r0 + w;
      for (std::size_t xx = 0; xx < ow; ++xx) {
        const T v[4] = {std::max(r0[2 * xx], T(0)), std::max(r0[2 * xx + 1], T(0)), std::max(r1[2 * xx], T(0)),
                        std::max(r1[2 * xx + 1], T(0))};
        std::uint8_t best = 0;
        for (std::uint8_t s = 1; s < 4; ++s) {
          if (v[s] > v[best]) best = s;
        }
        out[y * ow + xx] = v[best];
        am[y * ow + xx] = best;
      }
    }
  }
}

template <typename T>
void relu_pool_backward(const T* gpooled, const T* pooled, const std::uint8_t* argmax, std::size_t planes,
                        std::size_t h, std::size_t w, T* gx) {
  const std::size_t oh = h / 2, ow = w / 2;
  std::fill(gx, gx + planes * h * w, T(0));
  for (std::size_t p = 0; p < planes; ++p) {
    T* plane = gx + p * h * w;
    const std::size_t base = p * oh * ow;
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t xx = 0; xx < ow; ++xx) {
        const std::size_t i = base + y * ow + xx;
        // pooled > 0 exactly when the ReLU input at the argmax was positive.
        if (!(pooled[i] > T(0))) continue;
        const std::uint8_t s = argmax[i];
        plane[(2 * y + (s >> 1)) * w + 2 * xx + (s & 1)] = gpooled[i];
      }
    }
  }
}

#define VIPR_INSTANTIATE_KERNELS(T)                                                                             \
  template T* scratch<T>(int, std::size_t);                                                                    \
  template void conv3x3(const T*, std::size_t, std::size_t, std::size_t, const T*, const T*, std::size_t, T*); \
  template void conv3x3_backward(const T*, std::size_t, std::size_t, std::size_t, const T*, std::size_t,      \
                                 const T*, T*, T*, T*);                                                        \
  template void relu_pool(const T*, std::size_t, std::size_t, std::size_t, T*, std::uint8_t*);                 \
  template void relu_pool_backward(const T*, const T*, const std::uint8_t*, std::size_t, std::size_t,         \
                                   std::size_t, T*);

VIPR_INSTANTIATE_KERNELS(float)
VIPR_INSTANTIATE_KERNELS(double)

#undef VIPR_INSTANTIATE_KERNELS

}  // namespace detail

double sigmoid(double z) noexcept {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias) {
  const ConvDims d = check_conv(input, weight);
  expect_shape(bias.shape(), {d.cout}, "conv2d bias");
  Tensor<T> out({d.n, d.cout, d.h, d.w});
  for (std::size_t n = 0; n < d.n; ++n) {
    detail::conv3x3(input.data() + n * d.cin * d.hw(), d.cin, d.h, d.w, weight.data(), bias.data(), d.cout,
                    out.data() + n * d.cout * d.hw());
  }
  return out;
}

template <typename T>
void conv2d_backward_accumulate(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& grad_output,
                                Tensor<T>* grad_input, Tensor<T>& grad_weight, Tensor<T>& grad_bias) {
  const ConvDims d = check_conv(input, weight);
  expect_shape(grad_output.shape(), {d.n, d.cout, d.h, d.w}, "conv2d grad_output");
  expect_shape(grad_weight.shape(), weight.shape(), "conv2d grad_weight");
  expect_shape(grad_bias.shape(), {d.cout}, "conv2d grad_bias");
  if (grad_input) expect_shape(grad_input->shape(), input.shape(), "conv2d grad_input");
  for (std::size_t n = 0; n < d.n; ++n) {
    detail::conv3x3_backward(input.data() + n * d.cin * d.hw(), d.cin, d.h, d.w, weight.data(), d.cout,
                             grad_output.data() + n * d.cout * d.hw(), grad_weight.data(), grad_bias.data(),
                             grad_input ? grad_input->data() + n * d.cin * d.hw() : nullptr);
  }
}

template <typename T>
Conv2dGrads<T> conv2d_backward(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& grad_output,
                               bool want_input_grad) {
  Conv2dGrads<T> g{want_input_grad ? Tensor<T>(input.shape()) : Tensor<T>(), Tensor<T>(weight.shape()),
                   Tensor<T>({weight.dim(0)})};
  conv2d_backward_accumulate(input, weight, grad_output, want_input_grad ? &g.input : nullptr, g.weight, g.bias);
  return g;
}

template <typename T>
PoolResult<T> maxpool2(const Tensor<T>& input) {
  if (input.rank() != 4) fail(ErrorKind::kShape, "maxpool2 input must be [N,C,H,W], got " + shape_to_string(input.shape()));
  const std::size_t n = input.dim(0), c = input.dim(1), h = input.dim(2), w = input.dim(3);
  if (h % 2 != 0 || w % 2 != 0) {
    fail(ErrorKind::kShape, "maxpool2 needs even spatial extents, got " + shape_to_string(input.shape()));
  }
  const std::size_t oh = h / 2, ow = w / 2;
  PoolResult<T> r{Tensor<T>({n, c, oh, ow}), std::vector<std::uint8_t>(n * c * oh * ow)};
  for (std::size_t p = 0; p < n * c; ++p) {
    const T* plane = input.data() + p * h * w;
    T* out = r.output.data() + p * oh * ow;
    std::uint8_t* am = r.argmax.data() + p * oh * ow;
    for (std::size_t y = 0; y < oh; ++y) {
      const T* r0 = plane + 2 * y * w;
      const T* r1 = r0 + w;
      for (std::size_t x = 0; x < ow; ++x) {
        const T v[4] = {r0[2 * x], r0[2 * x + 1], r1[2 * x], r1[2 * x + 1]};
        std::uint8_t best = 0;
        for (std::uint8_t s = 1; s < 4; ++s) {
          if (v[s] > v[best]) best = s;
        }
        out[y * ow + x] = v[best];
        am[y * ow + x] = best;
      }
    }
  }
  return r;
}

template <typename T>
Tensor<T> maxpool2_backward(const Tensor<T>& grad_output, std::span<const std::uint8_t> argmax,
                            const Shape& input_shape) {
  if (input_shape.size() != 4) fail(ErrorKind::kShape, "maxpool2_backward input shape must be rank 4");
  const std::size_t n = input_shape[0], c = input_shape[1], h = input_shape[2], w = input_shape[3];
  expect_shape(grad_output.shape(), {n, c, h / 2, w / 2}, "maxpool2 grad_output");
  if (argmax.size() != grad_output.numel()) fail(ErrorKind::kShape, "maxpool2 argmax length mismatch");
  Tensor<T> gin(input_shape);
  const std::size_t oh = h / 2, ow = w / 2;
  for (std::size_t p = 0; p < n * c; ++p) {
    T* plane = gin.data() + p * h * w;
    const T* g = grad_output.data() + p * oh * ow;
    const std::uint8_t* am = argmax.data() + p * oh * ow;
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        const std::uint8_t s = am[y * ow + x];
        plane[(2 * y + (s >> 1)) * w + 2 * x + (s & 1)] = g[y * ow + x];
      }
    }
  }
  return gin;
}

template <typename T>
Tensor<T> relu(const Tensor<T>& input) {
  Tensor<T> out = input;
  for (T& v : out.values()) v = v > T(0) ? v : T(0);
  return out;
}

template <typename T>
Tensor<T> relu_backward(const Tensor<T>& input, const Tensor<T>& grad_output) {
  expect_shape(grad_output.shape(), input.shape(), "relu grad_output");
  Tensor<T> g = grad_output;
  for (std::size_t i = 0; i < g.numel(); ++i) {
    if (!(input[i] > T(0))) g[i] = T(0);
  }
  return g;
}

template <typename T>
Tensor<T> linear(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias) {
  if (input.rank() != 2 || weight.rank() != 2 || weight.dim(1) != input.dim(1)) {
    fail(ErrorKind::kShape, "linear: input " + shape_to_string(input.shape()) + " incompatible with weight " +
                                shape_to_string(weight.shape()));
  }
  const std::size_t n = input.dim(0), f = input.dim(1), o = weight.dim(0);
  expect_shape(bias.shape(), {o}, "linear bias");
  Tensor<T> out({n, o});
  ConstMatMap<T> x(input.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(f));
  ConstMatMap<T> wm(weight.data(), static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(f));
  MatMap<T> y(out.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(o));
  y.noalias() = x * wm.transpose();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < o; ++j) out[i * o + j] += bias[j];
  }
  return out;
}

template <typename T>
void linear_backward_accumulate(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& grad_output,
                                Tensor<T>* grad_input, Tensor<T>& grad_weight, Tensor<T>& grad_bias) {
  const std::size_t n = input.dim(0), f = input.dim(1), o = weight.dim(0);
  expect_shape(grad_output.shape(), {n, o}, "linear grad_output");
  expect_shape(grad_weight.shape(), weight.shape(), "linear grad_weight");
  expect_shape(grad_bias.shape(), {o}, "linear grad_bias");
  const auto ni = static_cast<Eigen::Index>(n), fi = static_cast<Eigen::Index>(f), oi = static_cast<Eigen::Index>(o);
  ConstMatMap<T> x(input.data(), ni, fi);
  ConstMatMap<T> wm(weight.data(), oi, fi);
  ConstMatMap<T> g(grad_output.data(), ni, oi);
  MatMap<T> gw(grad_weight.data(), oi, fi);
  gw.noalias() += g.transpose() * x;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < o; ++j) grad_bias[j] += grad_output[i * o + j];
  }
  if (grad_input) {
    expect_shape(grad_input->shape(), input.shape(), "linear grad_input");
    MatMap<T> gx(grad_input->data(), ni, fi);
    gx.noalias() += g * wm;
  }
}

template <typename T>
LinearGrads<T> linear_backward(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& grad_output) {
  LinearGrads<T> g{Tensor<T>(input.shape()), Tensor<T>(weight.shape()), Tensor<T>({weight.dim(0)})};
  linear_backward_accumulate(input, weight, grad_output, &g.input, g.weight, g.bias);
  return g;
}

template <typename T>
Tensor<T> flatten(Tensor<T> input) {
  if (input.rank() < 1) fail(ErrorKind::kShape, "flatten needs a batch dimension");
  const std::size_t n = input.dim(0);
  const std::size_t rest = n == 0 ? 0 : input.numel() / n;
  return std::move(input).reshaped({n, rest});
}

template <typename T>
DropoutResult<T> dropout(const Tensor<T>& input, double p, bool training, std::uint64_t key) {
  if (!(p >= 0.0 && p < 1.0)) fail(ErrorKind::kInvalidArgument, "dropout probability must lie in [0, 1)");
  DropoutResult<T> r{input, {}};
  if (!training || p == 0.0) return r;
  const CounterRng rng(key);
  const T scale = static_cast<T>(1.0 / (1.0 - p));
  r.mask.resize(input.numel());
  for (std::size_t i = 0; i < input.numel(); ++i) {
    const bool keep = rng.uniform(i) >= p;
    r.mask[i] = keep ? 1 : 0;
    r.output[i] = keep ? input[i] * scale : T(0);
  }
  return r;
}

template <typename T>
Tensor<T> dropout_backward(const Tensor<T>& grad_output, std::span<const std::uint8_t> mask, double p) {
  if (mask.empty()) return grad_output;
  if (mask.size() != grad_output.numel()) fail(ErrorKind::kShape, "dropout mask length mismatch");
  const T scale = static_cast<T>(1.0 / (1.0 - p));
  Tensor<T> g = grad_output;
  for (std::size_t i = 0; i < g.numel(); ++i) g[i] = mask[i] ? g[i] * scale : T(0);
  return g;
}

template <typename T>
BceResult<T> bce_with_logits(const Tensor<T>& logits, std::span<const int> labels) {
  const std::size_t n = logits.rank() == 0 ? 0 : logits.dim(0);
  if (logits.numel() != n || labels.size() != n || n == 0) {
    fail(ErrorKind::kShape, "bce_with_logits: logits " + shape_to_string(logits.shape()) + " vs " +
                                std::to_string(labels.size()) + " labels");
  }
  BceResult<T> r{0.0, Tensor<T>(logits.shape())};
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != 0 && labels[i] != 1) fail(ErrorKind::kInvalidArgument, "labels must be binary");
    const double z = static_cast<double>(logits[i]);
    const double y = labels[i];
    total += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
    r.grad[i] = static_cast<T>((sigmoid(z) - y) / static_cast<double>(n));
  }
  r.loss = total / static_cast<double>(n);
  return r;
}

#define VIPR_INSTANTIATE_LAYERS(T)                                                                              \
  template Tensor<T> conv2d(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);                              \
  template Conv2dGrads<T> conv2d_backward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, bool);          \
  template void conv2d_backward_accumulate(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, Tensor<T>*,    \
                                           Tensor<T>&, Tensor<T>&);                                             \
  template PoolResult<T> maxpool2(const Tensor<T>&);                                                            \
  template Tensor<T> maxpool2_backward(const Tensor<T>&, std::span<const std::uint8_t>, const Shape&);          \
  template Tensor<T> relu(const Tensor<T>&);                                                                    \
  template Tensor<T> relu_backward(const Tensor<T>&, const Tensor<T>&);                                         \
  template Tensor<T> linear(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);                              \
  template LinearGrads<T> linear_backward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);                \
  template void linear_backward_accumulate(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, Tensor<T>*,    \
                                           Tensor<T>&, Tensor<T>&);                                             \
  template Tensor<T> flatten(Tensor<T>);                                                                        \
  template DropoutResult<T> dropout(const Tensor<T>&, double, bool, std::uint64_t);                             \
  template Tensor<T> dropout_backward(const Tensor<T>&, std::span<const std::uint8_t>, double);                 \
  template BceResult<T> bce_with_logits(const Tensor<T>&, std::span<const int>);

VIPR_INSTANTIATE_LAYERS(float)
VIPR_INSTANTIATE_LAYERS(double)

#undef VIPR_INSTANTIATE_LAYERS

}  // namespace vipr::nn
