#include "vipr/network.hpp"

#include <algorithm>

#include "vipr/layers.hpp"
#include "kernels.hpp"

namespace vipr {

void NetConfig::validate() const {
  if (input_size < 8 || input_size % 8 != 0) {
    fail(ErrorKind::kInvalidArgument, "input_size must be a positive multiple of 8");
  }
  for (int c : channels) {
    if (c < 1) fail(ErrorKind::kInvalidArgument, "channel counts must be positive");
  }
  if (hidden < 1) fail(ErrorKind::kInvalidArgument, "hidden width must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail(ErrorKind::kInvalidArgument, "dropout must lie in [0, 1)");
}

NetConfig NetConfig::tiny() {
  NetConfig c;
  c.input_size = 8;
  c.channels = {2, 3, 4};
  c.hidden = 6;
  return c;
}

std::vector<std::pair<std::string, Shape>> parameter_layout(const NetConfig& cfg) {
  const auto u = [](int v) { return static_cast<std::size_t>(v); };
  return {
      {"conv1.weight", {u(cfg.channels[0]), 1, 3, 3}},
      {"conv1.bias", {u(cfg.channels[0])}},
      {"conv2.weight", {u(cfg.channels[1]), u(cfg.channels[0]), 3, 3}},
      {"conv2.bias", {u(cfg.channels[1])}},
      {"conv3.weight", {u(cfg.channels[2]), u(cfg.channels[1]), 3, 3}},
      {"conv3.bias", {u(cfg.channels[2])}},
      {"fc1.weight", {u(cfg.hidden), cfg.flattened_features()}},
      {"fc1.bias", {u(cfg.hidden)}},
      {"fc2.weight", {1, u(cfg.hidden)}},
      {"fc2.bias", {1}},
  };
}

namespace nn {
namespace {

// Parameter slots in parameter_layout order.
enum Slot : std::size_t { kC1W, kC1B, kC2W, kC2B, kC3W, kC3B, kF1W, kF1B, kF2W, kF2B };

Shape per_sample(const Shape& s) { return Shape(s.begin() + 1, s.end()); }

}  // namespace

template <typename T>
Network<T>::Network(const NetConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  for (auto& [name, shape] : parameter_layout(cfg_)) params_.push_back({name, Tensor<T>(shape), Tensor<T>(shape)});
}

template <typename T>
Parameter<T>& Network<T>::parameter(std::string_view name) {
  for (auto& p : params_) {
    if (p.name == name) return p;
  }
  fail(ErrorKind::kInvalidArgument, "no parameter named " + std::string(name));
}

template <typename T>
const Parameter<T>& Network<T>::parameter(std::string_view name) const {
  return const_cast<Network*>(this)->parameter(name);
}

template <typename T>
void Network<T>::zero_grad() {
  for (auto& p : params_) p.grad.fill(T(0));
}

template <typename T>
Tensor<T> Network<T>::forward(const Tensor<T>& batch, Mode mode, std::uint64_t dropout_key,
                              ForwardCache<T>* cache) const {
  const auto s = static_cast<std::size_t>(cfg_.input_size);
  if (batch.rank() != 4 || batch.dim(1) != 1 || batch.dim(2) != s || batch.dim(3) != s) {
    fail(ErrorKind::kShape, "network input: expected [N,1," + std::to_string(s) + "," + std::to_string(s) +
                                "], got " + shape_to_string(batch.shape()));
  }
  const std::size_t n = batch.dim(0);
  const auto& p = params_;

  std::array<Tensor<T>, 3> pooled;
  std::array<std::vector<std::uint8_t>, 3> argmax;
  for (std::size_t b = 0; b < 3; ++b) {
    const std::size_t side = s >> (b + 1);
    pooled[b] = Tensor<T>({n, static_cast<std::size_t>(cfg_.channels[b]), side, side});
    argmax[b].resize(pooled[b].numel());
  }
  std::vector<std::pair<std::string, Shape>> trace = {{"input", {1, s, s}}};
  for (std::size_t b = 0; b < 3; ++b) {
    const std::size_t side = s >> b, c = static_cast<std::size_t>(cfg_.channels[b]);
    trace.push_back({"conv" + std::to_string(b + 1), {c, side, side}});
    trace.push_back({"pool" + std::to_string(b + 1), {c, side / 2, side / 2}});
  }
  for (std::size_t i = 0; i < n; ++i) {
    const T* x = batch.data() + i * s * s;
    std::size_t cin = 1;
    for (std::size_t b = 0; b < 3; ++b) {
      const std::size_t side = s >> b, cout = static_cast<std::size_t>(cfg_.channels[b]);
      const std::size_t per = pooled[b].numel() / n;
      T* conv = detail::scratch<T>(2, cout * side * side);
      detail::conv3x3(x, cin, side, side, p[kC1W + 2 * b].value.data(), p[kC1B + 2 * b].value.data(), cout, conv);
      detail::relu_pool(conv, cout, side, side, pooled[b].data() + i * per, argmax[b].data() + i * per);
      x = pooled[b].data() + i * per;
      cin = cout;
    }
  }

  const Tensor<T> features = flatten(pooled[2]);
  Tensor<T> fc1_pre = linear(features, p[kF1W].value, p[kF1B].value);
  DropoutResult<T> dr = dropout(relu(fc1_pre), cfg_.dropout, mode == Mode::kTrain, dropout_key);
  Tensor<T> logits = linear(dr.output, p[kF2W].value, p[kF2B].value);
  trace.emplace_back("flatten", per_sample(features.shape()));
  trace.emplace_back("fc1", per_sample(fc1_pre.shape()));
  trace.emplace_back("fc2", per_sample(logits.shape()));

  if (cache) {
    cache->input = batch;
    cache->pooled = std::move(pooled);
    cache->argmax = std::move(argmax);
    cache->fc1_pre = std::move(fc1_pre);
    cache->dropped = std::move(dr.output);
    cache->dropout_mask = std::move(dr.mask);
    cache->trace = std::move(trace);
  }
  return logits;
}

template <typename T>
void Network<T>::backward(const ForwardCache<T>& cache, const Tensor<T>& grad_logits) {
  auto& p = params_;
  const std::size_t n = cache.input.dim(0);
  expect_shape(grad_logits.shape(), {n, 1}, "grad_logits");

  Tensor<T> g_dropped(cache.dropped.shape());
  linear_backward_accumulate(cache.dropped, p[kF2W].value, grad_logits, &g_dropped, p[kF2W].grad, p[kF2B].grad);
  const Tensor<T> g_act = dropout_backward(g_dropped, cache.dropout_mask, cfg_.dropout);
  const Tensor<T> g_pre = relu_backward(cache.fc1_pre, g_act);
  const Tensor<T> features = flatten(cache.pooled[2]);
  Tensor<T> g_features(features.shape());
  linear_backward_accumulate(features, p[kF1W].value, g_pre, &g_features, p[kF1W].grad, p[kF1B].grad);
  Tensor<T> g_top = std::move(g_features).reshaped(cache.pooled[2].shape());

  // Per-sample walk down the conv stack in a fixed order (deterministic sums).
  const auto s = static_cast<std::size_t>(cfg_.input_size);
  for (std::size_t i = 0; i < n; ++i) {
    const T* g = g_top.data() + i * (g_top.numel() / n);
    for (std::size_t bi = 3; bi-- > 0;) {
      const std::size_t side = s >> bi, cout = static_cast<std::size_t>(cfg_.channels[bi]);
      const std::size_t cin = bi == 0 ? 1 : static_cast<std::size_t>(cfg_.channels[bi - 1]);
      const std::size_t per = cache.pooled[bi].numel() / n;
      T* g_conv = detail::scratch<T>(2, cout * side * side);
      detail::relu_pool_backward(g, cache.pooled[bi].data() + i * per, cache.argmax[bi].data() + i * per, cout, side,
                                 side, g_conv);
      const T* input = bi == 0 ? cache.input.data() + i * s * s
                               : cache.pooled[bi - 1].data() + i * (cache.pooled[bi - 1].numel() / n);
      // g (slot 3) is dead once g_conv exists, so slot 3 can take the next input gradient.
      T* g_input = nullptr;
      if (bi > 0) {
        g_input = detail::scratch<T>(3, cin * side * side);
        std::fill(g_input, g_input + cin * side * side, T(0));
      }
      detail::conv3x3_backward(input, cin, side, side, p[kC1W + 2 * bi].value.data(), cout, g_conv,
                               p[kC1W + 2 * bi].grad.data(), p[kC1B + 2 * bi].grad.data(), g_input);
      g = g_input;
    }
  }
}

template class Network<float>;
template class Network<double>;

}  // namespace nn
}  // namespace vipr
