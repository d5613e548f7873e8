#include <benchmark/benchmark.h>

#include "vipr/layers.hpp"
#include "vipr/network.hpp"
#include "vipr/rng.hpp"

namespace {

template <typename T>
vipr::Tensor<T> random_tensor(vipr::Shape shape, std::uint64_t key) {
  vipr::Tensor<T> t(std::move(shape));
  const vipr::CounterRng rng(key);
  for (std::size_t i = 0; i < t.numel(); ++i) t.data()[i] = static_cast<T>(rng.uniform(i, -1.0, 1.0));
  return t;
}

// Args: input channels, output channels, spatial size.
template <typename T>
void BM_Conv2d(benchmark::State& state) {
  const auto cin = static_cast<std::size_t>(state.range(0));
  const auto cout = static_cast<std::size_t>(state.range(1));
  const auto s = static_cast<std::size_t>(state.range(2));
  const auto x = random_tensor<T>({1, cin, s, s}, 1);
  const auto w = random_tensor<T>({cout, cin, 3, 3}, 2);
  const auto b = random_tensor<T>({cout}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(vipr::nn::conv2d(x, w, b));
  state.counters["FLOPS"] =
      benchmark::Counter(2.0 * 9 * double(cin * cout * s * s), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_Conv2d<float>)->Args({1, 32, 256})->Args({32, 64, 128})->Args({64, 128, 64})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Conv2d<double>)->Args({1, 32, 256})->Args({32, 64, 128})->Args({64, 128, 64})->Unit(benchmark::kMillisecond);

template <typename T>
void BM_TrainStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  vipr::nn::Network<T> net{vipr::NetConfig{}};
  const auto x = random_tensor<T>({n, 1, 256, 256}, 4);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % 2);
  vipr::nn::ForwardCache<T> cache;
  for (auto _ : state) {
    net.zero_grad();
    const auto logits = net.forward(x, vipr::nn::Mode::kTrain, 1, &cache);
    const auto loss = vipr::nn::bce_with_logits(logits, labels);
    net.backward(cache, loss.grad);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_TrainStep<float>)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrainStep<double>)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Inference(benchmark::State& state) {
  const vipr::nn::Network<float> net{vipr::NetConfig{}};
  const auto x = random_tensor<float>({1, 1, 256, 256}, 5);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x, vipr::nn::Mode::kEval));
}
BENCHMARK(BM_Inference)->Unit(benchmark::kMillisecond);

}  // namespace
