#include <benchmark/benchmark.h>

#include "vipr/metrics.hpp"
#include "vipr/rng.hpp"

namespace {

struct DetectionSet {
  std::vector<std::vector<vipr::Detection>> dets;
  std::vector<std::vector<vipr::BBox>> gts;
};

// One ground truth per image and a few jittered detections around it.
DetectionSet make_set(std::size_t images) {
  DetectionSet s;
  vipr::RngStream r(99);
  for (std::size_t i = 0; i < images; ++i) {
    const vipr::BBox g{0, r.uniform(0.3, 0.7), r.uniform(0.3, 0.7), r.uniform(0.2, 0.4), r.uniform(0.2, 0.4)};
    s.gts.push_back({g});
    std::vector<vipr::Detection> d;
    for (int k = 0; k < 4; ++k) {
      vipr::BBox b = g;
      b.cx += r.uniform(-0.05, 0.05);
      b.cy += r.uniform(-0.05, 0.05);
      d.push_back({b, r.uniform()});
    }
    s.dets.push_back(std::move(d));
  }
  return s;
}

void BM_AveragePrecision(benchmark::State& state) {
  const auto s = make_set(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(vipr::average_precision(s.dets, s.gts, 0.5));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AveragePrecision)->Arg(100)->Arg(1000)->Arg(10000);

void BM_MapRange(benchmark::State& state) {
  const auto s = make_set(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(vipr::map_range(s.dets, s.gts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MapRange)->Arg(1000);

void BM_ConfidenceCurves(benchmark::State& state) {
  const auto s = make_set(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(vipr::confidence_curves(s.dets, s.gts, 0.5));
}
BENCHMARK(BM_ConfidenceCurves)->Arg(1000);

}  // namespace
