#include <benchmark/benchmark.h>

#include <sstream>

#include "vipr/augment.hpp"
#include "vipr/phantom.hpp"
#include "vipr/pipeline.hpp"
#include "vipr/png_codec.hpp"
#include "vipr/synthesis.hpp"

namespace {

const vipr::PhantomFrame& frame() {
  static const auto f = vipr::generate_phantom(vipr::PhantomParams{}, 7);
  return f;
}

void BM_Standardize(benchmark::State& state) {
  const auto& img = frame().image;
  for (auto _ : state) benchmark::DoNotOptimize(vipr::standardize(img));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Standardize)->Unit(benchmark::kMillisecond);

void BM_ResizeSquare(benchmark::State& state) {
  const auto img = vipr::standardize(frame().image);
  const int out = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(vipr::resize_lanczos(img, out, out));
}
BENCHMARK(BM_ResizeSquare)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_PngDecode(benchmark::State& state) {
  const auto bytes = vipr::encode_png(frame().image);
  for (auto _ : state) benchmark::DoNotOptimize(vipr::decode_png(bytes));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes.size()));
}
BENCHMARK(BM_PngDecode)->Unit(benchmark::kMillisecond);

void BM_Y4mRead(benchmark::State& state) {
  std::vector<vipr::GrayImage> frames(20, frame().image);
  std::stringstream ss;
  vipr::write_y4m(ss, frames, vipr::Y4mColorspace::k420);
  const std::string bytes = ss.str();
  for (auto _ : state) benchmark::DoNotOptimize(vipr::read_y4m_luma(std::string_view(bytes)));
  state.SetItemsProcessed(state.iterations() * 20);
}
BENCHMARK(BM_Y4mRead)->Unit(benchmark::kMillisecond);

void BM_MakeParalyzed(benchmark::State& state) {
  const auto& f = frame();
  const vipr::RoiInput in{vipr::crop_to_roi(f.image, f.roi), f.image, f.roi_pixels, "bench"};
  for (auto _ : state) benchmark::DoNotOptimize(vipr::make_paralyzed(in, vipr::Side::kLeft, 1));
}
BENCHMARK(BM_MakeParalyzed)->Unit(benchmark::kMillisecond);

void BM_AugmentOne(benchmark::State& state) {
  vipr::SynthSample s;
  s.image = vipr::crop_to_roi(frame().image, frame().roi);
  std::uint64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(vipr::augment_one(s, vipr::AugmentRecipe::kAffineRotFlip, {}, 1, i++));
  }
}
BENCHMARK(BM_AugmentOne)->Unit(benchmark::kMillisecond);

}  // namespace
