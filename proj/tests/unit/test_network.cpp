#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <map>

#include "oracles.hpp"
#include "vipr/checkpoint.hpp"
#include "vipr/error.hpp"
#include "vipr/gradcheck.hpp"
#include "vipr/layers.hpp"
#include "vipr/network.hpp"
#include "vipr/optimizer.hpp"
#include "vipr/rng.hpp"

using namespace vipr;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no vipr::Error thrown";
  return ErrorKind::kIo;
}

Tensor<double> random_batch(std::size_t n, int size, std::uint64_t seed) {
  Tensor<double> t({n, 1, std::size_t(size), std::size_t(size)});
  CounterRng r(seed);
  for (std::size_t i = 0; i < t.numel(); ++i) t[i] = r.uniform(i);
  return t;
}

Checkpoint random_checkpoint(std::uint64_t seed) {
  Checkpoint c = init_weights(NetConfig::tiny(), seed);
  CounterRng r(seed + 1);
  std::uint64_t k = 0;
  for (auto& t : c.tensors)
    for (float& v : t.values) v = float(r.uniform(k++, -2, 2));
  c.metadata = {int(seed % 50), seed, 0.25, std::numeric_limits<double>::quiet_NaN(), seed % 2 ? "f64" : "f32"};
  return c;
}

}  // namespace

TEST(Architecture, DefaultShapes) {
  const NetConfig cfg;
  EXPECT_EQ(cfg.flattened_features(), 131072u);
  nn::Network<float> net(cfg);
  nn::ForwardCache<float> cache;
  const auto logits = net.forward(Tensor<float>({1, 1, 256, 256}), nn::Mode::kTrain, 1, &cache);
  EXPECT_EQ(logits.shape(), (Shape{1, 1}));
  std::map<std::string, Shape> by_name(cache.trace.begin(), cache.trace.end());
  EXPECT_EQ(by_name["input"], (Shape{1, 256, 256}));
  EXPECT_EQ(by_name["pool1"], (Shape{32, 128, 128}));
  EXPECT_EQ(by_name["pool2"], (Shape{64, 64, 64}));
  EXPECT_EQ(by_name["pool3"], (Shape{128, 32, 32}));
  EXPECT_EQ(by_name["flatten"], (Shape{131072}));
  EXPECT_EQ(by_name["fc1"], (Shape{128}));
  EXPECT_EQ(by_name["fc2"], (Shape{1}));
  EXPECT_EQ(net.parameter("fc1.weight").value.shape(), (Shape{128, 131072}));
}

TEST(Architecture, RejectsBadConfig) {
  NetConfig c;
  c.input_size = 12;
  EXPECT_THROW(c.validate(), Error);
  c = NetConfig{};
  c.dropout = 1.0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Init, HeVarianceAndZeroBias) {
  const auto ckpt = init_weights(NetConfig{}, 3);
  for (const auto& t : ckpt.tensors) {
    if (t.shape.size() == 1) {
      for (float v : t.values) ASSERT_EQ(v, 0.0f);
      continue;
    }
    const double fan_in = double(t.values.size() / t.shape[0]);
    double s2 = 0;
    for (float v : t.values) s2 += double(v) * v;
    const double var = s2 / double(t.values.size());
    EXPECT_NEAR(var / (2.0 / fan_in), 1.0, 0.3) << t.name;
  }
}

TEST(Init, SameSeedSameBits) {
  const auto a = init_weights(NetConfig{}, 5), b = init_weights(NetConfig{}, 5), c = init_weights(NetConfig{}, 6);
  EXPECT_EQ(a.tensors, b.tensors);
  EXPECT_NE(a.tensors, c.tensors);
}

TEST(Forward, BatchedEqualsPerSample) {
  const auto net = network_from_checkpoint<double>(random_checkpoint(1));
  const auto batch = random_batch(3, 8, 2);
  const auto all = net.forward(batch, nn::Mode::kEval);
  for (std::size_t n = 0; n < 3; ++n) {
    Tensor<double> one({1, 1, 8, 8});
    std::memcpy(one.data(), batch.data() + n * 64, 64 * sizeof(double));
    EXPECT_NEAR(net.forward(one, nn::Mode::kEval)[0], all[n], 1e-12);
  }
}

TEST(Forward, ZeroNetGivesZeroLogit) {
  nn::Network<float> net(NetConfig{});
  const auto z = net.forward(Tensor<float>({1, 1, 256, 256}, 0.3f), nn::Mode::kEval);
  EXPECT_EQ(z[0], 0.0f);
  EXPECT_EQ(nn::sigmoid(z[0]), 0.5);
}

TEST(Backward, MatchesFiniteDifferencesThroughDropout) {
  auto net = network_from_checkpoint<double>(random_checkpoint(3));
  const auto batch = random_batch(2, 8, 4);
  const std::vector<int> labels = {1, 0};
  const std::uint64_t key = 77;
  auto loss = [&] {
    return nn::bce_with_logits(net.forward(batch, nn::Mode::kTrain, key), labels).loss;
  };
  nn::ForwardCache<double> cache;
  const auto logits = net.forward(batch, nn::Mode::kTrain, key, &cache);
  net.zero_grad();
  net.backward(cache, nn::bce_with_logits(logits, labels).grad);
  for (auto& p : net.parameters()) {
    std::vector<double*> ptrs;
    for (std::size_t i = 0; i < p.value.numel(); ++i) ptrs.push_back(&p.value[i]);
    const auto num = oracle::numeric_gradient(loss, ptrs, 1e-6);
    for (std::size_t i = 0; i < num.size(); ++i)
      ASSERT_LT(oracle::relative_error(p.grad[i], num[i]), 1e-5) << p.name << "[" << i << "]";
  }
}

TEST(GradCheck, TinyStackBelowTolerance) {
  const auto r = grad_check(NetConfig::tiny(), 1, 1e-5);
  EXPECT_TRUE(r.finite);
  EXPECT_LT(r.max_relative_error, 1e-4);
  EXPECT_EQ(r.checked, 226u);
}

TEST(GradCheck, ZeroInputsStayFinite) {
  GradCheckOptions opt;
  opt.zero_inputs = true;
  // Every ReLU sits on its kink here, so only finiteness is meaningful.
  const auto r = grad_check(NetConfig::tiny(), 2, 1e-5, opt);
  EXPECT_TRUE(r.finite);
  EXPECT_EQ(r.checked, 226u);
}

TEST(GradCheck, StepSweepHasInteriorMinimum) {
  std::vector<double> err;
  const std::vector<double> steps = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10};
  for (double eps : steps) err.push_back(grad_check(NetConfig::tiny(), 4, eps).max_relative_error);
  const auto best = std::size_t(std::min_element(err.begin(), err.end()) - err.begin());
  EXPECT_GT(best, 0u);
  EXPECT_LT(best, err.size() - 1);
  EXPECT_GT(err.front(), 10 * err[best]);
  EXPECT_GT(err.back(), 10 * err[best]);
  for (std::size_t i = 3; i <= 5; ++i) EXPECT_LT(err[i], 1e-4) << steps[i];
}

TEST(CheckpointIo, SaveLoadSaveIsByteStable) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto c = random_checkpoint(s);
    const auto bytes = save_checkpoint(c);
    const auto back = load_checkpoint(bytes);
    EXPECT_EQ(back.tensors, c.tensors);
    EXPECT_EQ(back.config, c.config);
    EXPECT_EQ(back.metadata.precision, c.metadata.precision);
    EXPECT_TRUE(std::isnan(back.metadata.final_val_loss));
    EXPECT_EQ(save_checkpoint(back), bytes);
  }
}

TEST(CheckpointIo, DistinctErrorKinds) {
  auto bytes = save_checkpoint(random_checkpoint(1));
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_EQ(kind_of([&] { load_checkpoint(bad); }), ErrorKind::kBadMagic);
  auto shorter = bytes;
  shorter.pop_back();
  EXPECT_EQ(kind_of([&] { load_checkpoint(shorter); }), ErrorKind::kTruncated);
  auto longer = bytes;
  longer.push_back(0);
  EXPECT_EQ(kind_of([&] { load_checkpoint(longer); }), ErrorKind::kTruncated);
  EXPECT_EQ(kind_of([&] { load_checkpoint(std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 7)); }),
            ErrorKind::kTruncated);

  auto c = random_checkpoint(2);
  c.tensors[0].shape = {3, 1, 3, 3};
  c.tensors[0].values.resize(27);
  EXPECT_EQ(kind_of([&] { load_checkpoint(save_checkpoint(c)); }), ErrorKind::kShape);
}

TEST(CheckpointIo, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "vipr_ckpt_test.bin";
  const auto c = random_checkpoint(9);
  save_checkpoint_file(path, c);
  EXPECT_EQ(load_checkpoint_file(path).tensors, c.tensors);
  std::filesystem::remove(path);
}

TEST(OptimizerTest, AdamFirstStepIsSignedLearningRate) {
  std::vector<nn::Parameter<double>> params = {{"p", Tensor<double>({3}, std::vector<double>{1, 2, 3}),
                                                Tensor<double>({3}, std::vector<double>{0.5, -4, 0})}};
  OptimizerConfig cfg;
  cfg.learning_rate = 0.1;
  Optimizer<double> opt(cfg, params);
  opt.step(params);
  EXPECT_NEAR(params[0].value[0], 1 - 0.1 * 0.5 / (0.5 + 1e-8), 1e-12);
  EXPECT_NEAR(params[0].value[1], 2 + 0.1 * 4 / (4 + 1e-8), 1e-12);
  EXPECT_EQ(params[0].value[2], 3.0);
  EXPECT_EQ(opt.steps_taken(), 1);
}

TEST(OptimizerTest, SgdMomentumAccumulates) {
  std::vector<nn::Parameter<double>> params = {
      {"p", Tensor<double>({1}, std::vector<double>{1}), Tensor<double>({1}, std::vector<double>{2})}};
  OptimizerConfig cfg;
  cfg.kind = OptimizerKind::kSgdMomentum;
  cfg.learning_rate = 0.1;
  cfg.momentum = 0.5;
  Optimizer<double> opt(cfg, params);
  opt.step(params);
  EXPECT_NEAR(params[0].value[0], 1 - 0.1 * 2, 1e-15);
  opt.step(params);
  EXPECT_NEAR(params[0].value[0], 0.8 - 0.1 * (0.5 * 2 + 2), 1e-15);
  EXPECT_EQ(parse_optimizer("sgd-momentum"), OptimizerKind::kSgdMomentum);
  EXPECT_EQ(parse_optimizer(to_string(OptimizerKind::kAdam)), OptimizerKind::kAdam);
}
