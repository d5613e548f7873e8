#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "vipr/error.hpp"
#include "vipr/layers.hpp"
#include "vipr/rng.hpp"

using namespace vipr;
using namespace vipr::nn;

namespace {

Tensor<double> random_tensor(Shape shape, std::uint64_t seed, double lo = -1, double hi = 1) {
  Tensor<double> t(std::move(shape));
  CounterRng r(seed);
  for (std::size_t i = 0; i < t.numel(); ++i) t[i] = r.uniform(i, lo, hi);
  return t;
}

double dot(const Tensor<double>& a, const Tensor<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.numel(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<double*> pointers(Tensor<double>& t) {
  std::vector<double*> p;
  for (std::size_t i = 0; i < t.numel(); ++i) p.push_back(&t[i]);
  return p;
}

void expect_grad_close(const Tensor<double>& analytic, const std::vector<double>& numeric, double tol = 1e-6) {
  ASSERT_EQ(analytic.numel(), numeric.size());
  for (std::size_t i = 0; i < numeric.size(); ++i)
    EXPECT_LT(oracle::relative_error(analytic[i], numeric[i]), tol) << i << ": " << analytic[i] << " vs " << numeric[i];
}

}  // namespace

TEST(Conv, HandExample) {
  const Tensor<double> x({1, 1, 3, 3}, 1.0), w({1, 1, 3, 3}, 1.0), b({1}, 0.0);
  const auto y = conv2d(x, w, b);
  const double want[9] = {4, 6, 4, 6, 9, 6, 4, 6, 4};
  for (int i = 0; i < 9; ++i) EXPECT_EQ(y[std::size_t(i)], want[i]);
}

TEST(Conv, ZeroWeightsGiveZero) {
  const auto y = conv2d(random_tensor({2, 3, 5, 4}, 1), Tensor<double>({4, 3, 3, 3}), Tensor<double>({4}));
  for (double v : y.values()) EXPECT_EQ(v, 0.0);
}

TEST(Conv, MatchesDirectLoops) {
  const auto x = random_tensor({2, 3, 7, 5}, 2), w = random_tensor({4, 3, 3, 3}, 3), b = random_tensor({4}, 4);
  const auto got = conv2d(x, w, b);
  const auto want = oracle::conv2d_direct(x, w, b);
  ASSERT_EQ(got.shape(), want.shape());
  for (std::size_t i = 0; i < got.numel(); ++i) ASSERT_NEAR(got[i], want[i], 1e-12);
}

TEST(Conv, FloatAgreesWithDouble) {
  const auto x = random_tensor({1, 2, 6, 6}, 5), w = random_tensor({3, 2, 3, 3}, 6), b = random_tensor({3}, 7);
  auto to_f = [](const Tensor<double>& t) {
    Tensor<float> f(t.shape());
    for (std::size_t i = 0; i < t.numel(); ++i) f[i] = float(t[i]);
    return f;
  };
  const auto yd = conv2d(x, w, b);
  const auto yf = conv2d(to_f(x), to_f(w), to_f(b));
  for (std::size_t i = 0; i < yd.numel(); ++i) EXPECT_NEAR(yf[i], yd[i], 1e-5);
}

TEST(Conv, BackwardMatchesFiniteDifferences) {
  auto x = random_tensor({2, 2, 5, 4}, 8), w = random_tensor({3, 2, 3, 3}, 9), b = random_tensor({3}, 10);
  const auto r = random_tensor({2, 3, 5, 4}, 11);
  auto loss = [&] { return dot(conv2d(x, w, b), r); };
  const auto g = conv2d_backward(x, w, r);
  expect_grad_close(g.input, oracle::numeric_gradient(loss, pointers(x), 1e-6));
  expect_grad_close(g.weight, oracle::numeric_gradient(loss, pointers(w), 1e-6));
  expect_grad_close(g.bias, oracle::numeric_gradient(loss, pointers(b), 1e-6));
}

TEST(Conv, ShapeErrors) {
  EXPECT_THROW(conv2d(Tensor<double>({1, 2, 4, 4}), Tensor<double>({1, 3, 3, 3}), Tensor<double>({1})), Error);
  try {
    conv2d(Tensor<double>({1, 1, 4, 4}), Tensor<double>({2, 1, 3, 3}), Tensor<double>({3}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShape);
  }
}

TEST(Pool, WindowMaxAndRouting) {
  const Tensor<double> x({1, 1, 2, 2}, std::vector<double>{1, 2, 3, 4});
  const auto p = maxpool2(x);
  EXPECT_EQ(p.output[0], 4.0);
  const auto g = maxpool2_backward(Tensor<double>({1, 1, 1, 1}, 1.0), p.argmax, x.shape());
  EXPECT_EQ(g.values()[3], 1.0);
  EXPECT_EQ(g.values()[0] + g.values()[1] + g.values()[2], 0.0);
}

TEST(Pool, TiesGoToFirstSlot) {
  const Tensor<double> x({1, 1, 2, 2}, 0.5);
  const auto p = maxpool2(x);
  EXPECT_EQ(p.output[0], 0.5);
  const auto g = maxpool2_backward(Tensor<double>({1, 1, 1, 1}, 2.0), p.argmax, x.shape());
  EXPECT_EQ(g[0], 2.0);
  EXPECT_EQ(g[1] + g[2] + g[3], 0.0);
}

TEST(Pool, OddExtentIsShapeError) {
  try {
    maxpool2(Tensor<double>({1, 1, 3, 4}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShape);
  }
}

TEST(Relu, ForwardBackward) {
  const Tensor<double> x({4}, std::vector<double>{-1, 0, 2, -0.5});
  EXPECT_EQ(relu(x).values()[2], 2.0);
  EXPECT_EQ(relu(x).values()[0], 0.0);
  const auto g = relu_backward(x, Tensor<double>({4}, 1.0));
  EXPECT_EQ(std::vector<double>(g.values().begin(), g.values().end()), (std::vector<double>{0, 0, 1, 0}));
}

TEST(Linear, ForwardAndFiniteDifferences) {
  auto x = random_tensor({3, 5}, 12), w = random_tensor({2, 5}, 13), b = random_tensor({2}, 14);
  const auto y = linear(x, w, b);
  double y01 = b[1];
  for (int f = 0; f < 5; ++f) y01 += w[std::size_t(5 + f)] * x[std::size_t(f)];
  EXPECT_NEAR(y[1], y01, 1e-14);
  const auto r = random_tensor({3, 2}, 15);
  auto loss = [&] { return dot(linear(x, w, b), r); };
  const auto g = linear_backward(x, w, r);
  expect_grad_close(g.input, oracle::numeric_gradient(loss, pointers(x), 1e-6));
  expect_grad_close(g.weight, oracle::numeric_gradient(loss, pointers(w), 1e-6));
  expect_grad_close(g.bias, oracle::numeric_gradient(loss, pointers(b), 1e-6));
}

TEST(Flatten, CollapsesTrailingDims) {
  const auto f = flatten(random_tensor({2, 3, 4, 5}, 16));
  EXPECT_EQ(f.shape(), (Shape{2, 60}));
}

TEST(Dropout, EvalIsIdentity) {
  const auto x = random_tensor({3, 7}, 17);
  const auto d = dropout(x, 0.5, false, 1);
  EXPECT_EQ(d.output, x);
  EXPECT_TRUE(d.mask.empty());
}

TEST(Dropout, ExpectationPreserved) {
  const std::size_t n = 1000000;
  const Tensor<double> x({1, n}, 1.0);
  for (double p : {0.5, 0.2}) {
    const auto d = dropout(x, p, true, 18);
    double sum = 0;
    for (double v : d.output.values()) {
      ASSERT_TRUE(v == 0.0 || v == 1.0 / (1.0 - p));
      sum += v;
    }
    EXPECT_NEAR(sum / double(n), 1.0, 0.01);
    const auto g = dropout_backward(Tensor<double>({1, n}, 1.0), d.mask, p);
    for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(g[i], d.output[i]);
  }
}

TEST(Dropout, MaskFollowsCounterRng) {
  const Tensor<double> x({1, 100}, 1.0);
  const auto d = dropout(x, 0.3, true, 19);
  CounterRng r(19);
  for (std::size_t i = 0; i < 100; ++i) EXPECT_EQ(d.output[i] != 0.0, r.uniform(i) >= 0.3);
}

TEST(Bce, ClosedFormValues) {
  const std::vector<int> one = {1};
  EXPECT_NEAR(bce_with_logits(Tensor<double>({1, 1}, 0.0), one).loss, std::log(2.0), 1e-15);
  const auto big = bce_with_logits(Tensor<double>({1, 1}, 30.0), one);
  EXPECT_LT(big.loss, 1e-12);
  EXPECT_TRUE(std::isfinite(big.loss));
  const std::vector<int> zero = {0};
  EXPECT_NEAR(bce_with_logits(Tensor<double>({1, 1}, -1000.0), zero).loss, 0.0, 1e-300);
  EXPECT_NEAR(bce_with_logits(Tensor<double>({1, 1}, 1000.0), zero).loss, 1000.0, 1e-9);
}

TEST(Bce, GradientMatchesFiniteDifferences) {
  auto z = random_tensor({4, 1}, 20, -3, 3);
  const std::vector<int> y = {1, 0, 0, 1};
  const auto res = bce_with_logits(z, y);
  const auto num = oracle::numeric_gradient([&] { return bce_with_logits(z, y).loss; }, pointers(z), 1e-6);
  expect_grad_close(res.grad, num, 1e-7);
  EXPECT_THROW(bce_with_logits(z, std::vector<int>{1, 0, 2, 1}), Error);
}
