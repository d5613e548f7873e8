#include "vipr/train.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "vipr/layers.hpp"
#include "vipr/rng.hpp"

namespace vipr {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename T>
Tensor<T> make_batch(std::span<const LabeledImage> set, std::span<const std::size_t> idx, int size) {
  const auto s = static_cast<std::size_t>(size);
  Tensor<T> batch({idx.size(), 1, s, s});
  T* out = batch.data();
  for (std::size_t i : idx) {
    for (double p : set[i].image.pixels()) *out++ = static_cast<T>(p);
  }
  return batch;
}

template <typename T>
std::uint64_t digest(const nn::Network<T>& net) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& p : net.parameters()) {
    h = fnv1a64(std::string_view(reinterpret_cast<const char*>(p.value.data()), p.value.numel() * sizeof(T)), h);
  }
  return h;
}

template <typename T>
void evaluate(const nn::Network<T>& net, std::span<const LabeledImage> set, int batch_size, double* loss,
              double* acc) {
  if (set.empty()) {
    *loss = kNaN;
    *acc = kNaN;
    return;
  }
  double total = 0.0;
  std::size_t correct = 0;
  std::vector<std::size_t> idx;
  std::vector<int> labels;
  for (std::size_t start = 0; start < set.size(); start += static_cast<std::size_t>(batch_size)) {
    const std::size_t end = std::min(set.size(), start + static_cast<std::size_t>(batch_size));
    idx.resize(end - start);
    std::iota(idx.begin(), idx.end(), start);
    labels.clear();
    for (std::size_t i : idx) labels.push_back(set[i].label);
    const Tensor<T> logits = net.forward(make_batch<T>(set, idx, net.config().input_size), nn::Mode::kEval);
    const auto bce = nn::bce_with_logits(logits, labels);
    total += bce.loss * static_cast<double>(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const int pred = logits[k] >= T(0) ? 1 : 0;
      if (pred == labels[k]) ++correct;
    }
  }
  *loss = total / static_cast<double>(set.size());
  *acc = static_cast<double>(correct) / static_cast<double>(set.size());
}

template <typename T>
TrainResult train_impl(const NetConfig& net_cfg, const TrainConfig& cfg, std::span<const LabeledImage> train_set,
                       std::span<const LabeledImage> val_set, const EpochCallback& on_epoch) {
  Checkpoint init = init_weights(net_cfg, cfg.seed);
  nn::Network<T> net = network_from_checkpoint<T>(init);
  Optimizer<T> opt(cfg.optimizer, net.parameters());

  TrainResult result;
  const std::size_t n = train_set.size();
  const auto bs = static_cast<std::size_t>(cfg.batch_size);
  std::vector<std::size_t> order(n);
  std::vector<int> labels;
  nn::ForwardCache<T> cache;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    RngStream shuffle(derive_key({cfg.seed, 0x5348ULL, static_cast<std::uint64_t>(epoch)}));
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);

    double loss_sum = 0.0;
    std::uint64_t batch_index = 0;
    for (std::size_t start = 0; start < n; start += bs, ++batch_index) {
      const std::span<const std::size_t> idx(order.data() + start, std::min(bs, n - start));
      labels.clear();
      for (std::size_t i : idx) labels.push_back(train_set[i].label);
      const std::uint64_t key = derive_key({cfg.seed, 0xD120ULL, static_cast<std::uint64_t>(epoch), batch_index});
      const Tensor<T> logits =
          net.forward(make_batch<T>(train_set, idx, net_cfg.input_size), nn::Mode::kTrain, key, &cache);
      const auto bce = nn::bce_with_logits(logits, labels);
      net.zero_grad();
      net.backward(cache, bce.grad);
      opt.step(net.parameters());
      loss_sum += bce.loss * static_cast<double>(idx.size());
    }

    EpochStats stats;
    stats.epoch = epoch + 1;
    stats.train_loss = loss_sum / static_cast<double>(n);
    evaluate(net, val_set, cfg.batch_size, &stats.val_loss, &stats.val_acc);
    result.history.epochs.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }

  result.checkpoint.config = net_cfg;
  result.checkpoint.tensors = export_parameters(net);
  result.checkpoint.metadata.epoch = cfg.epochs;
  result.checkpoint.metadata.seed = cfg.seed;
  result.checkpoint.metadata.precision = std::string(to_string(cfg.precision));
  result.checkpoint.metadata.final_train_loss = result.history.epochs.back().train_loss;
  result.checkpoint.metadata.final_val_loss = result.history.epochs.back().val_loss;
  result.parameter_digest = digest(net);
  return result;
}

}  // namespace

std::string_view to_string(Precision p) { return p == Precision::kF32 ? "f32" : "f64"; }

Precision parse_precision(std::string_view text) {
  if (text == "f32" || text == "32") return Precision::kF32;
  if (text == "f64" || text == "64") return Precision::kF64;
  fail(ErrorKind::kInvalidArgument, "precision must be f32 or f64, got '" + std::string(text) + "'");
}

void TrainConfig::validate() const {
  if (epochs < 1) fail(ErrorKind::kInvalidArgument, "epochs must be >= 1");
  if (batch_size < 1) fail(ErrorKind::kInvalidArgument, "batch size must be >= 1");
}

std::string TrainHistory::to_csv() const {
  std::string out = "epoch,train_loss,val_loss,val_acc\n";
  char buf[160];
  for (const auto& e : epochs) {
    std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g\n", e.epoch, e.train_loss, e.val_loss, e.val_acc);
    out += buf;
  }
  return out;
}

TrainResult train(const NetConfig& net, const TrainConfig& cfg, std::span<const LabeledImage> train_set,
                  std::span<const LabeledImage> val_set, const EpochCallback& on_epoch) {
  net.validate();
  cfg.validate();
  if (train_set.empty()) fail(ErrorKind::kInvalidArgument, "training set is empty");
  auto check = [&](std::span<const LabeledImage> set, const char* which) {
    for (std::size_t i = 0; i < set.size(); ++i) {
      const GrayImage& img = set[i].image;
      if (img.width() != net.input_size || img.height() != net.input_size) {
        fail(ErrorKind::kShape, std::string(which) + " image " + std::to_string(i) + " is " +
                                    std::to_string(img.width()) + "x" + std::to_string(img.height()) + ", expected " +
                                    std::to_string(net.input_size) + "x" + std::to_string(net.input_size));
      }
      if (set[i].label != 0 && set[i].label != 1) {
        fail(ErrorKind::kInvalidArgument, std::string(which) + " label must be 0 or 1");
      }
    }
  };
  check(train_set, "training");
  check(val_set, "validation");
  return cfg.precision == Precision::kF32 ? train_impl<float>(net, cfg, train_set, val_set, on_epoch)
                                          : train_impl<double>(net, cfg, train_set, val_set, on_epoch);
}

Classifier::Classifier(const Checkpoint& ckpt) : net_(network_from_checkpoint<float>(ckpt)) {}

double Classifier::predict(const GrayImage& img) const {
  const GrayImage images[] = {img};
  return predict(images, 1).front();
}

std::vector<double> Classifier::predict(std::span<const GrayImage> images, std::size_t batch_size) const {
  const auto s = static_cast<std::size_t>(net_.config().input_size);
  std::vector<double> probs;
  probs.reserve(images.size());
  if (batch_size == 0) batch_size = 1;
  for (std::size_t start = 0; start < images.size(); start += batch_size) {
    const std::size_t end = std::min(images.size(), start + batch_size);
    Tensor<float> batch({end - start, 1, s, s});
    float* out = batch.data();
    for (std::size_t i = start; i < end; ++i) {
      const GrayImage& img = images[i];
      if (static_cast<std::size_t>(img.width()) != s || static_cast<std::size_t>(img.height()) != s) {
        fail(ErrorKind::kShape, "classifier input must be " + std::to_string(s) + "x" + std::to_string(s) +
                                    ", got " + std::to_string(img.width()) + "x" + std::to_string(img.height()));
      }
      for (double p : img.pixels()) *out++ = static_cast<float>(p);
    }
    const Tensor<float> logits = net_.forward(batch, nn::Mode::kEval);
    for (std::size_t k = 0; k < logits.numel(); ++k) probs.push_back(nn::sigmoid(static_cast<double>(logits[k])));
  }
  return probs;
}

double predict(const Checkpoint& ckpt, const GrayImage& img) { return Classifier(ckpt).predict(img); }

}  // namespace vipr
