#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vipr/checkpoint.hpp"
#include "vipr/image.hpp"
#include "vipr/optimizer.hpp"

namespace vipr {

enum class Precision { kF32, kF64 };

std::string_view to_string(Precision p);
Precision parse_precision(std::string_view text);

struct TrainConfig {
  int epochs = 50;
  int batch_size = 64;
  OptimizerConfig optimizer;
  std::uint64_t seed = 0;
  Precision precision = Precision::kF32;

  void validate() const;
};

struct LabeledImage {
  GrayImage image;
  int label = 0;
};

struct EpochStats {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;  // NaN without a validation set
  double val_acc = 0.0;   // NaN without a validation set
};

struct TrainHistory {
  std::vector<EpochStats> epochs;

  /// Header "epoch,train_loss,val_loss,val_acc", one row per epoch.
  std::string to_csv() const;
};

struct TrainResult {
  Checkpoint checkpoint;
  TrainHistory history;
  // FNV-1a over the raw bytes of the final parameters at working precision.
  std::uint64_t parameter_digest = 0;
};

using EpochCallback = std::function<void(const EpochStats&)>;

/// Mini-batch training from init_weights(net, cfg.seed). Each epoch reshuffles
/// with a seeded permutation; dropout masks are keyed by (seed, epoch, batch).
/// The run is a pure function of its inputs at a fixed precision. Images of
/// the wrong size raise kShape before any work is done.
TrainResult train(const NetConfig& net, const TrainConfig& cfg, std::span<const LabeledImage> train_set,
                  std::span<const LabeledImage> val_set, const EpochCallback& on_epoch = {});

/// Evaluation-mode inference on a fixed checkpoint. Safe to share across
/// threads.
class Classifier {
 public:
  explicit Classifier(const Checkpoint& ckpt);

  /// Probability of the positive (paralyzed) class.
  double predict(const GrayImage& img) const;
  std::vector<double> predict(std::span<const GrayImage> images, std::size_t batch_size = 16) const;

 private:
  nn::Network<float> net_;
};

double predict(const Checkpoint& ckpt, const GrayImage& img);

}  // namespace vipr
