#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vipr/network.hpp"

namespace vipr {

struct NamedTensor {
  std::string name;
  Shape shape;
  std::vector<float> values;

  friend bool operator==(const NamedTensor&, const NamedTensor&) = default;
};

struct CheckpointMetadata {
  int epoch = 0;
  std::uint64_t seed = 0;
  double final_train_loss = 0.0;  // NaN when unknown
  double final_val_loss = 0.0;    // NaN when there was no validation set
  std::string precision = "f32";
};

struct Checkpoint {
  NetConfig config;
  CheckpointMetadata metadata;
  std::vector<NamedTensor> tensors;

  const NamedTensor& tensor(std::string_view name) const;
  /// Every layer of `config` present, in canonical order, with matching
  /// shapes; throws kShape otherwise.
  void validate() const;
};

inline constexpr char kCheckpointMagic[] = "VIPR1";

/// Layout: the 5 magic bytes "VIPR1", a little-endian u32 header length, the
/// UTF-8 JSON header (config, metadata, tensor list with name/shape/dtype),
/// then every tensor's float32 values little-endian in header order.
std::vector<std::uint8_t> save_checkpoint(const Checkpoint& ckpt);

/// Throws kBadMagic, kTruncated (payload shorter or longer than declared) or
/// kShape (declared shapes disagree with the config).
Checkpoint load_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint_file(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint_file(const std::filesystem::path& path);

/// He (fan-in) normal weights, zero biases; a pure function of (cfg, seed).
Checkpoint init_weights(const NetConfig& cfg, std::uint64_t seed);

template <typename T>
nn::Network<T> network_from_checkpoint(const Checkpoint& ckpt);

template <typename T>
std::vector<NamedTensor> export_parameters(const nn::Network<T>& net);

}  // namespace vipr
