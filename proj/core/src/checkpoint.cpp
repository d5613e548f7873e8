#include "vipr/checkpoint.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include <json.hpp>

#include "vipr/png_codec.hpp"
#include "vipr/rng.hpp"

namespace vipr {
namespace {

using json = nlohmann::json;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr std::size_t kMagicLen = 5;

json real_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double real_from(const json& j) { return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>(); }

json config_to_json(const NetConfig& c) {
  return {{"input_size", c.input_size}, {"channels", c.channels}, {"hidden", c.hidden}, {"dropout", c.dropout}};
}

NetConfig config_from_json(const json& j) {
  NetConfig c;
  c.input_size = j.at("input_size").get<int>();
  c.channels = j.at("channels").get<std::array<int, 3>>();
  c.hidden = j.at("hidden").get<int>();
  c.dropout = j.at("dropout").get<double>();
  return c;
}

}  // namespace

const NamedTensor& Checkpoint::tensor(std::string_view name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return t;
  }
  fail(ErrorKind::kShape, "checkpoint has no tensor named " + std::string(name));
}

void Checkpoint::validate() const {
  config.validate();
  const auto layout = parameter_layout(config);
  if (tensors.size() != layout.size()) {
    fail(ErrorKind::kShape, "checkpoint holds " + std::to_string(tensors.size()) + " tensors, config needs " +
                                std::to_string(layout.size()));
  }
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const NamedTensor& t = tensors[i];
    if (t.name != layout[i].first) {
      fail(ErrorKind::kShape, "checkpoint tensor " + std::to_string(i) + " is '" + t.name + "', expected '" +
                                  layout[i].first + "'");
    }
    expect_shape(t.shape, layout[i].second, "checkpoint tensor " + t.name);
    if (t.values.size() != shape_numel(t.shape)) {
      fail(ErrorKind::kShape, "checkpoint tensor " + t.name + " value count disagrees with its shape");
    }
  }
}

std::vector<std::uint8_t> save_checkpoint(const Checkpoint& ckpt) {
  ckpt.validate();
  json header;
  header["format"] = kCheckpointMagic;
  header["config"] = config_to_json(ckpt.config);
  header["metadata"] = {{"epoch", ckpt.metadata.epoch},
                        {"seed", ckpt.metadata.seed},
                        {"final_train_loss", real_or_null(ckpt.metadata.final_train_loss)},
                        {"final_val_loss", real_or_null(ckpt.metadata.final_val_loss)},
                        {"precision", ckpt.metadata.precision}};
  json list = json::array();
  for (const auto& t : ckpt.tensors) list.push_back({{"name", t.name}, {"shape", t.shape}, {"dtype", "f32"}});
  header["tensors"] = std::move(list);
  const std::string text = header.dump();

  std::size_t payload = 0;
  for (const auto& t : ckpt.tensors) payload += t.values.size() * sizeof(float);
  std::vector<std::uint8_t> out;
  out.reserve(kMagicLen + 4 + text.size() + payload);
  out.insert(out.end(), kCheckpointMagic, kCheckpointMagic + kMagicLen);
  const auto len = static_cast<std::uint32_t>(text.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((len >> (8 * i)) & 0xff));
  out.insert(out.end(), text.begin(), text.end());
  for (const auto& t : ckpt.tensors) {
    const auto* raw = reinterpret_cast<const std::uint8_t*>(t.values.data());
    out.insert(out.end(), raw, raw + t.values.size() * sizeof(float));
  }
  return out;
}

Checkpoint load_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagicLen || std::memcmp(bytes.data(), kCheckpointMagic, kMagicLen) != 0) {
    fail(ErrorKind::kBadMagic, "checkpoint does not start with VIPR1");
  }
  if (bytes.size() < kMagicLen + 4) fail(ErrorKind::kTruncated, "checkpoint ends inside the header length");
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(bytes[kMagicLen + i]) << (8 * i);
  const std::size_t header_end = kMagicLen + 4 + len;
  if (bytes.size() < header_end) fail(ErrorKind::kTruncated, "checkpoint ends inside the JSON header");

  json header;
  try {
    header = json::parse(bytes.begin() + kMagicLen + 4, bytes.begin() + static_cast<std::ptrdiff_t>(header_end));
  } catch (const std::exception& e) {
    fail(ErrorKind::kParse, std::string("checkpoint header: ") + e.what());
  }

  Checkpoint ckpt;
  std::size_t pos = header_end;
  try {
    ckpt.config = config_from_json(header.at("config"));
    const json& m = header.at("metadata");
    ckpt.metadata.epoch = m.at("epoch").get<int>();
    ckpt.metadata.seed = m.at("seed").get<std::uint64_t>();
    ckpt.metadata.final_train_loss = real_from(m.at("final_train_loss"));
    ckpt.metadata.final_val_loss = real_from(m.at("final_val_loss"));
    ckpt.metadata.precision = m.at("precision").get<std::string>();
    for (const json& t : header.at("tensors")) {
      NamedTensor nt;
      nt.name = t.at("name").get<std::string>();
      nt.shape = t.at("shape").get<Shape>();
      if (t.at("dtype").get<std::string>() != "f32") {
        fail(ErrorKind::kUnsupportedFormat, "checkpoint tensor " + nt.name + " has unsupported dtype");
      }
      const std::size_t count = shape_numel(nt.shape);
      const std::size_t nbytes = count * sizeof(float);
      if (bytes.size() - pos < nbytes) {
        fail(ErrorKind::kTruncated, "checkpoint payload ends inside tensor " + nt.name + " (declared " +
                                        shape_to_string(nt.shape) + ")");
      }
      nt.values.resize(count);
      std::memcpy(nt.values.data(), bytes.data() + pos, nbytes);
      pos += nbytes;
      ckpt.tensors.push_back(std::move(nt));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParse, std::string("checkpoint header: ") + e.what());
  }
  if (pos != bytes.size()) {
    fail(ErrorKind::kTruncated, "checkpoint payload length " + std::to_string(bytes.size() - header_end) +
                                    " disagrees with declared tensor shapes");
  }
  ckpt.validate();
  return ckpt;
}

void save_checkpoint_file(const std::filesystem::path& path, const Checkpoint& ckpt) {
  write_file_bytes(path, save_checkpoint(ckpt));
}

Checkpoint load_checkpoint_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return load_checkpoint(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.message());
  }
}

Checkpoint init_weights(const NetConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Checkpoint ckpt;
  ckpt.config = cfg;
  ckpt.metadata.seed = seed;
  ckpt.metadata.final_train_loss = std::numeric_limits<double>::quiet_NaN();
  ckpt.metadata.final_val_loss = std::numeric_limits<double>::quiet_NaN();
  const auto layout = parameter_layout(cfg);
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const auto& [name, shape] = layout[i];
    NamedTensor t{name, shape, std::vector<float>(shape_numel(shape), 0.0f)};
    if (shape.size() > 1) {
      const std::size_t fan_in = shape_numel(shape) / shape[0];
      const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
      const CounterRng rng(derive_key({seed, 0x1417ULL, i}));
      for (std::size_t k = 0; k < t.values.size(); ++k) t.values[k] = static_cast<float>(stddev * rng.normal(k));
    }
    ckpt.tensors.push_back(std::move(t));
  }
  return ckpt;
}

template <typename T>
nn::Network<T> network_from_checkpoint(const Checkpoint& ckpt) {
  ckpt.validate();
  nn::Network<T> net(ckpt.config);
  auto& params = net.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& src = ckpt.tensors[i].values;
    auto dst = params[i].value.values();
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] = static_cast<T>(src[k]);
  }
  return net;
}

template <typename T>
std::vector<NamedTensor> export_parameters(const nn::Network<T>& net) {
  std::vector<NamedTensor> out;
  for (const auto& p : net.parameters()) {
    NamedTensor t{p.name, p.value.shape(), std::vector<float>(p.value.numel())};
    for (std::size_t k = 0; k < t.values.size(); ++k) t.values[k] = static_cast<float>(p.value[k]);
    out.push_back(std::move(t));
  }
  return out;
}

template nn::Network<float> network_from_checkpoint<float>(const Checkpoint&);
template nn::Network<double> network_from_checkpoint<double>(const Checkpoint&);
template std::vector<NamedTensor> export_parameters<float>(const nn::Network<float>&);
template std::vector<NamedTensor> export_parameters<double>(const nn::Network<double>&);

}  // namespace vipr
