#include "vipr/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "vipr/checkpoint.hpp"
#include "vipr/layers.hpp"
#include "vipr/rng.hpp"

namespace vipr {

GradCheckReport grad_check(const NetConfig& cfg, std::uint64_t seed, double eps, const GradCheckOptions& options) {
  if (!(eps > 0)) fail(ErrorKind::kInvalidArgument, "finite-difference step must be positive");
  nn::Network<double> net = network_from_checkpoint<double>(init_weights(cfg, seed));
  RngStream rng(derive_key({seed, 0x6763ULL}));
  // Nonzero biases keep pre-activations away from ReLU kinks.
  for (auto& p : net.parameters()) {
    if (p.value.rank() == 1) {
      for (double& v : p.value.values()) v = options.zero_inputs ? 0.0 : rng.uniform(-0.1, 0.1);
    }
  }
  const auto s = static_cast<std::size_t>(cfg.input_size);
  Tensor<double> batch({options.batch, 1, s, s});
  std::vector<int> labels(options.batch, 0);
  if (!options.zero_inputs) {
    for (double& v : batch.values()) v = rng.uniform();
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 2 == 0);
  }
  const std::uint64_t dropout_key = derive_key({seed, 0xD120ULL});

  auto loss_at = [&]() {
    const Tensor<double> logits = net.forward(batch, nn::Mode::kTrain, dropout_key);
    return nn::bce_with_logits(logits, labels).loss;
  };

  GradCheckReport report;
  nn::ForwardCache<double> cache;
  const Tensor<double> logits = net.forward(batch, nn::Mode::kTrain, dropout_key, &cache);
  const auto bce = nn::bce_with_logits(logits, labels);
  report.finite = std::isfinite(bce.loss);
  net.zero_grad();
  net.backward(cache, bce.grad);

  for (auto& p : net.parameters()) {
    for (std::size_t k = 0; k < p.value.numel(); ++k) {
      const double saved = p.value[k];
      p.value[k] = saved + eps;
      const double up = loss_at();
      p.value[k] = saved - eps;
      const double down = loss_at();
      p.value[k] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double analytic = p.grad[k];
      if (!std::isfinite(numeric) || !std::isfinite(analytic)) report.finite = false;
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
      const double rel = std::abs(analytic - numeric) / denom;
      ++report.checked;
      if (rel > report.max_relative_error || !std::isfinite(rel)) {
        report.max_relative_error = rel;
        report.worst_parameter = p.name;
        report.worst_index = k;
      }
    }
  }
  return report;
}

}  // namespace vipr
