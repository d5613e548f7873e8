#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace vipr {

// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL) noexcept;

// Folds a list of words into one key; order matters.
std::uint64_t derive_key(std::initializer_list<std::uint64_t> parts) noexcept;

/// Counter-based generator: the value at counter i depends only on (key, i),
/// so draws are independent of evaluation order.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t bits(std::uint64_t counter) const noexcept {
    return mix64(key_ ^ mix64(counter + 0x632be59bd9b4e019ULL));
  }
  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }
  double uniform(std::uint64_t counter, double lo, double hi) const noexcept {
    return lo + (hi - lo) * uniform(counter);
  }
  // Standard normal via Box-Muller on counters 2i and 2i+1.
  double normal(std::uint64_t counter) const noexcept;

 private:
  std::uint64_t key_;
};

/// Sequential cursor over a CounterRng for call sites that draw a handful of
/// values in a fixed order.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) noexcept : rng_(key) {}

  std::uint64_t next_bits() noexcept { return rng_.bits(counter_++); }
  double uniform() noexcept { return rng_.uniform(counter_++); }
  double uniform(double lo, double hi) noexcept { return rng_.uniform(counter_++, lo, hi); }
  double normal() noexcept { return rng_.normal(counter_++); }
  // Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;

 private:
  CounterRng rng_;
  std::uint64_t counter_ = 0;
};

}  // namespace vipr
