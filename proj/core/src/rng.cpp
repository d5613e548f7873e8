#include "vipr/rng.hpp"

#include <cmath>
#include <numbers>

namespace vipr {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) noexcept {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_key(std::initializer_list<std::uint64_t> parts) noexcept {
  std::uint64_t k = 0x243f6a8885a308d3ULL;
  for (std::uint64_t p : parts) k = mix64(k ^ mix64(p));
  return k;
}

double CounterRng::normal(std::uint64_t counter) const noexcept {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform(2 * counter);
  const double u2 = uniform(2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t RngStream::below(std::uint64_t n) noexcept {
  // Lemire's multiply-shift; the bias is < n / 2^64, irrelevant at our sizes.
  __extension__ using u128 = unsigned __int128;
  return static_cast<std::uint64_t>((static_cast<u128>(next_bits()) * n) >> 64);
}

}  // namespace vipr
