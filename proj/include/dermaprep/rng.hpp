#pragma once

#include <cstdint>
#include <string_view>

namespace dermaprep {

// SplitMix64 finaliser (with the golden-ratio increment folded in).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Counter-based generator: draw(i) is a pure function of (key, i), so
// streams can be split by key and consumed in any order.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) noexcept : key_(splitmix64(seed)) {}

  // Independent stream for one (seed, item, transform) triple.
  static constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view item,
                                             std::uint64_t transform) noexcept {
    std::uint64_t k = splitmix64(seed);
    k = splitmix64(k ^ fnv1a64(item));
    return splitmix64(k ^ transform);
  }

  constexpr std::uint64_t draw(std::uint64_t counter) const noexcept {
    return splitmix64(key_ ^ splitmix64(counter));
  }

  // Integer in [0, n); n must be > 0.
  constexpr std::uint64_t below(std::uint64_t counter, std::uint64_t n) const noexcept {
    return draw(counter) % n;
  }

 private:
  std::uint64_t key_;
};

}  // namespace dermaprep
