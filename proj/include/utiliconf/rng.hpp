#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace utiliconf {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Maps 64 random bits to the open interval (0,1).
inline constexpr double bits_to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

template <std::uniform_random_bit_generator G>
double open_unit(G& gen) {
  static_assert(G::max() - G::min() == std::numeric_limits<std::uint64_t>::max() ||
                    G::max() - G::min() == std::numeric_limits<std::uint32_t>::max(),
                "generator must produce 32 or 64 full bits");
  std::uint64_t bits = static_cast<std::uint64_t>(gen() - G::min());
  if constexpr (G::max() - G::min() == std::numeric_limits<std::uint32_t>::max()) {
    bits = (bits << 32) | static_cast<std::uint64_t>(gen() - G::min());
  }
  return bits_to_open_unit(bits);
}

// Counter-based keyed stream: the k-th output depends only on (key, k), so a
// stream can be re-created anywhere without carrying generator state.
class KeyedStream {
 public:
  using result_type = std::uint64_t;

  explicit KeyedStream(std::uint64_t key) : key_(key) {}
  KeyedStream(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
      : key_(splitmix64(splitmix64(splitmix64(seed) ^ a) ^ (b * 0xD1B54A32D192ED03ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return splitmix64(key_ ^ splitmix64(counter_++)); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Derives an independent child seed, e.g. one per trial.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

}  // namespace utiliconf
