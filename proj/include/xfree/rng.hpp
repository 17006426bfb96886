#pragma once

#include <cstdint>

namespace xfree {

// Counter-based generator: every draw is a pure function of
// (seed, stream, index, lane), so independent consumers can share a seed
// without coordinating state and results do not depend on evaluation order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t draw(std::uint64_t stream, std::uint64_t index, std::uint64_t lane = 0) const noexcept {
    std::uint64_t z = mix(seed_ ^ mix(stream + 0x632be59bd9b4e019ULL));
    z = mix(z ^ mix(index + 0x9e3779b97f4a7c15ULL));
    return mix(z ^ mix(lane + 0x8cb92ba72f3d8dd7ULL));
  }

  // Uniform in [0, bound), bound > 0. Lemire rejection over successive lanes.
  std::uint64_t uniform(std::uint64_t bound, std::uint64_t stream, std::uint64_t index) const noexcept {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (std::uint64_t lane = 0;; ++lane) {
      const unsigned __int128 m = static_cast<unsigned __int128>(draw(stream, index, lane)) * bound;
      if (static_cast<std::uint64_t>(m) >= threshold) return static_cast<std::uint64_t>(m >> 64);
    }
  }

 private:
  static std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
};

}  // namespace xfree
