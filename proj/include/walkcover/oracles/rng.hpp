#pragma once

#include <cstdint>

namespace walkcover::oracles {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// SplitMix64 keyed by (seed, stream): every Monte-Carlo episode owns an
// independent stream, so results do not depend on how episodes are
// scheduled across threads.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream)
      : state_(mix64(seed ^ 0x6A09E667F3BCC909ULL) ^ mix64(stream + 0x9E3779B97F4A7C15ULL)) {}

  std::uint64_t next() { return mix64(state_ += 0x9E3779B97F4A7C15ULL); }

  // Uniform in [0, n) by multiply-shift with rejection; n > 0.
  std::uint64_t below(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace walkcover::oracles
