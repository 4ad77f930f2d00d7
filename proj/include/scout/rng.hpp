#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace scout {

using Rng = std::mt19937_64;

// Stream tags keep substreams for unrelated purposes disjoint even when they
// share one master seed.
inline constexpr std::uint64_t kStreamBootstrap = 1;
inline constexpr std::uint64_t kStreamInquiry = 2;
inline constexpr std::uint64_t kStreamNested = 3;
inline constexpr std::uint64_t kStreamResample = 4;
inline constexpr std::uint64_t kStreamSensor = 5;
inline constexpr std::uint64_t kStreamNestedInit = 6;
inline constexpr std::uint64_t kStreamNestedWalk = 7;
inline constexpr std::uint64_t kStreamGridJitter = 8;
inline constexpr std::uint64_t kStreamMapPoint = 9;
inline constexpr std::uint64_t kStreamBaseline = 10;

namespace detail {
inline std::vector<std::uint32_t> seed_words(std::initializer_list<std::uint64_t> parts) {
  std::vector<std::uint32_t> words;
  words.reserve(parts.size() * 2);
  for (std::uint64_t p : parts) {
    words.push_back(static_cast<std::uint32_t>(p));
    words.push_back(static_cast<std::uint32_t>(p >> 32));
  }
  return words;
}
}  // namespace detail

/// Fresh engine deterministically derived from the given id parts.
inline Rng child_rng(std::initializer_list<std::uint64_t> parts) {
  auto words = detail::seed_words(parts);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

/// 64-bit seed deterministically derived from the given id parts.
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
  auto words = detail::seed_words(parts);
  std::seed_seq seq(words.begin(), words.end());
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

inline double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// One Gaussian draw; sigma == 0 degenerates to the mean exactly.
inline double normal_draw(Rng& rng, double mean, double sigma) {
  return mean + sigma * std::normal_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace scout
