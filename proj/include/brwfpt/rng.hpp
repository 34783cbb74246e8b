#pragma once

#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace brwfpt {

using Rng = std::mt19937_64;

/// Independent substream keyed by (seed, index). Same key, same stream.
inline Rng make_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    0x62727766u};
  return Rng(seq);
}

/// Child seed for a derived batch (e.g. one pmf term of a cdf sum).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  Rng r = make_stream(seed, index ^ 0x9e3779b97f4a7c15ULL);
  return r();
}

inline double standard_normal(Rng& rng) {
  // Ziggurat; stateless, so draws depend only on the engine state.
  boost::random::normal_distribution<double> dist;
  return dist(rng);
}

inline double uniform01(Rng& rng) {
  boost::random::uniform_01<double> dist;
  return dist(rng);
}

}  // namespace brwfpt
