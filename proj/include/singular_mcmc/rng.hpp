#pragma once

#include <cstdint>
#include <random>

namespace singular_mcmc {

//! splitmix64 step; used to derive independent seed streams from a master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d4a4a2fd58a33ULL;
  return z ^ (z >> 31);
}

//! Deterministic per-stream generator: stream k of a master seed is
//! independent of stream j != k. Used to give every replica rung (and the
//! swap scheduler) its own RNG.
inline std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t stream) {
  std::uint64_t s = master_seed ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL);
  std::uint64_t a = splitmix64(s);
  std::uint64_t b = splitmix64(s);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace singular_mcmc
