#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dracc {

/// The library's random engine. Every stream is seeded from a 64-bit value.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Stateless substream seed: a hash of the master seed and an index path, so
/// replication k gets the same stream no matter which worker runs it.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace dracc
