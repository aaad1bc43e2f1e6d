#pragma once

#include <array>
#include <cstdint>

namespace rectconv {

/// Philox4x32-10 block: a keyed bijection of a 128-bit counter. Every output
/// depends only on (key, counter), so any matrix entry can be regenerated in
/// isolation and in any order.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Two uniforms in (0, 1) with 53 random bits each, drawn from block
/// (i, j, stream) under `seed`.
std::array<double, 2> uniform_pair(std::uint64_t seed, std::uint32_t i, std::uint32_t j,
                                   std::uint32_t stream = 0) noexcept;

/// SplitMix64 finalizer; used to derive per-trial seeds from a base seed.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for trial `index` of stream `stream` under `base_seed`.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t stream,
                          std::uint64_t index) noexcept;

}  // namespace rectconv
