#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace aol {

using Rng = std::mt19937_64;

// Independent, reproducible streams derived from a root seed. The path
// components name the stream (trial index, column index, purpose tag...).
Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {});

// Scalar seed derived the same way, for APIs that take a seed.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

// Stream tags used across the library.
namespace stream {
inline constexpr std::uint64_t sign = 0x5167;
inline constexpr std::uint64_t unit_rows = 0x0a11;
inline constexpr std::uint64_t perturb = 0x9e27;
inline constexpr std::uint64_t data = 0xda7a;
inline constexpr std::uint64_t kernel = 0x6e71;
inline constexpr std::uint64_t noise = 0x4015;
inline constexpr std::uint64_t patches = 0x7a7c;
}  // namespace stream

}  // namespace aol
