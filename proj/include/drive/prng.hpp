#pragma once

// Counter-based deterministic random streams. Every consumer addresses a
// draw as (seed, index), so results do not depend on batching, call order
// or thread schedule.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace drive::prng {

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer (Stafford mix 13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

// index-th 64-bit word of the stream identified by seed.
constexpr std::uint64_t word_at(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(seed + (index + 1) * kGamma);
}

// Folds v into h; used to derive sub-stream seeds, e.g.
// hash_combine(hash_combine(master, trial), client).
constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) noexcept {
  return mix64(h ^ (v + kGamma + (h << 12) + (h >> 4)));
}

// Uniform in [0, 1), 53-bit resolution.
constexpr double unit_half_open(std::uint64_t word) noexcept {
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

// Uniform in (0, 1]; safe as a log() argument.
constexpr double unit_open_zero(std::uint64_t word) noexcept {
  return static_cast<double>((word >> 11) + 1) * 0x1.0p-53;
}

inline double uniform_at(std::uint64_t seed, std::uint64_t index) noexcept {
  return unit_half_open(word_at(seed, index));
}

// One Rademacher sign per coordinate, consumed in index order.
inline double rademacher_at(std::uint64_t seed, std::uint64_t index) noexcept {
  return (word_at(seed, index) >> 63) ? 1.0 : -1.0;
}

// Standard normal draws via Box-Muller. Draw i belongs to the pair
// j = i/2 fed by uniform words (2j, 2j+1); even i takes the cosine branch,
// odd i the sine branch. This convention is pinned by golden tests.
inline double normal_at(std::uint64_t seed, std::uint64_t index) noexcept {
  const std::uint64_t j = index >> 1;
  const double u1 = unit_open_zero(word_at(seed, 2 * j));
  const double u2 = unit_half_open(word_at(seed, 2 * j + 1));
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return (index & 1) ? r * std::sin(theta) : r * std::cos(theta);
}

// Bulk fill out[k] = normal_at(seed, first_index + k). first_index must be
// even so pairs stay aligned with the scalar form.
void fill_normal(std::uint64_t seed, std::uint64_t first_index, std::span<double> out);

inline double exponential_at(std::uint64_t seed, std::uint64_t index) noexcept {
  return -std::log(unit_open_zero(word_at(seed, index)));
}

}  // namespace drive::prng
