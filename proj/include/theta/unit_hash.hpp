#pragma once

#include <compare>
#include <cstdint>
#include <string_view>

namespace theta {

struct HashSeed {
  std::uint64_t value = 0;

  friend constexpr bool operator==(HashSeed, HashSeed) = default;
};

/// A 64-bit hash together with its position in the open interval (0,1).
///
/// `value` is the binary64 nearest to (raw + 1/2) * 2^-64, clamped to stay
/// below 1. The mapping is non-decreasing in `raw`, so ordering by raw never
/// contradicts ordering by value; distinct raws may share a value once raw
/// exceeds 2^53.
struct UnitHash {
  std::uint64_t raw = 0;
  double value = 0.5 / 18446744073709551616.0;

  [[nodiscard]] static UnitHash from_raw(std::uint64_t raw) noexcept;
  /// The hash whose raw word is floor(v * 2^64); its value is exactly v for
  /// any binary64 v in [2^-10, 1).
  [[nodiscard]] static UnitHash from_value(double v) noexcept;

  friend constexpr bool operator==(const UnitHash& a, const UnitHash& b) noexcept {
    return a.raw == b.raw;
  }
  friend constexpr std::strong_ordering operator<=>(const UnitHash& a, const UnitHash& b) noexcept {
    return a.raw <=> b.raw;
  }
};

[[nodiscard]] double unit_value(std::uint64_t raw) noexcept;

/// Seeded 64-bit mix of an arbitrary byte string, mapped into (0,1).
[[nodiscard]] UnitHash hash_identifier(std::string_view id, HashSeed seed) noexcept;

/// Seed for the trial_index-th independent hash function derived from base.
/// Injective in trial_index for a fixed base.
[[nodiscard]] HashSeed derive_trial_seed(HashSeed base, std::uint64_t trial_index) noexcept;

/// The splitmix64 finalizer; a bijection on 64-bit words.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

}  // namespace theta
