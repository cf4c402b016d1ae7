#include "theta/unit_hash.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "theta/error.hpp"

namespace theta {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::IdsUnavailable: return "IdsUnavailable";
    case ErrorCode::WrongKind: return "WrongKind";
    case ErrorCode::SeedMismatch: return "SeedMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ResourceLimit: return "ResourceLimit";
    case ErrorCode::UnsupportedQ: return "UnsupportedQ";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvariantError: return "InvariantError";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr double kBelowOne = 1.0 - 0x1p-53;

std::uint64_t load_le(const char* p, std::size_t n) noexcept {
  std::uint64_t w = 0;
  for (std::size_t i = 0; i < n; ++i) {
    w |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  }
  return w;
}

}  // namespace

double unit_value(std::uint64_t raw) noexcept {
  // raw + 0.5 is exact below 2^52; above that the sum rounds to an integer,
  // which keeps the map monotone. Only the top few raws would round up to 1.
  const double v = std::ldexp(static_cast<double>(raw) + 0.5, -64);
  return std::min(v, kBelowOne);
}

UnitHash UnitHash::from_raw(std::uint64_t raw) noexcept {
  return UnitHash{raw, unit_value(raw)};
}

UnitHash UnitHash::from_value(double v) noexcept {
  if (!(v > 0.0)) return from_raw(0);
  if (v >= 1.0) return from_raw(~std::uint64_t{0});
  return from_raw(static_cast<std::uint64_t>(std::ldexp(v, 64)));
}

UnitHash hash_identifier(std::string_view id, HashSeed seed) noexcept {
  std::uint64_t h = mix64(seed.value ^ kGolden) ^ (static_cast<std::uint64_t>(id.size()) * kGolden);
  const char* p = id.data();
  std::size_t left = id.size();
  while (left >= 8) {
    h = mix64(h ^ load_le(p, 8)) + kGolden;
    p += 8;
    left -= 8;
  }
  h = mix64(h ^ load_le(p, left) ^ (static_cast<std::uint64_t>(left) << 59));
  h = mix64(h + kGolden);
  return UnitHash::from_raw(h);
}

HashSeed derive_trial_seed(HashSeed base, std::uint64_t trial_index) noexcept {
  // base + (i+1)*golden is injective in i (golden is odd) and mix64 is a bijection.
  return HashSeed{mix64(base.value + (trial_index + 1) * kGolden)};
}

}  // namespace theta
