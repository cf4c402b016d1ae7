#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace theta {

/// base^0, base^1, ... computed by repeated multiplication, so a given
/// exponent always yields the same binary64 value no matter who asks.
class PowerTable {
 public:
  explicit PowerTable(double base) : base_(base), powers_{1.0} {}

  [[nodiscard]] double base() const noexcept { return base_; }
  [[nodiscard]] double operator[](std::size_t i) {
    while (powers_.size() <= i) powers_.push_back(powers_.back() * base_);
    return powers_[i];
  }

 private:
  double base_;
  std::vector<double> powers_;
};

[[nodiscard]] constexpr double alpha_for(std::uint32_t k) noexcept {
  return static_cast<double>(k) / (static_cast<double>(k) + 1.0);
}

// Reference threshold choosing functions. Each takes the hash values of a
// stream in arrival order (duplicates allowed) and returns theta in (0,1].
// When the defining order statistic does not exist the result is 1.

/// (k+1)-st smallest distinct hash.
[[nodiscard]] double kmv_threshold(std::span<const double> hashes, std::uint32_t k);

/// Largest beta^i strictly below the (k+1)-st smallest distinct hash.
[[nodiscard]] double adaptive_threshold(std::span<const double> hashes, std::uint32_t k, double beta);

/// min(kmv_threshold, p).
[[nodiscard]] double pkmv_threshold(std::span<const double> hashes, std::uint32_t k, double p);

[[nodiscard]] inline double fixed_threshold(double p) noexcept { return p; }

struct AlphaTrace {
  double theta = 1.0;
  std::uint64_t level = 0;
  bool prefix_complete = false;
};

/// Two-pass Alpha TCF: dedupe the shortest prefix holding k unique hashes,
/// then bump the level for each novel suffix hash below alpha^level.
[[nodiscard]] AlphaTrace alpha_trace(std::span<const double> hashes, std::uint32_t k);
[[nodiscard]] double alpha_threshold(std::span<const double> hashes, std::uint32_t k);

/// The upward-biased counterexample: m_k if (k-1)/m_k > k/m_{k+1}, else
/// m_{k+1}. Throws Error{DomainError} with fewer than k+1 distinct hashes.
[[nodiscard]] double biased_threshold(std::span<const double> hashes, std::uint32_t k);

/// A TCF as a black box: (k, hashes in stream order) -> theta.
using TcfFunction = std::function<double(std::uint32_t, std::span<const double>)>;

}  // namespace theta
