#pragma once

#include <cstdint>
#include <vector>

namespace theta::oracles {

/// Exact law of the Alpha level counter after u = n - k novel suffix items:
/// probs[i] = Pr(I = i; u), i in [0, u].
struct LevelDistribution {
  std::uint32_t k = 1;
  std::uint64_t u = 0;
  std::vector<double> probs;
};

inline constexpr std::uint64_t kMaxLevelDpU = 100000;

/// Dynamic program over
///   Pr(i;u) = (1 - a^i) Pr(i;u-1) + a^(i-1) Pr(i-1;u-1),  a = k/(k+1).
/// Throws Error{ResourceLimit} for u > kMaxLevelDpU, Error{DomainError} for k < 1.
[[nodiscard]] LevelDistribution alpha_level_distribution(std::uint32_t k, std::uint64_t u);

/// Rows u = 0..u_max of the same recurrence from a single sweep.
[[nodiscard]] std::vector<LevelDistribution> alpha_level_distributions(std::uint32_t k, std::uint64_t u_max);

/// g(q,k,u) = sum_i a^(-q i) Pr(i;u) from the distribution.
[[nodiscard]] double g_moment(const LevelDistribution& dist, unsigned q);
[[nodiscard]] double g_moment_dp(unsigned q, std::uint32_t k, std::uint64_t u);

/// Closed forms for q in {0,1,2}; Error{UnsupportedQ} otherwise.
[[nodiscard]] double g_closed(unsigned q, std::uint32_t k, std::uint64_t u);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Mean and variance of the Alpha sample size |S| as mixtures over the level law,
/// using E(|S| | I=i) = k and Var(|S| | I=i) = (a - a^(2i+1)) / (1 - a^2).
[[nodiscard]] Moments alpha_sample_size_moments(const LevelDistribution& dist);
[[nodiscard]] Moments alpha_sample_size_moments(std::uint32_t k, std::uint64_t u);

/// Var(|S| / a^I) in closed form. Error{DomainError} if n < k.
[[nodiscard]] double alpha_estimator_variance(std::uint32_t k, std::uint64_t n);
/// Same quantity from the level law: E(Z^2) = (a/(1-a^2) + k^2) g(2) - a/(1-a^2).
[[nodiscard]] double alpha_estimator_variance_dp(const LevelDistribution& dist);

/// (n, u(u-1)/(2k)) for the estimator k / a^I. Error{DomainError} if n < k.
[[nodiscard]] Moments hip_mean_var(std::uint32_t k, std::uint64_t n);

/// (n^2 - k n) / (k - 1).
[[nodiscard]] double kmv_variance(std::uint32_t k, std::uint64_t n);
/// n_P (n - k) / (k - 1).
[[nodiscard]] double kmv_subpop_variance(std::uint32_t k, std::uint64_t n, std::uint64_t n_p);
/// 1.44 n^2 / (k - 1). Only a center value: the true curve oscillates in n.
[[nodiscard]] double adaptive_variance_approx(std::uint32_t k, std::uint64_t n);

}  // namespace theta::oracles
