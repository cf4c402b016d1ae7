#include "theta/oracles.hpp"

#include <cmath>
#include <string>

#include "theta/error.hpp"
#include "theta/tcf.hpp"  // alpha_for

namespace theta::oracles {

namespace {

void check_level_args(std::uint32_t k, std::uint64_t u) {
  if (k < 1) throw Error(ErrorCode::DomainError, "k must be at least 1");
  if (u > kMaxLevelDpU) {
    throw Error(ErrorCode::ResourceLimit, "u = " + std::to_string(u) + " exceeds the quadratic DP limit");
  }
}

void check_kn(std::uint32_t k, std::uint64_t n, std::uint32_t min_k) {
  if (k < min_k) throw Error(ErrorCode::DomainError, "k must be at least " + std::to_string(min_k));
  if (n < k) throw Error(ErrorCode::DomainError, "n must be at least k");
}

// One step u-1 -> u of the recurrence, in place, walking i downwards.
void advance(std::vector<double>& probs, const std::vector<double>& pow) {
  const std::size_t u = probs.size();
  probs.push_back(0.0);
  for (std::size_t i = u; i >= 1; --i) {
    probs[i] = (1.0 - pow[i]) * probs[i] + pow[i - 1] * probs[i - 1];
  }
  probs[0] = 0.0;
}

std::vector<double> alpha_powers(std::uint32_t k, std::uint64_t n) {
  const double a = alpha_for(k);
  std::vector<double> pow(n + 1);
  for (std::uint64_t i = 0; i <= n; ++i) pow[i] = std::pow(a, static_cast<double>(i));
  return pow;
}

}  // namespace

LevelDistribution alpha_level_distribution(std::uint32_t k, std::uint64_t u) {
  check_level_args(k, u);
  const auto pow = alpha_powers(k, u);
  LevelDistribution d{k, u, {1.0}};
  d.probs.reserve(u + 1);
  for (std::uint64_t step = 1; step <= u; ++step) advance(d.probs, pow);
  return d;
}

std::vector<LevelDistribution> alpha_level_distributions(std::uint32_t k, std::uint64_t u_max) {
  check_level_args(k, u_max);
  const auto pow = alpha_powers(k, u_max);
  std::vector<LevelDistribution> rows;
  rows.reserve(u_max + 1);
  std::vector<double> probs{1.0};
  rows.push_back({k, 0, probs});
  for (std::uint64_t u = 1; u <= u_max; ++u) {
    advance(probs, pow);
    rows.push_back({k, u, probs});
  }
  return rows;
}

double g_moment(const LevelDistribution& dist, unsigned q) {
  const double a = alpha_for(dist.k);
  double sum = 0.0;
  for (std::size_t i = 0; i < dist.probs.size(); ++i) {
    const double p = dist.probs[i];
    // Underflowed tails would otherwise meet overflowed weights as 0 * inf.
    if (p == 0.0) continue;
    const double exponent = -static_cast<double>(q) * static_cast<double>(i);
    const double w = std::pow(a, exponent);
    sum += std::isfinite(w) ? p * w : std::exp(std::log(p) + exponent * std::log(a));
  }
  return sum;
}

double g_moment_dp(unsigned q, std::uint32_t k, std::uint64_t u) {
  return g_moment(alpha_level_distribution(k, u), q);
}

double g_closed(unsigned q, std::uint32_t k, std::uint64_t u) {
  const double kk = k;
  const double uu = static_cast<double>(u);
  switch (q) {
    case 0: return 1.0;
    case 1: return (kk + uu) / kk;
    case 2: return (kk * kk * kk + 2.0 * kk * kk * uu + kk * uu * uu + uu * (uu - 1.0) / 2.0) / (kk * kk * kk);
    default: throw Error(ErrorCode::UnsupportedQ, "no closed form for q = " + std::to_string(q));
  }
}

Moments alpha_sample_size_moments(const LevelDistribution& dist) {
  const double a = alpha_for(dist.k);
  const auto pow = alpha_powers(dist.k, 2 * dist.probs.size() + 1);
  Moments m;
  for (std::size_t i = 0; i < dist.probs.size(); ++i) {
    m.mean += dist.probs[i] * static_cast<double>(dist.k);
    m.variance += dist.probs[i] * (a - pow[2 * i + 1]) / (1.0 - a * a);
  }
  return m;
}

Moments alpha_sample_size_moments(std::uint32_t k, std::uint64_t u) {
  return alpha_sample_size_moments(alpha_level_distribution(k, u));
}

double alpha_estimator_variance(std::uint32_t k, std::uint64_t n) {
  check_kn(k, n, 1);
  const double kk = k;
  const double nn = static_cast<double>(n);
  return ((2.0 * kk + 1.0) * nn * nn - (kk * kk + kk) * (2.0 * nn - 1.0) - nn) / (2.0 * kk * kk);
}

double alpha_estimator_variance_dp(const LevelDistribution& dist) {
  const double a = alpha_for(dist.k);
  const double c = a / (1.0 - a * a);
  const double kk = dist.k;
  const double n = kk + static_cast<double>(dist.u);
  return (c + kk * kk) * g_moment(dist, 2) - c - n * n;
}

Moments hip_mean_var(std::uint32_t k, std::uint64_t n) {
  check_kn(k, n, 1);
  const double u = static_cast<double>(n - k);
  return {static_cast<double>(n), u * (u - 1.0) / (2.0 * k)};
}

double kmv_variance(std::uint32_t k, std::uint64_t n) {
  check_kn(k, n, 2);
  const double nn = static_cast<double>(n);
  return (nn * nn - k * nn) / (k - 1.0);
}

double kmv_subpop_variance(std::uint32_t k, std::uint64_t n, std::uint64_t n_p) {
  check_kn(k, n, 2);
  if (n_p > n) throw Error(ErrorCode::DomainError, "n_P must not exceed n");
  return static_cast<double>(n_p) * static_cast<double>(n - k) / (k - 1.0);
}

double adaptive_variance_approx(std::uint32_t k, std::uint64_t n) {
  check_kn(k, n, 2);
  const double nn = static_cast<double>(n);
  return 1.44 * nn * nn / (k - 1.0);
}

}  // namespace theta::oracles
