#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "theta/error.hpp"
#include "theta/oracles.hpp"
#include "theta/sampler.hpp"

using namespace theta;
using namespace theta::oracles;

TEST_CASE("level distribution base cases") {
  for (std::uint32_t k : {1u, 4u, 64u}) {
    CHECK(alpha_level_distribution(k, 0).probs == std::vector<double>{1.0});
    CHECK(alpha_level_distribution(k, 1).probs == std::vector<double>{0.0, 1.0});
  }
}

TEST_CASE("level distribution for k=4, u=3 matches the hand-expanded recurrence") {
  // a = 0.8: Pr(.;2) = {0, 0.2, 0.8}; Pr(.;3) = {0, 0.04, 0.448, 0.512}.
  const auto d = alpha_level_distribution(4, 3);
  REQUIRE(d.probs.size() == 4);
  CHECK(d.probs[0] == 0.0);
  CHECK(d.probs[1] == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(d.probs[2] == doctest::Approx(0.448).epsilon(1e-12));
  CHECK(d.probs[3] == doctest::Approx(0.512).epsilon(1e-12));
  // E(k / a^I) = k g(1) = n = 7.
  CHECK(std::abs(4.0 * g_moment(d, 1) - 7.0) < 1e-9);
  CHECK(g_moment(d, 1) == doctest::Approx(7.0 / 4.0).epsilon(1e-12));
  CHECK(g_moment(d, 2) == doctest::Approx(199.0 / 64.0).epsilon(1e-12));
  CHECK(g_moment_dp(0, 4, 3) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("table of rows agrees with single-row evaluation") {
  const auto rows = alpha_level_distributions(5, 40);
  REQUIRE(rows.size() == 41);
  for (std::uint64_t u : {0u, 1u, 7u, 40u}) {
    CHECK(rows[u].probs == alpha_level_distribution(5, u).probs);
  }
}

TEST_CASE("closed forms for g") {
  CHECK(g_closed(1, 4, 3) == 1.75);
  CHECK(g_closed(2, 4, 3) == 199.0 / 64.0);
  CHECK(g_closed(2, 9, 0) == 1.0);
  CHECK(g_closed(0, 9, 123) == 1.0);
  try {
    (void)g_closed(3, 4, 3);
    FAIL("expected UnsupportedQ");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedQ);
  }
}

TEST_CASE("DP and closed forms agree on a sample of (k, u)") {
  for (std::uint32_t k : {1u, 2u, 7u, 32u}) {
    const auto rows = alpha_level_distributions(k, 200);
    for (const auto& d : rows) {
      for (unsigned q = 0; q <= 2; ++q) {
        const double closed = g_closed(q, k, d.u);
        CHECK(std::abs(g_moment(d, q) - closed) <= 1e-9 * closed);
      }
    }
  }
}

TEST_CASE("level law matches a simulation of the alpha sampler") {
  // Independent route: run the real sampler on random streams and histogram its level.
  constexpr std::uint32_t k = 4;
  constexpr int n = 20;
  constexpr int trials = 100000;
  const auto d = alpha_level_distribution(k, n - k);
  std::vector<double> freq(d.probs.size(), 0.0);
  std::mt19937_64 rng(12345);
  for (int t = 0; t < trials; ++t) {
    Sampler s({.kind = SamplerKind::Alpha, .k = k});
    for (int i = 0; i < n; ++i) s.update(UnitHash::from_raw(rng()));
    freq[s.level()] += 1.0;
  }
  for (std::size_t i = 0; i < d.probs.size(); ++i) {
    const double p = d.probs[i];
    const double se = std::sqrt(p * (1.0 - p) / trials);
    CAPTURE(i);
    CHECK(std::abs(freq[i] / trials - p) <= 4.0 * se + 1e-12);
  }
}

TEST_CASE("sample size moments") {
  const auto degenerate = alpha_sample_size_moments(6, 0);
  CHECK(degenerate.mean == 6.0);
  CHECK(degenerate.variance == 0.0);
  for (std::uint32_t k : {1u, 3u, 16u}) {
    for (std::uint64_t u : {1u, 10u, 300u}) {
      const auto m = alpha_sample_size_moments(k, u);
      CHECK(std::abs(m.mean - k) < 1e-9);
      CHECK(m.variance < k / 2.0 + 0.25);
      CHECK(m.variance >= 0.0);
    }
  }
}

TEST_CASE("alpha estimator variance") {
  CHECK(alpha_estimator_variance(4, 7) == 5.4375);
  CHECK(alpha_estimator_variance_dp(alpha_level_distribution(4, 3)) == doctest::Approx(5.4375).epsilon(1e-12));
  CHECK(alpha_estimator_variance(5, 5) == 0.0);
  for (std::uint32_t k : {1u, 2u, 10u, 128u}) {
    for (std::uint64_t n : {k + 1ull, 2ull * k + 3, 4096ull}) {
      if (n < k) continue;
      CHECK(alpha_estimator_variance(k, n) < static_cast<double>(n * n) / (k - 0.5));
    }
  }
  CHECK_THROWS_AS((void)alpha_estimator_variance(5, 4), Error);
}

TEST_CASE("HIP mean and variance") {
  const auto m = hip_mean_var(4, 7);
  CHECK(m.mean == 7.0);
  CHECK(m.variance == 0.75);
  // Cross-check against the level law: k^2 g(2) - n^2.
  CHECK(16.0 * g_moment_dp(2, 4, 3) - 49.0 == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(hip_mean_var(9, 9).variance == 0.0);
  CHECK(hip_mean_var(9, 10).variance == 0.0);
  CHECK(hip_mean_var(128, 4096).variance < 4096.0 * 4096.0 / 256.0);
  CHECK_THROWS_AS((void)hip_mean_var(9, 8), Error);
}

TEST_CASE("prior-art variance formulas") {
  CHECK(kmv_variance(128, 4096) == doctest::Approx(16252928.0 / 127.0).epsilon(1e-15));
  CHECK(kmv_variance(128, 4096) == doctest::Approx(127975.8).epsilon(1e-6));
  CHECK(kmv_variance(16, 16) == 0.0);
  CHECK(kmv_subpop_variance(16, 100, 0) == 0.0);
  CHECK(kmv_subpop_variance(128, 4096, 410) == doctest::Approx(410.0 * 3968.0 / 127.0));
  CHECK(adaptive_variance_approx(128, 4096) == doctest::Approx(1.44 * 4096.0 * 4096.0 / 127.0));
  CHECK_THROWS_AS((void)kmv_variance(1, 10), Error);
  CHECK_THROWS_AS((void)kmv_subpop_variance(8, 10, 11), Error);
}

TEST_CASE("DP refuses oversized u") {
  try {
    (void)alpha_level_distribution(4, kMaxLevelDpU + 1);
    FAIL("expected ResourceLimit");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ResourceLimit);
  }
}
