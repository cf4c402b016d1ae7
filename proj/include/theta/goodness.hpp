#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "theta/sampler.hpp"
#include "theta/tcf.hpp"

namespace theta::goodness {

struct Violation {
  double x = 0.0;
  std::optional<double> y;  // second free hash, two-position checks only
  double theta = 0.0;
  char subcondition = 'a';  // 'a': below F but theta != F; 'b': at/above F but theta > max
};

/// Outcome of probing one fix-all-but-one (or -two) projection on a grid.
/// A violation is a certificate; satisfaction is grid evidence only.
struct ProjectionReport {
  bool satisfied = true;
  /// Candidate fixed threshold: the projection at the smallest grid point.
  std::optional<double> fixed_threshold;
  std::optional<Violation> counterexample;
};

inline constexpr std::size_t kDefaultGrid = 4096;

/// Inserts a free hash x at `free_position` of `fixed_hashes` and sweeps x over
/// the midpoints (j + 1/2)/grid_points. With F the value at the first point,
/// checks x < F => T(x) == F and x >= F => T(x) <= x.
/// Throws Error{DomainError} if grid_points < 100 or the position is out of range.
[[nodiscard]] ProjectionReport check_one_goodness(const TcfFunction& tcf, std::uint32_t k,
                                                  std::span<const double> fixed_hashes,
                                                  std::size_t free_position,
                                                  std::size_t grid_points = kDefaultGrid);

/// Bivariate analog with free hashes at two distinct positions of the final
/// stream, swept over a grid_points x grid_points lattice.
[[nodiscard]] ProjectionReport check_two_goodness(const TcfFunction& tcf, std::uint32_t k,
                                                  std::span<const double> fixed_hashes,
                                                  std::size_t first_position, std::size_t second_position,
                                                  std::size_t grid_points = kDefaultGrid);

/// tcf(k, a0 a1 a2) <= tcf(k, a1).
[[nodiscard]] bool check_monotonicity(const TcfFunction& tcf, std::uint32_t k, std::span<const double> a0,
                                      std::span<const double> a1, std::span<const double> a2);

/// The upward-biased TCF, as a checker-compatible function.
[[nodiscard]] double biased_tcf(std::uint32_t k, std::span<const double> hashes);

/// Reference TCF for one of the shipped sampler kinds.
[[nodiscard]] TcfFunction shipped_tcf(SamplerKind kind, double beta = 0.5, double p = 1.0);

/// Theta of the union of consecutive sub-streams: min over parts of
/// part.tcf(k, segment). The last part takes whatever follows the others.
struct UnionPart {
  TcfFunction tcf;
  std::size_t length = 0;
};
[[nodiscard]] TcfFunction min_union_tcf(std::vector<UnionPart> parts);

// Randomized small-instance suite.

struct SuiteInstance {
  std::string tcf_name;
  std::uint32_t k = 1;
  std::vector<double> fixed_hashes;
  std::size_t first_position = 0;
  std::size_t second_position = 1;
};

struct SuiteResult {
  SuiteInstance instance;
  /// One report per free position 0..fixed_hashes.size().
  std::vector<ProjectionReport> one_goodness;
  std::optional<ProjectionReport> two_goodness;

  [[nodiscard]] bool passed() const;
};

struct SuiteOptions {
  std::uint32_t min_k = 1;
  std::uint32_t max_k = 5;
  std::size_t max_stream = 8;
  std::size_t seeds = 20;
  std::size_t grid_points = kDefaultGrid;
  std::uint64_t base_seed = 1;
  bool with_two_goodness = true;
};

/// Names understood by run_goodness_suite and the CLI:
/// kmv, adaptive, pkmv, fixed, alpha, union, biased.
[[nodiscard]] std::vector<std::string> suite_tcf_names();

/// Runs every (k, seed) instance for one TCF family. Random parameters
/// (beta, p, union split) are drawn per instance from the seed.
[[nodiscard]] std::vector<SuiteResult> run_goodness_suite(const std::string& tcf_name, const SuiteOptions& opts);

}  // namespace theta::goodness
