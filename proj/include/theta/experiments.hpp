#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "theta/sampler.hpp"
#include "theta/sketch.hpp"
#include "theta/streams.hpp"

namespace theta::mc {

/// Summary of one estimator over independent trials against a known truth.
struct TrialStats {
  std::size_t trials = 0;
  double mean = 0.0;
  double sample_variance = 0.0;  // divisor trials - 1
  double stderr_of_mean = 0.0;
  /// Standard error of sample_variance, from the fourth central moment.
  double stderr_of_variance = 0.0;
  double truth = 0.0;
  double rmse_over_truth = 0.0;

  [[nodiscard]] static TrialStats from(std::span<const double> values, double truth);
};

/// Worker threads for experiments: THETA_THREADS if set and positive,
/// otherwise the hardware concurrency.
[[nodiscard]] std::size_t experiment_threads();

/// Runs body(t) for t in [0, n) across experiment_threads() workers. Bodies
/// must write only to per-t storage.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

enum class Estimator { Framework, Hip };

/// Several statistics from one set of trials.
struct EstimatorRun {
  /// Framework estimate |P(S)|/theta of the union sketch, per predicate.
  std::vector<TrialStats> per_predicate;
  /// k / alpha^i, single-stream alpha runs only.
  std::optional<TrialStats> hip;
  /// Retained sample size |S| of the (union) sketch.
  TrialStats sample_size;
};

/// Trial t hashes with derive_trial_seed(cfg.seed, t). Multi-stream specs
/// are sketched per stream and combined with theta_union; truth is the number
/// of union ids satisfying each predicate.
///
/// Throws Error{DomainError} for trials < 100, Error{IdsUnavailable} for a
/// non-trivial predicate without retain_ids, Error{WrongKind} when HIP is
/// requested for a non-alpha sampler or a multi-stream spec.
[[nodiscard]] EstimatorRun run_estimator_trials(const SamplerConfig& cfg, const StreamSpec& spec,
                                                std::span<const Predicate> predicates, std::size_t trials,
                                                bool with_hip);

[[nodiscard]] TrialStats run_estimator_trials(const SamplerConfig& cfg, const StreamSpec& spec,
                                              const Predicate& predicate, Estimator estimator,
                                              std::size_t trials);

struct ComparativeResult {
  TrialStats union_stats;   // ThetaUnion of per-stream sketches
  TrialStats concat_stats;  // one sketch of the concatenated stream
  double var_union = 0.0;
  double var_concat = 0.0;
  double ratio = 0.0;  // var_union / var_concat
};

/// Both arms of a trial share one hash seed. Requires at least two streams.
[[nodiscard]] ComparativeResult run_comparative_variance(const StreamSpec& spec, const SamplerConfig& cfg,
                                                         const Predicate& predicate, std::size_t trials);

struct CovarianceResult {
  double covariance = 0.0;
  double stderr_of_covariance = 0.0;
  TrialStats first;   // V at position l1
  TrialStats second;  // V at position l2
};

/// Per-item estimates V_l = [h(id_l) < theta] / theta on a sorted stream of n
/// ids, for two positions, with their sample covariance.
[[nodiscard]] CovarianceResult run_per_item_covariance(const SamplerConfig& cfg, std::size_t n,
                                                       std::size_t first_position, std::size_t second_position,
                                                       std::size_t trials);

struct ProfileRow {
  std::size_t n = 0;
  std::string kind;
  std::uint32_t k = 0;
  TrialStats stats;
};

/// Accuracy of the framework estimator at every n of an ascending sweep. Each
/// trial streams the ids of the largest n once and snapshots each sampler as
/// the stream passes every sweep point, so points within a trial share hashes.
[[nodiscard]] std::vector<ProfileRow> run_accuracy_profile(std::span<const SamplerConfig> family,
                                                           std::span<const std::size_t> n_sweep,
                                                           std::size_t trials,
                                                           StreamOrder order = StreamOrder::Sorted);

/// Geometric sweep with `per_octave` points per doubling from lo to hi, both included.
[[nodiscard]] std::vector<std::size_t> geometric_sweep(std::size_t lo, std::size_t hi, std::size_t per_octave);

struct ScatterOptions {
  std::size_t min_size = 201;
  std::size_t max_size = 5429;
  std::vector<double> similarity_targets{0.0, 0.25, 0.5, 0.75, 1.0};
  std::uint32_t k = 128;
  std::size_t trials_per_pair = 1000;
  std::size_t pairs = 20;
  HashSeed seed{1};
  /// RE_union <= RE_concat * (1 + slack) counts as conforming.
  double slack = 0.05;
};

struct ScatterRow {
  std::size_t size1 = 0;
  std::size_t size2 = 0;
  double similarity = 0.0;
  double re_union = 0.0;
  double re_concat = 0.0;
  bool conforms = true;
};

/// Alpha TCF on synthetic pairs with controlled overlap. similarity is
/// |A1 n A2| / min(|A1|, |A2|); streams are shuffled per trial.
[[nodiscard]] std::vector<ScatterRow> run_overlap_scatter(const ScatterOptions& opts);

// CSV output; floats carry 17 significant digits.
void write_profile_csv(std::ostream& out, std::span<const ProfileRow> rows);
void write_comparative_csv_header(std::ostream& out);
void write_comparative_csv_row(std::ostream& out, const SamplerConfig& cfg, std::size_t m, const std::string& layout,
                               const ComparativeResult& r);
void write_scatter_csv(std::ostream& out, std::span<const ScatterRow> rows);
[[nodiscard]] std::string format_double(double v);

}  // namespace theta::mc
