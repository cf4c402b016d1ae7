#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "theta/sketch.hpp"
#include "theta/tcf.hpp"
#include "theta/unit_hash.hpp"

namespace theta {

enum class SamplerKind {
  Kmv,
  Adaptive,
  Pkmv,
  Fixed,
  Alpha,
  /// The upward-biased counterexample TCF; exists to exercise the bias
  /// detectors, never for estimation.
  Biased,
};

[[nodiscard]] TcfKind to_tcf_kind(SamplerKind kind) noexcept;
[[nodiscard]] std::string_view to_string(SamplerKind kind) noexcept;
[[nodiscard]] std::optional<SamplerKind> sampler_kind_from_string(std::string_view name) noexcept;

struct SamplerConfig {
  SamplerKind kind = SamplerKind::Kmv;
  std::uint32_t k = 1;
  double beta = 0.5;  // Adaptive
  double p = 1.0;     // Pkmv, Fixed
  HashSeed seed{};
  bool retain_ids = false;
  /// Alpha only: drop dedupe-table entries at or above theta once the table
  /// grows past 2k. Does not change (theta, S).
  bool purge_dedupe = false;
};

/// Throws Error{DomainError} describing the first bad field.
void check_config(const SamplerConfig& cfg);

/// One-pass stream processor for a single threshold choosing function.
/// Duplicate identifiers (equal raw hash) never change its observable state.
class Sampler {
 public:
  explicit Sampler(const SamplerConfig& cfg);

  void update(std::string_view id) { update(hash_identifier(id, cfg_.seed), id); }
  /// `h` must be hash_identifier(id, seed); id is only read when retaining.
  void update(UnitHash h, std::string_view id = {});

  /// Current threshold. Never increases as the stream grows.
  [[nodiscard]] double theta() const;
  /// (theta, S) for the stream so far. The sampler stays usable.
  [[nodiscard]] ThetaSketch finalize() const;

  /// Number of stored hashes below theta, i.e. |S| of finalize().
  [[nodiscard]] std::size_t sample_size() const;
  /// sample_size() / theta() without materializing a sketch.
  [[nodiscard]] double estimate() const { return static_cast<double>(sample_size()) / theta(); }

  /// Alpha: k / alpha^level once k distinct items were seen, otherwise the
  /// exact distinct count. Throws Error{WrongKind} for other kinds.
  [[nodiscard]] double hip_estimate() const;

  /// Alpha and Adaptive level counter; 0 for other kinds.
  [[nodiscard]] std::uint64_t level() const noexcept { return level_; }
  /// Number of hashes currently held (Alpha: size of the dedupe table).
  [[nodiscard]] std::size_t stored() const noexcept;
  [[nodiscard]] const SamplerConfig& config() const noexcept { return cfg_; }

 private:
  using Slot = std::optional<std::string>;

  void update_bottom(UnitHash h, std::string_view id, bool below_p_only);
  void update_adaptive(UnitHash h, std::string_view id);
  void update_fixed(UnitHash h, std::string_view id);
  void update_alpha(UnitHash h, std::string_view id);
  [[nodiscard]] Slot slot_for(std::string_view id) const;

  SamplerConfig cfg_;
  // Ordered by raw hash. KMV/pKMV/Biased: the k+1 smallest distinct hashes
  // (pKMV: among those below p). Adaptive: distinct hashes below beta^level.
  // Fixed: distinct hashes below p.
  std::map<std::uint64_t, Slot> ordered_;
  // Alpha dedupe table.
  std::unordered_map<std::uint64_t, Slot> dedupe_;
  bool prefix_complete_ = false;
  std::uint64_t level_ = 0;
  mutable PowerTable powers_;
  double level_theta_ = 1.0;
  bool boundary_seen_ = false;  // adaptive: a hash equal to theta has arrived
};

}  // namespace theta
