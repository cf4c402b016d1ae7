#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "theta/sketch.hpp"
#include "theta/unit_hash.hpp"

namespace theta {

// Synthetic stream layouts over the integer universe [0, universe); the
// identifier of integer u is its decimal string.

/// Stream j holds its own block of sizes[j] fresh ids.
struct DisjointRanges {
  std::vector<std::size_t> sizes;
};

/// Every stream holds a shared block of intersection_size ids followed by
/// sizes[j] - intersection_size private ids.
struct Overlapping {
  std::vector<std::size_t> sizes;
  std::size_t intersection_size = 0;
};

/// m streams, each an arrangement of the same base_size ids.
struct Permutations {
  std::size_t base_size = 0;
  std::size_t m = 1;
};

enum class StreamOrder { Sorted, Shuffled };

struct StreamSpec {
  std::variant<DisjointRanges, Overlapping, Permutations> generator;
  StreamOrder order = StreamOrder::Sorted;

  [[nodiscard]] static StreamSpec single(std::size_t n, StreamOrder order = StreamOrder::Sorted) {
    return StreamSpec{DisjointRanges{{n}}, order};
  }
};

/// A materialized layout. Every id in [0, universe) occurs in at least one stream.
struct StreamLayout {
  std::vector<std::vector<std::uint32_t>> streams;
  std::size_t universe = 0;
  /// Ids occurring in every stream.
  std::vector<std::uint32_t> common;

  [[nodiscard]] std::size_t stream_count() const noexcept { return streams.size(); }
};

/// Throws Error{DomainError} on inconsistent sizes.
[[nodiscard]] StreamLayout materialize(const StreamSpec& spec);

/// Decimal identifiers for [0, universe).
[[nodiscard]] std::vector<std::string> decimal_ids(std::size_t universe);

/// Per-trial arrangement of the layout's streams: sorted layouts are returned
/// as-is, shuffled ones get an independent permutation per stream.
[[nodiscard]] StreamLayout arrange_for_trial(const StreamLayout& layout, StreamOrder order, HashSeed trial_seed);

}  // namespace theta
