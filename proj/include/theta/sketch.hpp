#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "theta/unit_hash.hpp"

namespace theta {

enum class TcfKind {
  Kmv,
  Adaptive,
  Pkmv,
  Fixed,
  Alpha,
  DerivedUnion,
  DerivedIntersect,
  DerivedDiff,
  BiasedTest,
};

[[nodiscard]] std::string_view to_string(TcfKind kind) noexcept;
[[nodiscard]] std::optional<TcfKind> tcf_kind_from_string(std::string_view name) noexcept;

struct Entry {
  UnitHash hash;
  std::optional<std::string> identifier;
};

/// A threshold theta in (0,1] together with every distinct observed hash
/// strictly below it. theta == 1 means nothing was sampled away.
///
/// Entries are kept sorted ascending by raw hash. Instances produced by the
/// samplers and set operations satisfy every invariant checked by validate();
/// tests may build invalid ones directly.
struct ThetaSketch {
  TcfKind tcf_kind = TcfKind::Kmv;
  std::uint32_t k = 1;
  HashSeed hash_seed{};
  double theta = 1.0;
  bool retains_ids = false;
  std::vector<Entry> entries;

  [[nodiscard]] std::size_t size() const noexcept { return entries.size(); }
};

/// Same (theta, entries) content, ignoring metadata.
[[nodiscard]] bool same_sample(const ThetaSketch& a, const ThetaSketch& b) noexcept;

// Predicates over identifiers.

struct AllIds {};
struct MemberSet {
  std::set<std::string, std::less<>> members;
};
struct IdPrefix {
  std::string prefix;
};

class Predicate {
 public:
  using Variant = std::variant<AllIds, MemberSet, IdPrefix>;

  Predicate() = default;
  Predicate(Variant v) : v_(std::move(v)) {}  // NOLINT(google-explicit-constructor)

  static Predicate all() { return Predicate{AllIds{}}; }
  static Predicate member_set(std::set<std::string, std::less<>> members) {
    return Predicate{MemberSet{std::move(members)}};
  }
  static Predicate prefix(std::string p) { return Predicate{IdPrefix{std::move(p)}}; }

  [[nodiscard]] bool is_all() const noexcept { return std::holds_alternative<AllIds>(v_); }
  [[nodiscard]] bool operator()(std::string_view id) const;
  [[nodiscard]] const Variant& variant() const noexcept { return v_; }

 private:
  Variant v_{AllIds{}};
};

/// |entries| / theta.
[[nodiscard]] double estimate_distinct(const ThetaSketch& sk) noexcept;

/// (entries whose identifier satisfies pred) / theta.
/// Throws Error{IdsUnavailable} for a non-trivial predicate on an id-less sketch.
[[nodiscard]] double estimate_subpopulation(const ThetaSketch& sk, const Predicate& pred);

/// Every broken invariant, one human-readable line each. Empty when valid.
[[nodiscard]] std::vector<std::string> validate(const ThetaSketch& sk);

/// Sorts entries by raw hash.
void canonicalize(ThetaSketch& sk);

}  // namespace theta
