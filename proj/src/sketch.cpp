#include "theta/sketch.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <utility>

#include "theta/error.hpp"

namespace theta {

namespace {

constexpr std::array<std::pair<TcfKind, std::string_view>, 9> kKindNames{{
    {TcfKind::Kmv, "kmv"},
    {TcfKind::Adaptive, "adaptive"},
    {TcfKind::Pkmv, "pkmv"},
    {TcfKind::Fixed, "fixed"},
    {TcfKind::Alpha, "alpha"},
    {TcfKind::DerivedUnion, "union"},
    {TcfKind::DerivedIntersect, "intersect"},
    {TcfKind::DerivedDiff, "diff"},
    {TcfKind::BiasedTest, "biased"},
}};

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string_view to_string(TcfKind kind) noexcept {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<TcfKind> tcf_kind_from_string(std::string_view name) noexcept {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

bool same_sample(const ThetaSketch& a, const ThetaSketch& b) noexcept {
  if (a.theta != b.theta || a.entries.size() != b.entries.size()) return false;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    if (a.entries[i].hash != b.entries[i].hash) return false;
    if (a.entries[i].identifier != b.entries[i].identifier) return false;
  }
  return true;
}

bool Predicate::operator()(std::string_view id) const {
  return std::visit(
      [id](const auto& p) -> bool {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, AllIds>) {
          return true;
        } else if constexpr (std::is_same_v<T, MemberSet>) {
          return p.members.find(id) != p.members.end();
        } else {
          return id.starts_with(p.prefix);
        }
      },
      v_);
}

double estimate_distinct(const ThetaSketch& sk) noexcept {
  return static_cast<double>(sk.entries.size()) / sk.theta;
}

double estimate_subpopulation(const ThetaSketch& sk, const Predicate& pred) {
  if (pred.is_all()) return estimate_distinct(sk);
  if (!sk.retains_ids) {
    throw Error(ErrorCode::IdsUnavailable, "sketch does not retain identifiers");
  }
  std::size_t matching = 0;
  for (const auto& e : sk.entries) {
    if (pred(*e.identifier)) ++matching;
  }
  return static_cast<double>(matching) / sk.theta;
}

std::vector<std::string> validate(const ThetaSketch& sk) {
  std::vector<std::string> out;
  if (!(sk.theta > 0.0 && sk.theta <= 1.0)) {
    out.push_back("theta " + std::to_string(sk.theta) + " outside (0,1]");
  }
  if (sk.k < 1) out.emplace_back("k must be positive");
  for (std::size_t i = 0; i < sk.entries.size(); ++i) {
    const Entry& e = sk.entries[i];
    if (!(e.hash.value < sk.theta)) {
      out.push_back("entry " + std::to_string(i) + " hash " + hex16(e.hash.raw) + " is not below theta");
    }
    if (e.hash.value != unit_value(e.hash.raw)) {
      out.push_back("entry " + std::to_string(i) + " value disagrees with raw " + hex16(e.hash.raw));
    }
    if (i > 0) {
      const auto& prev = sk.entries[i - 1].hash;
      if (prev == e.hash) {
        out.push_back("entry " + std::to_string(i) + " duplicates hash " + hex16(e.hash.raw));
      } else if (prev > e.hash) {
        out.push_back("entry " + std::to_string(i) + " out of canonical order");
      }
    }
    if (sk.retains_ids && !e.identifier) {
      out.push_back("entry " + std::to_string(i) + " lacks an identifier");
    } else if (!sk.retains_ids && e.identifier) {
      out.push_back("entry " + std::to_string(i) + " carries an identifier but retain_ids is off");
    } else if (e.identifier && hash_identifier(*e.identifier, sk.hash_seed) != e.hash) {
      out.push_back("entry " + std::to_string(i) + " identifier does not rehash to " + hex16(e.hash.raw));
    }
  }
  return out;
}

void canonicalize(ThetaSketch& sk) {
  std::sort(sk.entries.begin(), sk.entries.end(),
            [](const Entry& a, const Entry& b) { return a.hash < b.hash; });
}

}  // namespace theta
