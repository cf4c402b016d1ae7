#include "theta/set_ops.hpp"

#include <algorithm>

#include "theta/error.hpp"

namespace theta {

namespace {

ThetaSketch derived_header(std::span<const ThetaSketch* const> in, TcfKind kind) {
  if (in.empty()) throw Error(ErrorCode::EmptyInput, "no sketches to combine");
  ThetaSketch out;
  out.tcf_kind = kind;
  out.hash_seed = in.front()->hash_seed;
  out.k = in.front()->k;
  out.theta = in.front()->theta;
  out.retains_ids = true;
  for (const ThetaSketch* p : in) {
    const ThetaSketch& sk = *p;
    if (sk.hash_seed != out.hash_seed) {
      throw Error(ErrorCode::SeedMismatch, "sketches were built with different hash seeds");
    }
    out.k = std::min(out.k, sk.k);
    out.theta = std::min(out.theta, sk.theta);
    out.retains_ids = out.retains_ids && sk.retains_ids;
  }
  return out;
}

ThetaSketch derived_header(std::span<const ThetaSketch> in, TcfKind kind) {
  std::vector<const ThetaSketch*> ptrs;
  ptrs.reserve(in.size());
  for (const auto& sk : in) ptrs.push_back(&sk);
  return derived_header(std::span<const ThetaSketch* const>(ptrs), kind);
}

bool contains(const ThetaSketch& sk, const UnitHash& h) {
  return std::binary_search(sk.entries.begin(), sk.entries.end(), Entry{h, std::nullopt},
                            [](const Entry& a, const Entry& b) { return a.hash < b.hash; });
}

void push(ThetaSketch& out, const Entry& e) {
  out.entries.push_back(out.retains_ids ? e : Entry{e.hash, std::nullopt});
}

}  // namespace

ThetaSketch theta_union(std::span<const ThetaSketch> sketches) {
  ThetaSketch out = derived_header(sketches, TcfKind::DerivedUnion);
  for (const auto& sk : sketches) {
    for (const auto& e : sk.entries) {
      if (e.hash.value < out.theta) push(out, e);
    }
  }
  canonicalize(out);
  auto dup = std::unique(out.entries.begin(), out.entries.end(),
                         [](const Entry& a, const Entry& b) { return a.hash == b.hash; });
  out.entries.erase(dup, out.entries.end());
  return out;
}

ThetaSketch theta_intersect(std::span<const ThetaSketch> sketches) {
  ThetaSketch out = derived_header(sketches, TcfKind::DerivedIntersect);
  for (const auto& e : sketches.front().entries) {
    if (!(e.hash.value < out.theta)) break;
    const bool everywhere = std::all_of(sketches.begin() + 1, sketches.end(),
                                        [&e](const ThetaSketch& sk) { return contains(sk, e.hash); });
    if (everywhere) push(out, e);
  }
  return out;
}

ThetaSketch theta_a_not_b(const ThetaSketch& a, const ThetaSketch& b) {
  const ThetaSketch* const pair[] = {&a, &b};
  ThetaSketch out = derived_header(pair, TcfKind::DerivedDiff);
  for (const auto& e : a.entries) {
    if (!(e.hash.value < out.theta)) break;
    if (!contains(b, e.hash)) push(out, e);
  }
  return out;
}

}  // namespace theta
