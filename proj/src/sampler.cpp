#include "theta/sampler.hpp"

#include <array>
#include <iterator>
#include <string>

#include "theta/error.hpp"

namespace theta {

namespace {

constexpr std::array<std::pair<SamplerKind, std::string_view>, 6> kSamplerNames{{
    {SamplerKind::Kmv, "kmv"},
    {SamplerKind::Adaptive, "adaptive"},
    {SamplerKind::Pkmv, "pkmv"},
    {SamplerKind::Fixed, "fixed"},
    {SamplerKind::Alpha, "alpha"},
    {SamplerKind::Biased, "biased"},
}};

double power_base(const SamplerConfig& cfg) {
  switch (cfg.kind) {
    case SamplerKind::Adaptive: return cfg.beta;
    case SamplerKind::Alpha: return alpha_for(cfg.k);
    default: return 1.0;
  }
}

}  // namespace

TcfKind to_tcf_kind(SamplerKind kind) noexcept {
  switch (kind) {
    case SamplerKind::Kmv: return TcfKind::Kmv;
    case SamplerKind::Adaptive: return TcfKind::Adaptive;
    case SamplerKind::Pkmv: return TcfKind::Pkmv;
    case SamplerKind::Fixed: return TcfKind::Fixed;
    case SamplerKind::Alpha: return TcfKind::Alpha;
    case SamplerKind::Biased: return TcfKind::BiasedTest;
  }
  return TcfKind::Kmv;
}

std::string_view to_string(SamplerKind kind) noexcept {
  for (const auto& [k, name] : kSamplerNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<SamplerKind> sampler_kind_from_string(std::string_view name) noexcept {
  for (const auto& [k, n] : kSamplerNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

void check_config(const SamplerConfig& cfg) {
  if (cfg.k < 1) throw Error(ErrorCode::DomainError, "k must be at least 1");
  if (cfg.kind == SamplerKind::Adaptive && !(cfg.beta > 0.0 && cfg.beta < 1.0)) {
    throw Error(ErrorCode::DomainError, "beta must lie in (0,1)");
  }
  if ((cfg.kind == SamplerKind::Pkmv || cfg.kind == SamplerKind::Fixed) &&
      !(cfg.p > 0.0 && cfg.p <= 1.0)) {
    throw Error(ErrorCode::DomainError, "p must lie in (0,1]");
  }
}

Sampler::Sampler(const SamplerConfig& cfg) : cfg_(cfg), powers_(power_base(cfg)) {
  check_config(cfg_);
}

Sampler::Slot Sampler::slot_for(std::string_view id) const {
  if (!cfg_.retain_ids) return std::nullopt;
  return std::string(id);
}

void Sampler::update(UnitHash h, std::string_view id) {
  switch (cfg_.kind) {
    case SamplerKind::Kmv:
    case SamplerKind::Biased: update_bottom(h, id, false); break;
    case SamplerKind::Pkmv: update_bottom(h, id, true); break;
    case SamplerKind::Adaptive: update_adaptive(h, id); break;
    case SamplerKind::Fixed: update_fixed(h, id); break;
    case SamplerKind::Alpha: update_alpha(h, id); break;
  }
}

void Sampler::update_bottom(UnitHash h, std::string_view id, bool below_p_only) {
  if (below_p_only && !(h.value < cfg_.p)) return;
  const std::size_t cap = static_cast<std::size_t>(cfg_.k) + 1;
  if (ordered_.size() < cap) {
    if (!ordered_.contains(h.raw)) ordered_.emplace(h.raw, slot_for(id));
    return;
  }
  auto last = std::prev(ordered_.end());
  if (h.raw >= last->first || ordered_.contains(h.raw)) return;
  ordered_.erase(last);
  ordered_.emplace(h.raw, slot_for(id));
}

void Sampler::update_adaptive(UnitHash h, std::string_view id) {
  if (h.value == level_theta_) {
    boundary_seen_ = true;
  } else if (h.value < level_theta_ && !ordered_.contains(h.raw)) {
    ordered_.emplace(h.raw, slot_for(id));
  } else {
    return;
  }
  // theta must stay strictly below the (k+1)-st smallest hash, which sits at
  // theta itself when exactly k hashes are below it and theta was seen.
  while (ordered_.size() > cfg_.k || (ordered_.size() == cfg_.k && boundary_seen_)) {
    level_theta_ = powers_[++level_];
    boundary_seen_ = false;
    // Values are monotone in raw, so everything at or above theta is a suffix.
    auto it = ordered_.end();
    while (it != ordered_.begin() && !(unit_value(std::prev(it)->first) < level_theta_)) {
      --it;
      if (unit_value(it->first) == level_theta_) boundary_seen_ = true;
    }
    ordered_.erase(it, ordered_.end());
  }
}

void Sampler::update_fixed(UnitHash h, std::string_view id) {
  if (h.value < cfg_.p && !ordered_.contains(h.raw)) ordered_.emplace(h.raw, slot_for(id));
}

void Sampler::update_alpha(UnitHash h, std::string_view id) {
  if (!prefix_complete_) {
    if (!dedupe_.contains(h.raw)) dedupe_.emplace(h.raw, slot_for(id));
    prefix_complete_ = dedupe_.size() >= cfg_.k;
    return;
  }
  if (!(h.value < level_theta_) || dedupe_.contains(h.raw)) return;
  dedupe_.emplace(h.raw, slot_for(id));
  level_theta_ = powers_[++level_];
  if (cfg_.purge_dedupe && dedupe_.size() > 2 * static_cast<std::size_t>(cfg_.k)) {
    std::erase_if(dedupe_, [this](const auto& kv) { return !(unit_value(kv.first) < level_theta_); });
  }
}

double Sampler::theta() const {
  switch (cfg_.kind) {
    case SamplerKind::Kmv:
      return ordered_.size() > cfg_.k ? unit_value(ordered_.rbegin()->first) : 1.0;
    case SamplerKind::Pkmv:
      return ordered_.size() > cfg_.k ? unit_value(ordered_.rbegin()->first) : cfg_.p;
    case SamplerKind::Fixed: return cfg_.p;
    case SamplerKind::Adaptive:
    case SamplerKind::Alpha: return level_theta_;
    case SamplerKind::Biased: {
      if (ordered_.size() <= cfg_.k) return 1.0;
      const double mk1 = unit_value(ordered_.rbegin()->first);
      const double mk = unit_value(std::next(ordered_.rbegin())->first);
      const double k = cfg_.k;
      return (k - 1.0) / mk > k / mk1 ? mk : mk1;
    }
  }
  return 1.0;
}

ThetaSketch Sampler::finalize() const {
  ThetaSketch sk;
  sk.tcf_kind = to_tcf_kind(cfg_.kind);
  sk.k = cfg_.k;
  sk.hash_seed = cfg_.seed;
  sk.retains_ids = cfg_.retain_ids;
  sk.theta = theta();
  auto keep = [&sk](std::uint64_t raw, const Slot& slot) {
    const UnitHash h = UnitHash::from_raw(raw);
    if (h.value < sk.theta) sk.entries.push_back(Entry{h, slot});
  };
  if (cfg_.kind == SamplerKind::Alpha) {
    for (const auto& [raw, slot] : dedupe_) keep(raw, slot);
    canonicalize(sk);
  } else {
    for (const auto& [raw, slot] : ordered_) keep(raw, slot);
  }
  return sk;
}

std::size_t Sampler::sample_size() const {
  const double t = theta();
  std::size_t count = 0;
  if (cfg_.kind == SamplerKind::Alpha) {
    for (const auto& kv : dedupe_) count += unit_value(kv.first) < t ? 1 : 0;
    return count;
  }
  for (const auto& kv : ordered_) {
    if (!(unit_value(kv.first) < t)) break;
    ++count;
  }
  return count;
}

double Sampler::hip_estimate() const {
  if (cfg_.kind != SamplerKind::Alpha) {
    throw Error(ErrorCode::WrongKind, "HIP estimate needs an alpha sampler");
  }
  if (!prefix_complete_) return static_cast<double>(dedupe_.size());
  return static_cast<double>(cfg_.k) / level_theta_;
}

std::size_t Sampler::stored() const noexcept {
  return cfg_.kind == SamplerKind::Alpha ? dedupe_.size() : ordered_.size();
}

}  // namespace theta
