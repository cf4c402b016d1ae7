#include "theta/streams.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "theta/error.hpp"

namespace theta {

namespace {

std::vector<std::uint32_t> iota_block(std::size_t begin, std::size_t count) {
  std::vector<std::uint32_t> v(count);
  std::iota(v.begin(), v.end(), static_cast<std::uint32_t>(begin));
  return v;
}

}  // namespace

StreamLayout materialize(const StreamSpec& spec) {
  StreamLayout out;
  if (const auto* d = std::get_if<DisjointRanges>(&spec.generator)) {
    if (d->sizes.empty()) throw Error(ErrorCode::DomainError, "need at least one stream");
    for (std::size_t size : d->sizes) {
      out.streams.push_back(iota_block(out.universe, size));
      out.universe += size;
    }
    if (out.streams.size() == 1) out.common = out.streams.front();
  } else if (const auto* o = std::get_if<Overlapping>(&spec.generator)) {
    if (o->sizes.empty()) throw Error(ErrorCode::DomainError, "need at least one stream");
    out.common = iota_block(0, o->intersection_size);
    out.universe = o->intersection_size;
    for (std::size_t size : o->sizes) {
      if (size < o->intersection_size) {
        throw Error(ErrorCode::DomainError, "stream smaller than the shared block");
      }
      auto stream = out.common;
      const auto own = iota_block(out.universe, size - o->intersection_size);
      stream.insert(stream.end(), own.begin(), own.end());
      out.universe += own.size();
      out.streams.push_back(std::move(stream));
    }
    if (out.streams.size() == 1) out.common = out.streams.front();
  } else {
    const auto& p = std::get<Permutations>(spec.generator);
    if (p.m == 0) throw Error(ErrorCode::DomainError, "need at least one stream");
    out.universe = p.base_size;
    out.common = iota_block(0, p.base_size);
    out.streams.assign(p.m, out.common);
  }
  return out;
}

std::vector<std::string> decimal_ids(std::size_t universe) {
  std::vector<std::string> ids;
  ids.reserve(universe);
  char buf[24];
  for (std::size_t u = 0; u < universe; ++u) {
    const auto res = std::to_chars(buf, buf + sizeof buf, u);
    ids.emplace_back(buf, res.ptr);
  }
  return ids;
}

StreamLayout arrange_for_trial(const StreamLayout& layout, StreamOrder order, HashSeed trial_seed) {
  StreamLayout out = layout;
  if (order == StreamOrder::Sorted) return out;
  for (std::size_t j = 0; j < out.streams.size(); ++j) {
    std::mt19937_64 rng(derive_trial_seed(trial_seed, 0x5eed0000ULL + j).value);
    std::shuffle(out.streams[j].begin(), out.streams[j].end(), rng);
  }
  return out;
}

}  // namespace theta
