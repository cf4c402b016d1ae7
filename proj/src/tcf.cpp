#include "theta/tcf.hpp"

#include <algorithm>
#include <unordered_set>

#include "theta/error.hpp"

namespace theta {

namespace {

// The goodness checkers call these millions of times on tiny streams, so the
// scratch buffer is reused per thread.
const std::vector<double>& sorted_distinct(std::span<const double> hashes) {
  thread_local std::vector<double> v;
  v.assign(hashes.begin(), hashes.end());
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

constexpr std::size_t kSmallStream = 32;

template <typename Set>
AlphaTrace alpha_trace_with(std::span<const double> hashes, std::uint32_t k, Set& dedupe) {
  std::size_t pos = 0;
  while (pos < hashes.size() && dedupe.size() < k) dedupe.insert(hashes[pos++]);
  AlphaTrace out;
  if (dedupe.size() < k) return out;
  out.prefix_complete = true;

  PowerTable pow(alpha_for(k));
  for (; pos < hashes.size(); ++pos) {
    const double x = hashes[pos];
    if (x < pow[out.level] && dedupe.insert(x)) ++out.level;
  }
  out.theta = pow[out.level];
  return out;
}

struct LinearSet {
  std::vector<double>& items;
  [[nodiscard]] std::size_t size() const { return items.size(); }
  bool insert(double x) {
    if (std::find(items.begin(), items.end(), x) != items.end()) return false;
    items.push_back(x);
    return true;
  }
};

struct HashedSet {
  std::unordered_set<double> items;
  [[nodiscard]] std::size_t size() const { return items.size(); }
  bool insert(double x) { return items.insert(x).second; }
};

}  // namespace

double kmv_threshold(std::span<const double> hashes, std::uint32_t k) {
  const auto& v = sorted_distinct(hashes);
  return v.size() > k ? v[k] : 1.0;
}

double adaptive_threshold(std::span<const double> hashes, std::uint32_t k, double beta) {
  const auto& v = sorted_distinct(hashes);
  if (v.size() <= k) return 1.0;
  const double m = v[k];
  PowerTable pow(beta);
  std::size_t i = 0;
  while (!(pow[i] < m)) ++i;
  return pow[i];
}

double pkmv_threshold(std::span<const double> hashes, std::uint32_t k, double p) {
  return std::min(kmv_threshold(hashes, k), p);
}

AlphaTrace alpha_trace(std::span<const double> hashes, std::uint32_t k) {
  if (hashes.size() <= kSmallStream) {
    thread_local std::vector<double> scratch;
    scratch.clear();
    LinearSet set{scratch};
    return alpha_trace_with(hashes, k, set);
  }
  HashedSet set;
  return alpha_trace_with(hashes, k, set);
}

double alpha_threshold(std::span<const double> hashes, std::uint32_t k) {
  return alpha_trace(hashes, k).theta;
}

double biased_threshold(std::span<const double> hashes, std::uint32_t k) {
  const auto& v = sorted_distinct(hashes);
  if (k < 1 || v.size() < static_cast<std::size_t>(k) + 1) {
    throw Error(ErrorCode::DomainError, "biased TCF needs at least k+1 distinct hashes");
  }
  const double mk = v[k - 1];
  const double mk1 = v[k];
  return (static_cast<double>(k) - 1.0) / mk > static_cast<double>(k) / mk1 ? mk : mk1;
}

}  // namespace theta
