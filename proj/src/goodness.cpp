#include "theta/goodness.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "theta/error.hpp"
#include "theta/experiments.hpp"
#include "theta/unit_hash.hpp"

namespace theta::goodness {

namespace {

double grid_point(std::size_t j, std::size_t grid_points) {
  return (static_cast<double>(j) + 0.5) / static_cast<double>(grid_points);
}

bool collides(double x, std::span<const double> fixed) {
  return std::find(fixed.begin(), fixed.end(), x) != fixed.end();
}

void check_grid(std::size_t grid_points) {
  if (grid_points < 100) throw Error(ErrorCode::DomainError, "grid needs at least 100 points");
}

std::size_t distinct_count(std::span<const double> hashes) {
  std::vector<double> v(hashes.begin(), hashes.end());
  std::sort(v.begin(), v.end());
  return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

}  // namespace

ProjectionReport check_one_goodness(const TcfFunction& tcf, std::uint32_t k, std::span<const double> fixed_hashes,
                                    std::size_t free_position, std::size_t grid_points) {
  check_grid(grid_points);
  if (free_position > fixed_hashes.size()) throw Error(ErrorCode::DomainError, "free position out of range");

  std::vector<double> stream(fixed_hashes.begin(), fixed_hashes.end());
  stream.insert(stream.begin() + static_cast<std::ptrdiff_t>(free_position), 0.0);
  double& slot = stream[free_position];

  ProjectionReport report;
  for (std::size_t j = 0; j < grid_points; ++j) {
    const double x = grid_point(j, grid_points);
    if (collides(x, fixed_hashes)) continue;
    slot = x;
    const double t = tcf(k, stream);
    if (!report.fixed_threshold) {
      report.fixed_threshold = t;
    }
    const double f = *report.fixed_threshold;
    const bool ok = x < f ? t == f : t <= x;
    if (!ok) {
      report.satisfied = false;
      report.counterexample = Violation{x, std::nullopt, t, x < f ? 'a' : 'b'};
      return report;
    }
  }
  return report;
}

ProjectionReport check_two_goodness(const TcfFunction& tcf, std::uint32_t k, std::span<const double> fixed_hashes,
                                    std::size_t first_position, std::size_t second_position,
                                    std::size_t grid_points) {
  check_grid(grid_points);
  const std::size_t n = fixed_hashes.size() + 2;
  if (first_position == second_position || first_position >= n || second_position >= n) {
    throw Error(ErrorCode::DomainError, "free positions must be distinct and inside the stream");
  }
  std::vector<double> stream(n, 0.0);
  for (std::size_t pos = 0, src = 0; pos < n; ++pos) {
    if (pos != first_position && pos != second_position) stream[pos] = fixed_hashes[src++];
  }

  ProjectionReport report;
  for (std::size_t a = 0; a < grid_points; ++a) {
    const double x = grid_point(a, grid_points);
    if (collides(x, fixed_hashes)) continue;
    stream[first_position] = x;
    for (std::size_t b = 0; b < grid_points; ++b) {
      const double y = grid_point(b, grid_points);
      if (y == x || collides(y, fixed_hashes)) continue;
      stream[second_position] = y;
      const double t = tcf(k, stream);
      if (!report.fixed_threshold) report.fixed_threshold = t;
      const double f = *report.fixed_threshold;
      const double m = std::max(x, y);
      const bool ok = m < f ? t == f : t <= m;
      if (!ok) {
        report.satisfied = false;
        report.counterexample = Violation{x, y, t, m < f ? 'a' : 'b'};
        return report;
      }
    }
  }
  return report;
}

bool check_monotonicity(const TcfFunction& tcf, std::uint32_t k, std::span<const double> a0,
                        std::span<const double> a1, std::span<const double> a2) {
  std::vector<double> joined;
  joined.reserve(a0.size() + a1.size() + a2.size());
  joined.insert(joined.end(), a0.begin(), a0.end());
  joined.insert(joined.end(), a1.begin(), a1.end());
  joined.insert(joined.end(), a2.begin(), a2.end());
  return tcf(k, joined) <= tcf(k, a1);
}

double biased_tcf(std::uint32_t k, std::span<const double> hashes) {
  return biased_threshold(hashes, k);
}

TcfFunction shipped_tcf(SamplerKind kind, double beta, double p) {
  switch (kind) {
    case SamplerKind::Kmv:
      return [](std::uint32_t k, std::span<const double> h) { return kmv_threshold(h, k); };
    case SamplerKind::Adaptive:
      return [beta](std::uint32_t k, std::span<const double> h) { return adaptive_threshold(h, k, beta); };
    case SamplerKind::Pkmv:
      return [p](std::uint32_t k, std::span<const double> h) { return pkmv_threshold(h, k, p); };
    case SamplerKind::Fixed:
      return [p](std::uint32_t, std::span<const double>) { return fixed_threshold(p); };
    case SamplerKind::Alpha:
      return [](std::uint32_t k, std::span<const double> h) { return alpha_threshold(h, k); };
    case SamplerKind::Biased:
      // Exact mode on short streams, as the sampler does.
      return [](std::uint32_t k, std::span<const double> h) {
        return distinct_count(h) > k ? biased_threshold(h, k) : 1.0;
      };
  }
  throw Error(ErrorCode::WrongKind, "unknown sampler kind");
}

TcfFunction min_union_tcf(std::vector<UnionPart> parts) {
  if (parts.empty()) throw Error(ErrorCode::EmptyInput, "union TCF needs at least one part");
  return [parts = std::move(parts)](std::uint32_t k, std::span<const double> h) {
    double theta = 1.0;
    std::size_t start = 0;
    for (std::size_t j = 0; j < parts.size(); ++j) {
      const std::size_t avail = h.size() - start;
      const std::size_t len = j + 1 == parts.size() ? avail : std::min(parts[j].length, avail);
      theta = std::min(theta, parts[j].tcf(k, h.subspan(start, len)));
      start += len;
    }
    return theta;
  };
}

bool SuiteResult::passed() const {
  const bool one = std::all_of(one_goodness.begin(), one_goodness.end(),
                               [](const ProjectionReport& r) { return r.satisfied; });
  return one && (!two_goodness || two_goodness->satisfied);
}

std::vector<std::string> suite_tcf_names() {
  return {"kmv", "adaptive", "pkmv", "fixed", "alpha", "union", "biased"};
}

namespace {

struct Built {
  TcfFunction tcf;
  std::string description;
};

Built build_tcf(const std::string& name, std::size_t stream_size, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  std::ostringstream desc;
  desc.precision(17);
  desc << name;
  if (name == "union") {
    // Two or three consecutive sub-streams, each with its own shipped TCF.
    const std::vector<SamplerKind> kinds{SamplerKind::Kmv, SamplerKind::Adaptive, SamplerKind::Pkmv,
                                         SamplerKind::Fixed, SamplerKind::Alpha};
    const std::size_t m = 2 + rng() % 2;
    std::vector<UnionPart> parts;
    std::size_t left = stream_size;
    desc << "[";
    for (std::size_t j = 0; j < m; ++j) {
      const SamplerKind kind = kinds[rng() % kinds.size()];
      const double beta = 0.3 + 0.6 * unit(rng);
      const double p = unit(rng);
      const std::size_t len = j + 1 == m ? left : rng() % (left + 1);
      left -= len;
      parts.push_back({shipped_tcf(kind, beta, p), len});
      desc << (j ? " " : "") << to_string(kind) << ":" << len;
      if (kind == SamplerKind::Adaptive) desc << ":beta=" << beta;
      if (kind == SamplerKind::Pkmv || kind == SamplerKind::Fixed) desc << ":p=" << p;
    }
    desc << "]";
    return {min_union_tcf(std::move(parts)), desc.str()};
  }
  const auto kind = sampler_kind_from_string(name);
  if (!kind) throw Error(ErrorCode::DomainError, "unknown TCF name '" + name + "'");
  double beta = 0.5;
  double p = 1.0;
  if (*kind == SamplerKind::Adaptive) {
    beta = (rng() % 2 == 0) ? 0.5 : 0.3 + 0.6 * unit(rng);
    desc << "(beta=" << beta << ")";
  }
  if (*kind == SamplerKind::Pkmv || *kind == SamplerKind::Fixed) {
    p = unit(rng);
    desc << "(p=" << p << ")";
  }
  return {shipped_tcf(*kind, beta, p), desc.str()};
}

}  // namespace

std::vector<SuiteResult> run_goodness_suite(const std::string& tcf_name, const SuiteOptions& opts) {
  // Instances are drawn sequentially so the suite does not depend on the thread count.
  std::vector<SuiteResult> out;
  std::vector<TcfFunction> tcfs;
  for (std::uint32_t k = opts.min_k; k <= opts.max_k; ++k) {
    for (std::size_t s = 0; s < opts.seeds; ++s) {
      std::mt19937_64 rng(derive_trial_seed(derive_trial_seed(HashSeed{opts.base_seed}, k), s).value);
      // Stream length counts the free positions: 2..max_stream.
      const std::size_t n = 2 + rng() % (opts.max_stream - 1);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::vector<double> fixed;
      while (fixed.size() + 1 < n) {
        const double h = unit(rng);
        if (h > 0.0 && !collides(h, fixed)) fixed.push_back(h);
      }
      Built built = build_tcf(tcf_name, n, rng);

      SuiteResult r;
      r.instance.tcf_name = built.description;
      r.instance.k = k;
      r.instance.fixed_hashes = fixed;
      r.instance.first_position = rng() % n;
      r.instance.second_position = (r.instance.first_position + 1 + rng() % (n - 1)) % n;
      out.push_back(std::move(r));
      tcfs.push_back(std::move(built.tcf));
    }
  }

  mc::parallel_for(out.size(), [&](std::size_t j) {
    SuiteResult& r = out[j];
    const auto& fixed = r.instance.fixed_hashes;
    for (std::size_t pos = 0; pos <= fixed.size(); ++pos) {
      r.one_goodness.push_back(check_one_goodness(tcfs[j], r.instance.k, fixed, pos, opts.grid_points));
    }
    if (opts.with_two_goodness) {
      const std::span<const double> rest(fixed.data(), fixed.size() - 1);
      r.two_goodness = check_two_goodness(tcfs[j], r.instance.k, rest, r.instance.first_position,
                                          r.instance.second_position, opts.grid_points);
    }
  });
  return out;
}

}  // namespace theta::goodness
