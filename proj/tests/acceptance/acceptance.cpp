// Acceptance run: one PASS/FAIL line per criterion. Every Monte Carlo run
// derives its per-trial seeds from kSeed, so output is reproducible.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "theta/error.hpp"
#include "theta/experiments.hpp"
#include "theta/goodness.hpp"
#include "theta/oracles.hpp"
#include "theta/sampler.hpp"
#include "theta/set_ops.hpp"
#include "theta/sketch_io.hpp"
#include "theta/tcf.hpp"

using namespace theta;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 0x5eed2015;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

bool within_se(const mc::TrialStats& s, double target, double z = 4.0) {
  return std::abs(s.mean - target) <= z * s.stderr_of_mean;
}

bool within_rel(double value, double target, double rel) { return std::abs(value - target) <= rel * target; }

// 1 and 2 share one KMV run.
mc::EstimatorRun kmv_run() {
  const SamplerConfig cfg{.kind = SamplerKind::Kmv, .k = 128, .seed = HashSeed{kSeed}, .retain_ids = true};
  std::set<std::string, std::less<>> members;
  for (int i = 0; i < 4096; i += 10) members.insert(std::to_string(i));
  const std::vector<Predicate> preds{Predicate::all(), Predicate::member_set(std::move(members))};
  return mc::run_estimator_trials(cfg, StreamSpec::single(4096), preds, 20000, false);
}

void criterion_1(const mc::EstimatorRun& run, Outcome& o) {
  const auto& s = run.per_predicate[0];
  const double oracle = oracles::kmv_variance(128, 4096);
  o.detail << "mean=" << fmt(s.mean) << " stderr=" << fmt(s.stderr_of_mean) << " var=" << fmt(s.sample_variance)
           << " oracle=" << fmt(oracle) << " rel=" << fmt(s.sample_variance / oracle - 1.0, 3);
  o.require(within_se(s, 4096.0), "mean within 4 stderr");
  o.require(within_rel(s.sample_variance, oracle, 0.08), "variance within 8%");
}

void criterion_2(const mc::EstimatorRun& run, Outcome& o) {
  const auto& s = run.per_predicate[1];
  const double oracle = oracles::kmv_subpop_variance(128, 4096, 410);
  o.detail << "n_P=" << s.truth << " mean=" << fmt(s.mean) << " stderr=" << fmt(s.stderr_of_mean)
           << " var=" << fmt(s.sample_variance) << " oracle=" << fmt(oracle)
           << " rel=" << fmt(s.sample_variance / oracle - 1.0, 3);
  o.require(s.truth == 410.0, "410 selected ids");
  o.require(within_se(s, 410.0), "mean within 4 stderr");
  o.require(within_rel(s.sample_variance, oracle, 0.10), "variance within 10%");
}

// 3 and 4 share one Alpha run.
mc::EstimatorRun alpha_run() {
  const SamplerConfig cfg{.kind = SamplerKind::Alpha, .k = 128, .seed = HashSeed{kSeed + 1}};
  const std::vector<Predicate> preds{Predicate::all()};
  return mc::run_estimator_trials(cfg, StreamSpec::single(4096), preds, 20000, true);
}

void criterion_3(const mc::EstimatorRun& run, Outcome& o) {
  const auto& s = run.per_predicate[0];
  const double oracle = oracles::alpha_estimator_variance(128, 4096);
  o.detail << "mean=" << fmt(s.mean) << " stderr=" << fmt(s.stderr_of_mean) << " var=" << fmt(s.sample_variance)
           << " oracle=" << fmt(oracle) << " rel=" << fmt(s.sample_variance / oracle - 1.0, 3)
           << " E|S|=" << fmt(run.sample_size.mean) << "+-" << fmt(run.sample_size.stderr_of_mean, 3);
  o.require(within_se(s, 4096.0), "mean within 4 stderr");
  o.require(within_rel(s.sample_variance, oracle, 0.10), "variance within 10%");
  o.require(within_se(run.sample_size, 128.0), "E|S| within 4 stderr of k");
}

void criterion_4(const mc::EstimatorRun& run, Outcome& o) {
  const auto& s = *run.hip;
  const double oracle = oracles::hip_mean_var(128, 4096).variance;
  o.detail << "mean=" << fmt(s.mean) << " stderr=" << fmt(s.stderr_of_mean) << " var=" << fmt(s.sample_variance)
           << " oracle=" << fmt(oracle) << " rel=" << fmt(s.sample_variance / oracle - 1.0, 3);
  o.require(within_se(s, 4096.0), "mean within 4 stderr");
  o.require(within_rel(s.sample_variance, oracle, 0.10), "variance within 10%");
}

void criterion_5(Outcome& o) {
  double worst_sum = 0.0;
  double worst_g = 0.0;
  double worst_hip = 0.0;
  double worst_mean = 0.0;
  double max_var_gap = -1e300;  // Var(S) - (k/2 + 1/4), must stay negative
  std::size_t rows = 0;
  for (std::uint32_t k = 1; k <= 64; ++k) {
    const auto dists = oracles::alpha_level_distributions(k, 512);
    for (const auto& d : dists) {
      ++rows;
      double sum = 0.0;
      for (double p : d.probs) sum += p;
      worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
      for (unsigned q = 0; q <= 2; ++q) {
        const double closed = oracles::g_closed(q, k, d.u);
        worst_g = std::max(worst_g, std::abs(oracles::g_moment(d, q) - closed) / closed);
      }
      const double kk = k;
      const double uu = static_cast<double>(d.u);
      const double hip = kk * kk * oracles::g_moment(d, 2) - (kk + uu) * (kk + uu);
      const double expected = uu * (uu - 1.0) / (2.0 * kk);
      const double scale = std::max(expected, 1.0);
      worst_hip = std::max(worst_hip, std::abs(hip - expected) / scale);
      const auto m = oracles::alpha_sample_size_moments(d);
      worst_mean = std::max(worst_mean, std::abs(m.mean - kk));
      max_var_gap = std::max(max_var_gap, m.variance - (kk / 2.0 + 0.25));
    }
  }
  o.detail << rows << " (k,u) rows; max|sum-1|=" << fmt(worst_sum, 3) << " max rel g err=" << fmt(worst_g, 3)
           << " max rel HIP err=" << fmt(worst_hip, 3) << " max|E(S)-k|=" << fmt(worst_mean, 3)
           << " max Var(S)-(k/2+1/4)=" << fmt(max_var_gap, 4);
  o.require(worst_sum <= 1e-12, "probabilities sum to 1");
  o.require(worst_g <= 1e-9, "DP matches closed forms");
  o.require(worst_hip <= 1e-9, "k^2 g(2) - (k+u)^2 = u(u-1)/(2k)");
  o.require(worst_mean <= 1e-9, "E(S) = k");
  o.require(max_var_gap < 0.0, "Var(S) < k/2 + 1/4");
}

void criterion_6(Outcome& o) {
  using namespace theta::goodness;
  SuiteOptions opts;
  opts.min_k = 1;
  opts.max_k = 5;
  opts.max_stream = 8;
  opts.seeds = 20;
  opts.grid_points = 4096;
  opts.base_seed = kSeed;
  for (const std::string name : {"kmv", "adaptive", "pkmv", "fixed", "alpha", "union"}) {
    const auto results = run_goodness_suite(name, opts);
    std::size_t one = 0;
    std::size_t two = 0;
    for (const auto& r : results) {
      one += std::all_of(r.one_goodness.begin(), r.one_goodness.end(),
                         [](const ProjectionReport& p) { return p.satisfied; });
      two += r.two_goodness && r.two_goodness->satisfied;
      if (!r.passed()) o.detail << " [" << r.instance.tcf_name << " k=" << r.instance.k << " fails]";
    }
    o.detail << name << " " << one << "/" << results.size() << "+" << two << "/" << results.size() << "; ";
    o.require(one == results.size() && two == results.size(), name + " passes the suite");
  }
  const std::vector<double> fixed{0.1, 0.2, 0.4, 0.7};
  bool found = false;
  for (std::size_t pos = 0; pos <= fixed.size(); ++pos) {
    const auto r = check_one_goodness(biased_tcf, 3, fixed, pos, 4096);
    if (!r.counterexample) continue;
    const auto& v = *r.counterexample;
    if (v.x > 8.0 / 30.0 && v.x < 0.4) {
      if (!found) o.detail << "biased violation at position " << pos << ": x=" << fmt(v.x) << " theta=" << v.theta;
      found = true;
    }
  }
  o.require(found, "biased_tcf violates inside (8/30, 0.4)");
}

void criterion_7(Outcome& o) {
  const StreamSpec disjoint{DisjointRanges{{1000, 1000, 1000, 1000}}, StreamOrder::Shuffled};
  const StreamSpec overlap{Overlapping{{1000, 1000, 1000, 1000}, 500}, StreamOrder::Shuffled};
  struct Case {
    SamplerConfig cfg;
    bool asserted_on_overlap;
  };
  const std::vector<Case> cases{
      {{.kind = SamplerKind::Kmv, .k = 64, .seed = HashSeed{kSeed + 7}}, true},
      {{.kind = SamplerKind::Adaptive, .k = 64, .beta = 0.5, .seed = HashSeed{kSeed + 7}}, true},
      {{.kind = SamplerKind::Pkmv, .k = 64, .p = 0.5, .seed = HashSeed{kSeed + 7}}, true},
      {{.kind = SamplerKind::Alpha, .k = 64, .seed = HashSeed{kSeed + 7}}, false},
  };
  for (const auto& c : cases) {
    for (const bool is_overlap : {false, true}) {
      const auto r = mc::run_comparative_variance(is_overlap ? overlap : disjoint, c.cfg, Predicate::all(), 20000);
      const bool asserted = !is_overlap || c.asserted_on_overlap;
      const bool ok = r.var_union <= 1.05 * r.var_concat;
      o.detail << to_string(c.cfg.kind) << "/" << (is_overlap ? "overlap" : "disjoint") << " ratio=" << fmt(r.ratio, 4)
               << (asserted ? "" : " (report-only)") << "; ";
      if (asserted) o.require(ok, std::string(to_string(c.cfg.kind)) + (is_overlap ? " overlap" : " disjoint"));
    }
  }
}

void criterion_8(Outcome& o) {
  std::mt19937_64 rng(kSeed + 8);
  const SamplerKind kinds[] = {SamplerKind::Kmv, SamplerKind::Adaptive, SamplerKind::Pkmv, SamplerKind::Fixed,
                               SamplerKind::Alpha};
  std::size_t exact = 0;
  std::size_t nonempty = 0;
  constexpr std::size_t trials = 1000;
  for (std::size_t t = 0; t < trials; ++t) {
    const HashSeed seed{rng()};
    const std::size_t n1 = 1 + rng() % 3000;
    const std::size_t n2 = 1 + rng() % 3000;
    const std::size_t shift = rng() % (n1 + n2);
    std::vector<std::string> a;
    std::vector<std::string> b;
    for (std::size_t i = 0; i < n1; ++i) a.push_back("id" + std::to_string(i));
    for (std::size_t i = 0; i < n2; ++i) b.push_back("id" + std::to_string(i + shift));
    std::shuffle(a.begin(), a.end(), rng);
    std::shuffle(b.begin(), b.end(), rng);

    auto make = [&](const std::vector<std::string>& ids) {
      SamplerConfig cfg{.kind = kinds[rng() % 5], .k = 1 + static_cast<std::uint32_t>(rng() % 128),
                        .beta = 0.3 + 0.6 * std::uniform_real_distribution<double>()(rng),
                        .p = std::uniform_real_distribution<double>(0.01, 1.0)(rng), .seed = seed, .retain_ids = true};
      Sampler s(cfg);
      for (const auto& id : ids) s.update(id);
      return s.finalize();
    };
    const std::vector<ThetaSketch> pair{make(a), make(b)};
    const std::set<std::string, std::less<>> in_a(a.begin(), a.end());
    std::set<std::string, std::less<>> both;
    for (const auto& id : b) {
      if (in_a.contains(id)) both.insert(id);
    }
    const double lhs = estimate_distinct(theta_intersect(pair));
    const double rhs = estimate_subpopulation(theta_union(pair), Predicate::member_set(std::move(both)));
    exact += lhs == rhs;
    nonempty += lhs > 0.0;
  }
  o.detail << exact << "/" << trials << " trials bit-equal (" << nonempty << " with a non-empty intersection)";
  o.require(exact == trials, "exact equality in every trial");
}

void criterion_9(Outcome& o) {
  for (const auto kind : {SamplerKind::Kmv, SamplerKind::Alpha}) {
    const SamplerConfig cfg{.kind = kind, .k = 32, .seed = HashSeed{kSeed + 9}};
    const auto r = mc::run_per_item_covariance(cfg, 500, 7, 311, 100000);
    o.detail << to_string(kind) << " cov=" << fmt(r.covariance, 4) << "+-" << fmt(r.stderr_of_covariance, 3)
             << " E(V7)=" << fmt(r.first.mean, 5) << "+-" << fmt(r.first.stderr_of_mean, 3)
             << " E(V311)=" << fmt(r.second.mean, 5) << "+-" << fmt(r.second.stderr_of_mean, 3) << "; ";
    const std::string name(to_string(kind));
    o.require(std::abs(r.covariance) <= 4.0 * r.stderr_of_covariance, name + " covariance");
    o.require(within_se(r.first, 1.0) && within_se(r.second, 1.0), name + " per-item means");
  }
}

void criterion_10(Outcome& o) {
  constexpr std::uint32_t k = 128;
  const auto sweep = mc::geometric_sweep(8 * k, 128 * k, 16);
  const std::vector<SamplerConfig> family{{.kind = SamplerKind::Adaptive, .k = k, .beta = 0.5, .seed = HashSeed{kSeed + 10}},
                                          {.kind = SamplerKind::Alpha, .k = k, .seed = HashSeed{kSeed + 10}}};
  const auto rows = mc::run_accuracy_profile(family, sweep, 5000);
  auto summarize = [&](const std::string& kind, double& ratio, double& mean_norm) {
    double lo = 1e300;
    double hi = 0.0;
    double norm = 0.0;
    std::size_t count = 0;
    for (const auto& r : rows) {
      if (r.kind != kind) continue;
      lo = std::min(lo, r.stats.rmse_over_truth);
      hi = std::max(hi, r.stats.rmse_over_truth);
      const double n = static_cast<double>(r.n);
      norm += r.stats.sample_variance / (n * n / (k - 1.0));
      ++count;
    }
    ratio = hi / lo;
    mean_norm = norm / static_cast<double>(count);
  };
  double ad_ratio = 0.0;
  double ad_norm = 0.0;
  double al_ratio = 0.0;
  double al_norm = 0.0;
  summarize("adaptive", ad_ratio, ad_norm);
  summarize("alpha", al_ratio, al_norm);
  o.detail << sweep.size() << " points; adaptive mean var/(n^2/(k-1))=" << fmt(ad_norm, 4)
           << " rmse max/min=" << fmt(ad_ratio, 4) << "; alpha rmse max/min=" << fmt(al_ratio, 4)
           << " (mean norm var " << fmt(al_norm, 4) << ")";
  o.require(ad_norm >= 1.1 && ad_norm <= 1.8, "adaptive normalized variance in [1.1, 1.8]");
  o.require(ad_ratio >= 1.1, "adaptive oscillates");
  o.require(al_ratio <= 1.1, "alpha flat");
}

double reference_theta(const SamplerConfig& cfg, const std::vector<double>& values) {
  switch (cfg.kind) {
    case SamplerKind::Kmv: return kmv_threshold(values, cfg.k);
    case SamplerKind::Adaptive: return adaptive_threshold(values, cfg.k, cfg.beta);
    case SamplerKind::Pkmv: return pkmv_threshold(values, cfg.k, cfg.p);
    case SamplerKind::Fixed: return fixed_threshold(cfg.p);
    case SamplerKind::Alpha: return alpha_threshold(values, cfg.k);
    case SamplerKind::Biased: {
      const std::set<double> distinct(values.begin(), values.end());
      return distinct.size() > cfg.k ? biased_threshold(values, cfg.k) : 1.0;
    }
  }
  return 1.0;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + THETA_CLI_PATH + "\" " + args;
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void criterion_11(Outcome& o) {
  std::mt19937_64 rng(kSeed + 11);
  constexpr std::size_t streams_per_kind = 10000;
  std::size_t mismatches = 0;
  std::size_t io_failures = 0;
  for (const auto kind : {SamplerKind::Kmv, SamplerKind::Adaptive, SamplerKind::Pkmv, SamplerKind::Fixed,
                          SamplerKind::Alpha, SamplerKind::Biased}) {
    for (std::size_t t = 0; t < streams_per_kind; ++t) {
      const SamplerConfig cfg{.kind = kind, .k = 1 + static_cast<std::uint32_t>(rng() % 64),
                              .beta = 0.2 + 0.7 * std::uniform_real_distribution<double>()(rng),
                              .p = std::uniform_real_distribution<double>(0.01, 1.0)(rng), .seed = HashSeed{t}};
      const std::size_t distinct = 1 + rng() % 400;
      const std::size_t length = 1 + rng() % (2 * distinct);
      std::vector<UnitHash> pool(distinct);
      for (auto& h : pool) h = UnitHash::from_raw(rng());
      std::vector<double> values;
      std::vector<UnitHash> seen;
      Sampler s(cfg);
      for (std::size_t i = 0; i < length; ++i) {
        const UnitHash h = pool[rng() % distinct];
        values.push_back(h.value);
        seen.push_back(h);
        s.update(h);
      }
      const ThetaSketch sk = s.finalize();
      const double theta = reference_theta(cfg, values);
      std::set<std::uint64_t> expected;
      for (const auto& h : seen) {
        if (h.value < theta) expected.insert(h.raw);
      }
      std::set<std::uint64_t> got;
      for (const auto& e : sk.entries) got.insert(e.hash.raw);
      if (sk.theta != theta || got != expected || got.size() != sk.entries.size()) ++mismatches;

      const std::string bytes = io::serialize_sketch(sk);
      const ThetaSketch back = io::deserialize_sketch(bytes);
      if (!same_sample(back, sk) || io::serialize_sketch(back) != bytes) ++io_failures;
    }
  }
  o.detail << "6x" << streams_per_kind << " streams: " << mismatches << " streaming mismatches, " << io_failures
           << " round-trip failures; ";
  o.require(mismatches == 0, "single pass equals two pass");
  o.require(io_failures == 0, "bit-exact round trip");

  // Out-of-process union versus the same union computed here.
  const fs::path dir = fs::temp_directory_path() / ("theta_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const SamplerKind kinds[] = {SamplerKind::Kmv, SamplerKind::Alpha, SamplerKind::Adaptive};
  std::vector<ThetaSketch> local;
  std::string paths;
  for (int j = 0; j < 3; ++j) {
    const std::string stream = (dir / ("s" + std::to_string(j) + ".txt")).string();
    const std::string sketch = (dir / ("s" + std::to_string(j) + ".sk")).string();
    SamplerConfig cfg{.kind = kinds[j], .k = 64, .seed = HashSeed{kSeed}, .retain_ids = true};
    Sampler s(cfg);
    {
      std::ofstream out(stream);
      for (int i = 0; i < 3000; ++i) {
        const std::string id = "user " + std::to_string(i * (j + 1));
        out << id << '\n';
        s.update(id);
      }
    }
    local.push_back(s.finalize());
    char seed_hex[32];
    std::snprintf(seed_hex, sizeof seed_hex, "0x%llx", static_cast<unsigned long long>(kSeed));
    const int rc = run_cli("sketch build --tcf " + std::string(to_string(kinds[j])) + " --k 64 --seed " + seed_hex +
                           " --ids -i " + stream + " -o " + sketch);
    o.require(rc == 0, "cli build");
    paths += " " + sketch;
  }
  const std::string union_path = (dir / "u.sk").string();
  o.require(run_cli("sketch union" + paths + " -o " + union_path) == 0, "cli union");
  const std::string remote = io::read_file(union_path);
  const std::string here = io::serialize_sketch(theta_union(local));
  o.detail << "cli union " << remote.size() << " bytes, " << (remote == here ? "identical" : "DIFFERENT");
  o.require(remote == here, "out-of-process union byte-equal");
  fs::remove_all(dir);
}

}  // namespace

int main() {
  std::printf("acceptance seed 0x%llx, %zu worker thread(s)\n", static_cast<unsigned long long>(kSeed),
              mc::experiment_threads());
  std::fflush(stdout);
  int failures = 0;
  auto report = [&](int id, const std::string& title, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      body(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("%s criterion %d (%s): %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(),
                o.detail.str().c_str(), secs);
    std::fflush(stdout);
  };

  mc::EstimatorRun kmv;
  mc::EstimatorRun alpha;
  report(1, "KMV unbiasedness and variance", [&](Outcome& o) {
    kmv = kmv_run();
    criterion_1(kmv, o);
  });
  report(2, "KMV subpopulation", [&](Outcome& o) { criterion_2(kmv, o); });
  report(3, "Alpha framework estimator", [&](Outcome& o) {
    alpha = alpha_run();
    criterion_3(alpha, o);
  });
  report(4, "Alpha HIP estimator", [&](Outcome& o) { criterion_4(alpha, o); });
  report(5, "exact level-law oracles", criterion_5);
  report(6, "goodness suite", criterion_6);
  report(7, "comparative variance", criterion_7);
  report(8, "intersection identity", criterion_8);
  report(9, "per-item covariance", criterion_9);
  report(10, "adaptive oscillation band", criterion_10);
  report(11, "streaming equivalence and serialization", criterion_11);

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
