#include "theta/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <random>
#include <thread>

#include "theta/error.hpp"
#include "theta/set_ops.hpp"

namespace theta::mc {

TrialStats TrialStats::from(std::span<const double> values, double truth) {
  TrialStats s;
  s.trials = values.size();
  s.truth = truth;
  if (values.empty()) return s;
  const double t = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / t;
  double m2 = 0.0;
  double m4 = 0.0;
  double sq_err = 0.0;
  for (double v : values) {
    const double d = v - s.mean;
    m2 += d * d;
    m4 += d * d * d * d;
    sq_err += (v - truth) * (v - truth);
  }
  if (values.size() > 1) {
    s.sample_variance = m2 / (t - 1.0);
    s.stderr_of_mean = std::sqrt(s.sample_variance / t);
  }
  if (values.size() > 3) {
    const double fourth = m4 / t;
    const double var = s.sample_variance;
    s.stderr_of_variance = std::sqrt(std::max(0.0, (fourth - var * var * (t - 3.0) / (t - 1.0)) / t));
  }
  s.rmse_over_truth = truth > 0.0 ? std::sqrt(sq_err / t) / truth : std::numeric_limits<double>::quiet_NaN();
  return s;
}

std::size_t experiment_threads() {
  if (const char* env = std::getenv("THETA_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(experiment_threads(), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t t = 0; t < n; ++t) body(t);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t t = w; t < n; t += workers) body(t);
    });
  }
  for (auto& th : pool) th.join();
}

namespace {

std::vector<UnitHash> hash_universe(const std::vector<std::string>& ids, HashSeed seed) {
  std::vector<UnitHash> out(ids.size());
  for (std::size_t u = 0; u < ids.size(); ++u) out[u] = hash_identifier(ids[u], seed);
  return out;
}

void feed(Sampler& s, std::span<const std::uint32_t> stream, const std::vector<UnitHash>& hashes,
          const std::vector<std::string>& ids) {
  if (s.config().retain_ids) {
    for (std::uint32_t u : stream) s.update(hashes[u], ids[u]);
  } else {
    for (std::uint32_t u : stream) s.update(hashes[u]);
  }
}

void check_trials(std::size_t trials) {
  if (trials < 100) throw Error(ErrorCode::DomainError, "need at least 100 trials");
}

void check_predicate(const SamplerConfig& cfg, const Predicate& pred) {
  if (!pred.is_all() && !cfg.retain_ids) {
    throw Error(ErrorCode::IdsUnavailable, "a non-trivial predicate needs retain_ids");
  }
}

double count_matching(const std::vector<std::string>& ids, const Predicate& pred) {
  return static_cast<double>(std::count_if(ids.begin(), ids.end(), [&pred](const std::string& id) { return pred(id); }));
}

SamplerConfig with_seed(SamplerConfig cfg, HashSeed seed) {
  cfg.seed = seed;
  return cfg;
}

}  // namespace

EstimatorRun run_estimator_trials(const SamplerConfig& cfg, const StreamSpec& spec,
                                  std::span<const Predicate> predicates, std::size_t trials, bool with_hip) {
  check_trials(trials);
  check_config(cfg);
  for (const auto& p : predicates) check_predicate(cfg, p);
  const StreamLayout layout = materialize(spec);
  if (with_hip && (cfg.kind != SamplerKind::Alpha || layout.stream_count() != 1)) {
    throw Error(ErrorCode::WrongKind, "HIP needs a single-stream alpha sampler");
  }
  const auto ids = decimal_ids(layout.universe);

  std::vector<std::vector<double>> est(predicates.size(), std::vector<double>(trials));
  std::vector<double> hip(with_hip ? trials : 0);
  std::vector<double> sizes(trials);

  parallel_for(trials, [&](std::size_t t) {
    const HashSeed seed = derive_trial_seed(cfg.seed, t);
    const SamplerConfig trial_cfg = with_seed(cfg, seed);
    const StreamLayout arranged = arrange_for_trial(layout, spec.order, seed);
    const auto hashes = hash_universe(ids, seed);

    std::vector<ThetaSketch> sketches;
    for (const auto& stream : arranged.streams) {
      Sampler s(trial_cfg);
      feed(s, stream, hashes, ids);
      if (with_hip) hip[t] = s.hip_estimate();
      sketches.push_back(s.finalize());
    }
    const ThetaSketch combined = sketches.size() == 1 ? std::move(sketches.front()) : theta_union(sketches);
    for (std::size_t p = 0; p < predicates.size(); ++p) {
      est[p][t] = estimate_subpopulation(combined, predicates[p]);
    }
    sizes[t] = static_cast<double>(combined.size());
  });

  EstimatorRun run;
  for (std::size_t p = 0; p < predicates.size(); ++p) {
    run.per_predicate.push_back(TrialStats::from(est[p], count_matching(ids, predicates[p])));
  }
  if (with_hip) run.hip = TrialStats::from(hip, static_cast<double>(layout.universe));
  run.sample_size = TrialStats::from(sizes, static_cast<double>(cfg.k));
  return run;
}

TrialStats run_estimator_trials(const SamplerConfig& cfg, const StreamSpec& spec, const Predicate& predicate,
                                Estimator estimator, std::size_t trials) {
  const bool hip = estimator == Estimator::Hip;
  if (hip && !predicate.is_all()) {
    throw Error(ErrorCode::WrongKind, "HIP estimates the whole stream only");
  }
  const EstimatorRun run = run_estimator_trials(cfg, spec, std::span<const Predicate>(&predicate, 1), trials, hip);
  return hip ? *run.hip : run.per_predicate.front();
}

ComparativeResult run_comparative_variance(const StreamSpec& spec, const SamplerConfig& cfg,
                                           const Predicate& predicate, std::size_t trials) {
  check_trials(trials);
  check_config(cfg);
  check_predicate(cfg, predicate);
  const StreamLayout layout = materialize(spec);
  if (layout.stream_count() < 2) throw Error(ErrorCode::DomainError, "need at least two streams");
  const auto ids = decimal_ids(layout.universe);

  std::vector<double> via_union(trials);
  std::vector<double> via_concat(trials);
  parallel_for(trials, [&](std::size_t t) {
    const HashSeed seed = derive_trial_seed(cfg.seed, t);
    const SamplerConfig trial_cfg = with_seed(cfg, seed);
    const StreamLayout arranged = arrange_for_trial(layout, spec.order, seed);
    const auto hashes = hash_universe(ids, seed);

    std::vector<ThetaSketch> sketches;
    Sampler concat(trial_cfg);
    for (const auto& stream : arranged.streams) {
      Sampler s(trial_cfg);
      feed(s, stream, hashes, ids);
      feed(concat, stream, hashes, ids);
      sketches.push_back(s.finalize());
    }
    via_union[t] = estimate_subpopulation(theta_union(sketches), predicate);
    via_concat[t] = estimate_subpopulation(concat.finalize(), predicate);
  });

  const double truth = count_matching(ids, predicate);
  ComparativeResult r;
  r.union_stats = TrialStats::from(via_union, truth);
  r.concat_stats = TrialStats::from(via_concat, truth);
  r.var_union = r.union_stats.sample_variance;
  r.var_concat = r.concat_stats.sample_variance;
  r.ratio = r.var_concat > 0.0 ? r.var_union / r.var_concat : std::numeric_limits<double>::quiet_NaN();
  return r;
}

CovarianceResult run_per_item_covariance(const SamplerConfig& cfg, std::size_t n, std::size_t first_position,
                                         std::size_t second_position, std::size_t trials) {
  check_trials(trials);
  check_config(cfg);
  if (first_position >= n || second_position >= n || first_position == second_position) {
    throw Error(ErrorCode::DomainError, "positions must be distinct and below n");
  }
  const auto ids = decimal_ids(n);
  std::vector<std::uint32_t> stream(n);
  for (std::size_t u = 0; u < n; ++u) stream[u] = static_cast<std::uint32_t>(u);

  std::vector<double> v1(trials);
  std::vector<double> v2(trials);
  parallel_for(trials, [&](std::size_t t) {
    const HashSeed seed = derive_trial_seed(cfg.seed, t);
    const auto hashes = hash_universe(ids, seed);
    Sampler s(with_seed(cfg, seed));
    feed(s, stream, hashes, ids);
    const double theta = s.theta();
    v1[t] = hashes[first_position].value < theta ? 1.0 / theta : 0.0;
    v2[t] = hashes[second_position].value < theta ? 1.0 / theta : 0.0;
  });

  CovarianceResult r;
  r.first = TrialStats::from(v1, 1.0);
  r.second = TrialStats::from(v2, 1.0);
  std::vector<double> products(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    products[t] = (v1[t] - r.first.mean) * (v2[t] - r.second.mean);
  }
  const TrialStats prod = TrialStats::from(products, 0.0);
  const double tt = static_cast<double>(trials);
  r.covariance = prod.mean * tt / (tt - 1.0);
  r.stderr_of_covariance = prod.stderr_of_mean;
  return r;
}

std::vector<ProfileRow> run_accuracy_profile(std::span<const SamplerConfig> family,
                                             std::span<const std::size_t> n_sweep, std::size_t trials,
                                             StreamOrder order) {
  check_trials(trials);
  if (family.empty() || n_sweep.empty()) throw Error(ErrorCode::DomainError, "empty family or sweep");
  if (!std::is_sorted(n_sweep.begin(), n_sweep.end()) || n_sweep.front() == 0) {
    throw Error(ErrorCode::DomainError, "sweep must be positive and ascending");
  }
  for (const auto& cfg : family) check_config(cfg);
  const std::size_t n_max = n_sweep.back();
  const auto ids = decimal_ids(n_max);
  const StreamLayout layout = materialize(StreamSpec::single(n_max));
  const HashSeed base = family.front().seed;

  // est[c][j][t]
  std::vector<std::vector<std::vector<double>>> est(
      family.size(), std::vector<std::vector<double>>(n_sweep.size(), std::vector<double>(trials)));
  parallel_for(trials, [&](std::size_t t) {
    const HashSeed seed = derive_trial_seed(base, t);
    const StreamLayout arranged = arrange_for_trial(layout, order, seed);
    const auto& stream = arranged.streams.front();
    const auto hashes = hash_universe(ids, seed);
    for (std::size_t c = 0; c < family.size(); ++c) {
      Sampler s(with_seed(family[c], seed));
      std::size_t fed = 0;
      for (std::size_t j = 0; j < n_sweep.size(); ++j) {
        const std::size_t upto = n_sweep[j];
        feed(s, std::span<const std::uint32_t>(stream.data() + fed, upto - fed), hashes, ids);
        fed = upto;
        est[c][j][t] = s.estimate();
      }
    }
  });

  std::vector<ProfileRow> rows;
  for (std::size_t j = 0; j < n_sweep.size(); ++j) {
    for (std::size_t c = 0; c < family.size(); ++c) {
      rows.push_back({n_sweep[j], std::string(to_string(family[c].kind)), family[c].k,
                      TrialStats::from(est[c][j], static_cast<double>(n_sweep[j]))});
    }
  }
  return rows;
}

std::vector<std::size_t> geometric_sweep(std::size_t lo, std::size_t hi, std::size_t per_octave) {
  if (lo == 0 || hi < lo || per_octave == 0) throw Error(ErrorCode::DomainError, "bad sweep bounds");
  std::vector<std::size_t> out;
  const double octaves = std::log2(static_cast<double>(hi) / static_cast<double>(lo));
  const auto steps = static_cast<std::size_t>(std::llround(octaves * static_cast<double>(per_octave)));
  for (std::size_t s = 0; s <= steps; ++s) {
    const double n = static_cast<double>(lo) * std::exp2(static_cast<double>(s) / static_cast<double>(per_octave));
    const auto v = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(n)), lo, hi);
    if (out.empty() || v > out.back()) out.push_back(v);
  }
  if (out.back() != hi) out.push_back(hi);
  return out;
}

std::vector<ScatterRow> run_overlap_scatter(const ScatterOptions& opts) {
  if (opts.similarity_targets.empty() || opts.min_size == 0 || opts.max_size < opts.min_size) {
    throw Error(ErrorCode::DomainError, "bad scatter options");
  }
  check_trials(opts.trials_per_pair);
  std::mt19937_64 rng(opts.seed.value);
  std::uniform_int_distribution<std::size_t> size_dist(opts.min_size, opts.max_size);

  std::vector<ScatterRow> rows;
  for (std::size_t pair = 0; pair < opts.pairs; ++pair) {
    ScatterRow row;
    row.size1 = size_dist(rng);
    row.size2 = size_dist(rng);
    const double target = opts.similarity_targets[pair % opts.similarity_targets.size()];
    const std::size_t overlap = static_cast<std::size_t>(
        std::llround(std::clamp(target, 0.0, 1.0) * static_cast<double>(std::min(row.size1, row.size2))));
    row.similarity = static_cast<double>(overlap) / static_cast<double>(std::min(row.size1, row.size2));

    // A1 = [0, size1), A2 = [size1 - overlap, size1 - overlap + size2).
    StreamLayout layout;
    layout.universe = row.size1 + row.size2 - overlap;
    layout.streams.resize(2);
    for (std::size_t u = 0; u < row.size1; ++u) layout.streams[0].push_back(static_cast<std::uint32_t>(u));
    for (std::size_t u = 0; u < row.size2; ++u) {
      layout.streams[1].push_back(static_cast<std::uint32_t>(row.size1 - overlap + u));
    }
    const auto ids = decimal_ids(layout.universe);
    const double truth = static_cast<double>(layout.universe);
    const SamplerConfig cfg{.kind = SamplerKind::Alpha, .k = opts.k, .seed = derive_trial_seed(opts.seed, pair)};

    std::vector<double> via_union(opts.trials_per_pair);
    std::vector<double> via_concat(opts.trials_per_pair);
    parallel_for(opts.trials_per_pair, [&](std::size_t t) {
      const HashSeed seed = derive_trial_seed(cfg.seed, t);
      const SamplerConfig trial_cfg = with_seed(cfg, seed);
      const StreamLayout arranged = arrange_for_trial(layout, StreamOrder::Shuffled, seed);
      const auto hashes = hash_universe(ids, seed);
      Sampler a(trial_cfg);
      Sampler b(trial_cfg);
      Sampler concat(trial_cfg);
      feed(a, arranged.streams[0], hashes, ids);
      feed(b, arranged.streams[1], hashes, ids);
      feed(concat, arranged.streams[0], hashes, ids);
      feed(concat, arranged.streams[1], hashes, ids);
      const ThetaSketch both[] = {a.finalize(), b.finalize()};
      via_union[t] = estimate_distinct(theta_union(both));
      via_concat[t] = concat.estimate();
    });
    row.re_union = TrialStats::from(via_union, truth).rmse_over_truth;
    row.re_concat = TrialStats::from(via_concat, truth).rmse_over_truth;
    row.conforms = row.re_union <= row.re_concat * (1.0 + opts.slack);
    rows.push_back(row);
  }
  return rows;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_profile_csv(std::ostream& out, std::span<const ProfileRow> rows) {
  out << "n,kind,k,trials,rmse_over_truth\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.kind << ',' << r.k << ',' << r.stats.trials << ',' << format_double(r.stats.rmse_over_truth)
        << '\n';
  }
}

void write_comparative_csv_header(std::ostream& out) {
  out << "kind,k,m,layout,var_union,var_concat,ratio\n";
}

void write_comparative_csv_row(std::ostream& out, const SamplerConfig& cfg, std::size_t m, const std::string& layout,
                               const ComparativeResult& r) {
  out << to_string(cfg.kind) << ',' << cfg.k << ',' << m << ',' << layout << ',' << format_double(r.var_union) << ','
      << format_double(r.var_concat) << ',' << format_double(r.ratio) << '\n';
}

void write_scatter_csv(std::ostream& out, std::span<const ScatterRow> rows) {
  out << "size1,size2,sim,re_union,re_concat,conforms\n";
  for (const auto& r : rows) {
    out << r.size1 << ',' << r.size2 << ',' << format_double(r.similarity) << ',' << format_double(r.re_union) << ','
        << format_double(r.re_concat) << ',' << (r.conforms ? 1 : 0) << '\n';
  }
}

}  // namespace theta::mc
