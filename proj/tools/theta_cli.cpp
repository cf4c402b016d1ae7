// Command-line front end: build, merge and query sketches; run experiments;
// probe TCFs; print exact level distributions.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "theta/error.hpp"
#include "theta/experiments.hpp"
#include "theta/goodness.hpp"
#include "theta/oracles.hpp"
#include "theta/sampler.hpp"
#include "theta/set_ops.hpp"
#include "theta/sketch.hpp"
#include "theta/sketch_io.hpp"

namespace {

using namespace theta;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

HashSeed parse_seed(const std::string& text) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used, 0);
    if (used != text.size()) throw UsageError("bad seed '" + text + "'");
    return HashSeed{v};
  } catch (const std::logic_error&) {
    throw UsageError("bad seed '" + text + "'");
  }
}

SamplerKind parse_kind(const std::string& text) {
  const auto kind = sampler_kind_from_string(text);
  if (!kind) throw UsageError("unknown TCF '" + text + "'");
  return *kind;
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Predicate parse_predicate(const std::string& text) {
  if (text == "all") return Predicate::all();
  if (text.starts_with("prefix:")) return Predicate::prefix(text.substr(7));
  if (text.starts_with("set:")) {
    std::set<std::string, std::less<>> members;
    for (auto& id : io::read_stream_file(text.substr(4))) members.insert(std::move(id));
    return Predicate::member_set(std::move(members));
  }
  throw UsageError("predicate must be all, set:FILE or prefix:STR");
}

void emit(const std::string& path, const std::string& bytes) {
  if (path.empty() || path == "-") {
    std::cout << bytes;
  } else {
    io::write_file(path, bytes);
  }
}

std::vector<ThetaSketch> load_all(const std::vector<std::string>& paths) {
  std::vector<ThetaSketch> out;
  for (const auto& p : paths) out.push_back(io::deserialize_sketch(io::read_file(p)));
  return out;
}

struct SketchArgs {
  std::string tcf = "kmv";
  std::uint32_t k = 1;
  double beta = 0.5;
  double p = 1.0;
  std::string seed = "0";
  bool ids = false;
  std::string input;
  std::string output;
  std::vector<std::string> sketches;
  std::string pred = "all";
};

struct ExperimentArgs {
  std::string kinds = "kmv,adaptive,alpha";
  std::string tcf = "kmv";
  std::uint32_t k = 128;
  double beta = 0.5;
  double p = 0.5;
  std::string seed = "1";
  std::size_t trials = 1000;
  std::string n_list;
  std::size_t n_min = 1024;
  std::size_t n_max = 16384;
  std::size_t per_octave = 8;
  std::string order = "sorted";
  std::size_t m = 4;
  std::size_t size = 1000;
  std::string layout = "disjoint";
  std::size_t overlap = 500;
  std::size_t n = 500;
  std::size_t l1 = 0;
  std::size_t l2 = 1;
  std::size_t pairs = 20;
  std::size_t min_size = 201;
  std::size_t max_size = 5429;
  std::string sims = "0,0.25,0.5,0.75,1";
};

struct CheckArgs {
  std::string tcf = "kmv";
  std::uint32_t k = 3;
  std::string seed = "1";
  std::size_t grid = goodness::kDefaultGrid;
  std::size_t seeds = 20;
  bool no_two = false;
};

struct DistArgs {
  std::uint32_t k = 1;
  std::uint64_t u = 0;
};

SamplerConfig sampler_config(const std::string& tcf, std::uint32_t k, double beta, double p, HashSeed seed,
                             bool ids) {
  SamplerConfig cfg;
  cfg.kind = parse_kind(tcf);
  cfg.k = k;
  cfg.beta = beta;
  cfg.p = p;
  cfg.seed = seed;
  cfg.retain_ids = ids;
  return cfg;
}

void cmd_build(const SketchArgs& a) {
  const SamplerConfig cfg = sampler_config(a.tcf, a.k, a.beta, a.p, parse_seed(a.seed), a.ids);
  Sampler s(cfg);
  for (const auto& id : io::read_stream_file(a.input)) s.update(id);
  emit(a.output, io::serialize_sketch(s.finalize()));
}

void cmd_combine(const std::string& op, const SketchArgs& a) {
  const auto inputs = load_all(a.sketches);
  ThetaSketch out;
  if (op == "union") {
    out = theta_union(inputs);
  } else if (op == "intersect") {
    out = theta_intersect(inputs);
  } else {
    if (inputs.size() != 2) throw UsageError("diff takes exactly two sketches");
    out = theta_a_not_b(inputs[0], inputs[1]);
  }
  emit(a.output, io::serialize_sketch(out));
}

void cmd_estimate(const SketchArgs& a) {
  const ThetaSketch sk = io::deserialize_sketch(io::read_file(a.sketches.front()));
  std::cout << mc::format_double(estimate_subpopulation(sk, parse_predicate(a.pred))) << '\n';
}

StreamOrder parse_order(const std::string& text) {
  if (text == "sorted") return StreamOrder::Sorted;
  if (text == "shuffled") return StreamOrder::Shuffled;
  throw UsageError("order must be sorted or shuffled");
}

void cmd_accuracy(const ExperimentArgs& a) {
  const HashSeed seed = parse_seed(a.seed);
  std::vector<SamplerConfig> family;
  for (const auto& kind : split_commas(a.kinds)) family.push_back(sampler_config(kind, a.k, a.beta, a.p, seed, false));
  std::vector<std::size_t> sweep;
  if (!a.n_list.empty()) {
    for (const auto& item : split_commas(a.n_list)) sweep.push_back(std::stoull(item));
  } else {
    sweep = mc::geometric_sweep(a.n_min, a.n_max, a.per_octave);
  }
  const auto rows = mc::run_accuracy_profile(family, sweep, a.trials, parse_order(a.order));
  mc::write_profile_csv(std::cout, rows);
}

void cmd_comparative(const ExperimentArgs& a) {
  const SamplerConfig cfg = sampler_config(a.tcf, a.k, a.beta, a.p, parse_seed(a.seed), false);
  StreamSpec spec;
  spec.order = parse_order(a.order);
  const std::vector<std::size_t> sizes(a.m, a.size);
  if (a.layout == "disjoint") {
    spec.generator = DisjointRanges{sizes};
  } else if (a.layout == "overlap") {
    spec.generator = Overlapping{sizes, a.overlap};
  } else if (a.layout == "permutation") {
    spec.generator = Permutations{a.size, a.m};
  } else {
    throw UsageError("layout must be disjoint, overlap or permutation");
  }
  const auto r = mc::run_comparative_variance(spec, cfg, Predicate::all(), a.trials);
  mc::write_comparative_csv_header(std::cout);
  mc::write_comparative_csv_row(std::cout, cfg, a.m, a.layout, r);
}

void cmd_covariance(const ExperimentArgs& a) {
  const SamplerConfig cfg = sampler_config(a.tcf, a.k, a.beta, a.p, parse_seed(a.seed), false);
  const auto r = mc::run_per_item_covariance(cfg, a.n, a.l1, a.l2, a.trials);
  std::cout << "kind,k,n,l1,l2,trials,covariance,stderr,mean_v1,stderr_v1,mean_v2,stderr_v2\n"
            << a.tcf << ',' << a.k << ',' << a.n << ',' << a.l1 << ',' << a.l2 << ',' << a.trials << ','
            << mc::format_double(r.covariance) << ',' << mc::format_double(r.stderr_of_covariance) << ','
            << mc::format_double(r.first.mean) << ',' << mc::format_double(r.first.stderr_of_mean) << ','
            << mc::format_double(r.second.mean) << ',' << mc::format_double(r.second.stderr_of_mean) << '\n';
}

void cmd_scatter(const ExperimentArgs& a) {
  mc::ScatterOptions opts;
  opts.k = a.k;
  opts.pairs = a.pairs;
  opts.trials_per_pair = a.trials;
  opts.seed = parse_seed(a.seed);
  opts.min_size = a.min_size;
  opts.max_size = a.max_size;
  opts.similarity_targets.clear();
  for (const auto& s : split_commas(a.sims)) opts.similarity_targets.push_back(std::stod(s));
  const auto rows = mc::run_overlap_scatter(opts);
  mc::write_scatter_csv(std::cout, rows);
}

std::string describe(const goodness::ProjectionReport& r) {
  if (r.satisfied) return "ok";
  const auto& v = *r.counterexample;
  std::string out = std::string("violates(") + v.subcondition + ") x=" + mc::format_double(v.x);
  if (v.y) out += " y=" + mc::format_double(*v.y);
  return out + " theta=" + mc::format_double(v.theta);
}

int cmd_goodness(const CheckArgs& a) {
  goodness::SuiteOptions opts;
  opts.min_k = a.k;
  opts.max_k = a.k;
  opts.seeds = a.seeds;
  opts.grid_points = a.grid;
  opts.base_seed = parse_seed(a.seed).value;
  opts.with_two_goodness = !a.no_two;
  const auto results = goodness::run_goodness_suite(a.tcf, opts);
  std::size_t failures = 0;
  std::cout << "instance\tk\tn\tone_goodness\ttwo_goodness\n";
  for (const auto& r : results) {
    std::string one = "ok";
    for (std::size_t pos = 0; pos < r.one_goodness.size(); ++pos) {
      if (!r.one_goodness[pos].satisfied) {
        one = "pos " + std::to_string(pos) + " " + describe(r.one_goodness[pos]);
        break;
      }
    }
    const std::string two = r.two_goodness ? describe(*r.two_goodness) : "skipped";
    std::cout << r.instance.tcf_name << '\t' << r.instance.k << '\t' << r.instance.fixed_hashes.size() + 1 << '\t'
              << one << '\t' << two << '\n';
    failures += r.passed() ? 0 : 1;
  }
  std::cout << "# " << results.size() - failures << "/" << results.size() << " instances satisfied\n";
  return 0;
}

void cmd_dist(const DistArgs& a) {
  namespace o = theta::oracles;
  const auto dist = o::alpha_level_distribution(a.k, a.u);
  const std::uint64_t n = a.k + a.u;
  const auto size = o::alpha_sample_size_moments(dist);
  const auto hip = o::hip_mean_var(a.k, n);
  std::cout << "quantity,value\n"
            << "k," << a.k << "\nu," << a.u << "\nn," << n << '\n'
            << "g0_dp," << mc::format_double(o::g_moment(dist, 0)) << '\n'
            << "g1_dp," << mc::format_double(o::g_moment(dist, 1)) << '\n'
            << "g2_dp," << mc::format_double(o::g_moment(dist, 2)) << '\n'
            << "g1_closed," << mc::format_double(o::g_closed(1, a.k, a.u)) << '\n'
            << "g2_closed," << mc::format_double(o::g_closed(2, a.k, a.u)) << '\n'
            << "sample_size_mean," << mc::format_double(size.mean) << '\n'
            << "sample_size_variance," << mc::format_double(size.variance) << '\n'
            << "estimator_variance_dp," << mc::format_double(o::alpha_estimator_variance_dp(dist)) << '\n'
            << "estimator_variance_closed," << mc::format_double(o::alpha_estimator_variance(a.k, n)) << '\n'
            << "hip_mean," << mc::format_double(hip.mean) << '\n'
            << "hip_variance," << mc::format_double(hip.variance) << "\n\n"
            << "i,prob\n";
  for (std::size_t i = 0; i < dist.probs.size(); ++i) {
    std::cout << i << ',' << mc::format_double(dist.probs[i]) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Theta sketches: build, combine, estimate, and verify"};
  app.require_subcommand(1);

  SketchArgs sk;
  auto* sketch = app.add_subcommand("sketch", "Build, combine and query sketch files");
  sketch->require_subcommand(1);
  auto* build = sketch->add_subcommand("build", "Sketch a newline-delimited identifier file");
  build->add_option("--tcf", sk.tcf, "kmv|adaptive|pkmv|fixed|alpha|biased")->required();
  build->add_option("--k", sk.k, "Target sample size")->required()->check(CLI::PositiveNumber);
  build->add_option("--beta", sk.beta, "Adaptive level ratio");
  build->add_option("--p", sk.p, "pKMV / fixed sampling rate");
  build->add_option("--seed", sk.seed, "Hash seed (decimal or 0x hex)")->required();
  build->add_flag("--ids", sk.ids, "Retain identifiers");
  build->add_option("-i,--input", sk.input, "Identifier file")->required();
  build->add_option("-o,--output", sk.output, "Sketch file (default stdout)");

  std::vector<CLI::App*> combiners;
  for (const char* op : {"union", "intersect", "diff"}) {
    auto* c = sketch->add_subcommand(op, std::string("Set ") + op + " of sketch files");
    c->add_option("sketches", sk.sketches, "Input sketch files")->required()->expected(1, -1);
    c->add_option("-o,--output", sk.output, "Sketch file (default stdout)");
    combiners.push_back(c);
  }
  auto* estimate = sketch->add_subcommand("estimate", "Estimate the distinct count in a sketch");
  estimate->add_option("sketch", sk.sketches, "Sketch file")->required()->expected(1);
  estimate->add_option("--pred", sk.pred, "all | set:FILE | prefix:STR");

  ExperimentArgs ex;
  auto* experiment = app.add_subcommand("experiment", "Monte Carlo experiments (CSV on stdout)");
  experiment->require_subcommand(1);
  auto add_common = [&ex](CLI::App* c) {
    c->add_option("--k", ex.k, "Target sample size")->check(CLI::PositiveNumber);
    c->add_option("--trials", ex.trials, "Independent trials");
    c->add_option("--seed", ex.seed, "Base hash seed");
    c->add_option("--beta", ex.beta, "Adaptive level ratio");
    c->add_option("--p", ex.p, "pKMV / fixed sampling rate");
  };
  auto* accuracy = experiment->add_subcommand("accuracy", "RMSE/n over a sweep of stream sizes");
  add_common(accuracy);
  accuracy->add_option("--kinds", ex.kinds, "Comma-separated sampler kinds");
  accuracy->add_option("--n", ex.n_list, "Comma-separated stream sizes (overrides the geometric sweep)");
  accuracy->add_option("--n-min", ex.n_min);
  accuracy->add_option("--n-max", ex.n_max);
  accuracy->add_option("--per-octave", ex.per_octave);
  accuracy->add_option("--order", ex.order, "sorted|shuffled");
  auto* comparative = experiment->add_subcommand("comparative", "Union vs concatenated-stream variance");
  add_common(comparative);
  comparative->add_option("--tcf", ex.tcf);
  comparative->add_option("--m", ex.m, "Number of streams");
  comparative->add_option("--size", ex.size, "Distinct ids per stream");
  comparative->add_option("--layout", ex.layout, "disjoint|overlap|permutation");
  comparative->add_option("--overlap", ex.overlap, "Shared ids per stream (overlap layout)");
  comparative->add_option("--order", ex.order, "sorted|shuffled");
  auto* covariance = experiment->add_subcommand("covariance", "Covariance of two per-item estimates");
  add_common(covariance);
  covariance->add_option("--tcf", ex.tcf);
  covariance->add_option("--n", ex.n);
  covariance->add_option("--l1", ex.l1);
  covariance->add_option("--l2", ex.l2);
  auto* scatter = experiment->add_subcommand("scatter", "Alpha union vs concatenation on overlapping pairs");
  add_common(scatter);
  scatter->add_option("--pairs", ex.pairs);
  scatter->add_option("--min-size", ex.min_size);
  scatter->add_option("--max-size", ex.max_size);
  scatter->add_option("--sims", ex.sims, "Comma-separated similarity targets");

  CheckArgs ck;
  auto* check = app.add_subcommand("check", "Probe threshold choosing functions");
  check->require_subcommand(1);
  auto* good = check->add_subcommand("goodness", "1-/2-Goodness on random small instances");
  good->add_option("--tcf", ck.tcf, "kmv|adaptive|pkmv|fixed|alpha|union|biased")->required();
  good->add_option("--k", ck.k)->required()->check(CLI::PositiveNumber);
  good->add_option("--seed", ck.seed)->required();
  good->add_option("--grid", ck.grid, "Grid points per axis");
  good->add_option("--seeds", ck.seeds, "Random instances");
  good->add_flag("--no-two", ck.no_two, "Skip the bivariate check");

  DistArgs da;
  auto* dist = app.add_subcommand("dist", "Exact distributions");
  dist->require_subcommand(1);
  auto* alpha = dist->add_subcommand("alpha", "Alpha level law Pr(I=i; u) and its moments");
  alpha->add_option("--k", da.k)->required()->check(CLI::PositiveNumber);
  alpha->add_option("--u", da.u)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (build->parsed()) cmd_build(sk);
    for (auto* c : combiners) {
      if (c->parsed()) cmd_combine(c->get_name(), sk);
    }
    if (estimate->parsed()) cmd_estimate(sk);
    if (accuracy->parsed()) cmd_accuracy(ex);
    if (comparative->parsed()) cmd_comparative(ex);
    if (covariance->parsed()) cmd_covariance(ex);
    if (scatter->parsed()) cmd_scatter(ex);
    if (good->parsed()) return cmd_goodness(ck);
    if (alpha->parsed()) cmd_dist(da);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const theta::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    const bool usage = e.code() == ErrorCode::DomainError || e.code() == ErrorCode::WrongKind ||
                       e.code() == ErrorCode::UnsupportedQ || e.code() == ErrorCode::ResourceLimit;
    return usage ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return 0;
}
