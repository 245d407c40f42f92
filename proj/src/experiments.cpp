#include "causalbounds/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "causalbounds/bounds.hpp"
#include "causalbounds/contextual.hpp"
#include "causalbounds/effects.hpp"
#include "causalbounds/errors.hpp"
#include "causalbounds/hit_and_run.hpp"
#include "causalbounds/lp.hpp"
#include "causalbounds/mab.hpp"
#include "causalbounds/polytope.hpp"
#include "causalbounds/rng.hpp"
#include "parallel.hpp"

namespace causalbounds {
namespace {

using nlohmann::json;

// shortest decimal form that round-trips the double
std::string fmt(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

const json& require_field(const json& j, const char* key) {
  if (j.is_object()) {
    const auto it = j.find(key);
    if (it != j.end()) return *it;
  }
  throw config_error(std::string("config: missing field '") + key + "'");
}

json resolve_payload(const json& value) {
  if (value.is_string()) {
    std::string name = value.get<std::string>();
    const std::string prefix = "builtin:";
    if (name.rfind(prefix, 0) == 0) name = name.substr(prefix.size());
    return builtin_instance(name);
  }
  return value;
}

json payload_or_builtin(const json& cfg, const char* fallback) {
  if (cfg.contains("environment")) return resolve_payload(cfg.at("environment"));
  return builtin_instance(fallback);
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot open output file: " + path);
  return out;
}

std::string summary_path(const std::string& out_path) {
  const auto slash = out_path.find_last_of('/');
  const auto dot = out_path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return out_path + "_summary.csv";
  return out_path.substr(0, dot) + "_summary" + out_path.substr(dot);
}

double vec_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double vec_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = vec_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double vec_median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// rounds on which cumulative regret is written to the raw CSV
std::vector<long> record_grid(long horizon, long every) {
  std::vector<long> grid;
  for (long t = every; t <= horizon; t += every) grid.push_back(t);
  if (grid.empty() || grid.back() != horizon) grid.push_back(horizon);
  return grid;
}

MabEnvironment mab_environment(const json& spec) {
  MabEnvironment env;
  env.means = require_field(spec, "means").get<std::vector<double>>();
  if (env.means.empty()) throw config_error("mab environment: no arms");
  env.sigma = spec.value("sigma", 0.1);
  if (spec.contains("bounds")) {
    for (const auto& row : spec.at("bounds")) {
      ArmBound b;
      b.l = require_field(row, "l").get<double>();
      b.h = require_field(row, "h").get<double>();
      b.eps = row.value("eps", 0.0);
      env.bounds.push_back(b);
    }
  } else {
    env.bounds.assign(env.means.size(), ArmBound{0.0, 1.0, 0.0});
  }
  if (env.bounds.size() != env.means.size())
    throw config_error("mab environment: one bound per arm required");
  return env;
}

CbEnvironment cb_environment(const json& spec) {
  CbEnvironment env;
  LinearFunctionClass& f = env.fclass;
  f.d = require_field(spec, "d").get<int>();
  if (f.d < 1) throw config_error("cb environment: d must be >= 1");
  const json& feats = require_field(spec, "features");
  const json& lower = require_field(spec, "lower");
  const json& upper = require_field(spec, "upper");
  const int n_w = static_cast<int>(feats.size());
  if (n_w == 0) throw config_error("cb environment: empty feature table");
  const int n_a = static_cast<int>(feats.at(0).size());
  if (static_cast<int>(lower.size()) != n_w ||
      static_cast<int>(upper.size()) != n_w)
    throw config_error("cb environment: bound tables must cover every context");
  f.features.resize(n_w);
  f.lower.resize(n_w, n_a);
  f.upper.resize(n_w, n_a);
  for (int w = 0; w < n_w; ++w) {
    const json& fw = feats.at(w);
    const json& lw = lower.at(w);
    const json& uw = upper.at(w);
    if (static_cast<int>(fw.size()) != n_a ||
        static_cast<int>(lw.size()) != n_a ||
        static_cast<int>(uw.size()) != n_a)
      throw config_error("cb environment: ragged arm tables");
    f.features[w].resize(n_a);
    for (int a = 0; a < n_a; ++a) {
      const auto phi = fw.at(a).get<std::vector<double>>();
      if (static_cast<int>(phi.size()) != f.d)
        throw config_error("cb environment: feature dimension mismatch");
      f.features[w][a] =
          Eigen::Map<const Eigen::VectorXd>(phi.data(), f.d);
      f.lower(w, a) = lw.at(a).get<double>();
      f.upper(w, a) = uw.at(a).get<double>();
    }
  }
  env.sigma = spec.value("sigma", 0.1);
  return env;
}

std::vector<EffectQuery> parse_queries(const json& cfg, int n_a) {
  std::vector<EffectQuery> queries;
  if (cfg.contains("queries")) {
    for (const auto& q : cfg.at("queries"))
      queries.push_back(parse_effect_query(q.dump()));
    if (queries.empty()) throw config_error("config: empty query list");
  } else {
    for (int a = 0; a < n_a; ++a) {
      EffectQuery q;
      q.a = a;
      queries.push_back(q);
    }
  }
  return queries;
}

BoundRunOptions bound_options(const json& cfg, std::uint64_t seed,
                              int threads) {
  BoundRunOptions opts;
  opts.steps = cfg.value("steps", opts.steps);
  opts.restarts = cfg.value("restarts", opts.restarts);
  opts.burn_in = cfg.value("burn_in", opts.burn_in);
  opts.seed = seed;
  opts.threads = threads;
  return opts;
}

void write_bound_row(std::ofstream& out, const std::string& prefix,
                     const EffectQuery& q, const CausalBounds& b) {
  out << prefix << query_name(q) << ',' << fmt(b.l) << ',' << fmt(b.h) << ','
      << fmt(b.err) << ',' << b.provenance << ',' << fmt(b.wall_ms) << '\n';
}

int run_bounds_kind(const json& cfg, const std::string& out_path,
                    std::uint64_t seed, int threads) {
  const PolytopeSpec spec =
      parse_polytope_spec(payload_or_builtin(cfg, "pocb_table3").dump());
  const std::vector<EffectQuery> queries = parse_queries(cfg, spec.grid.n_a);
  const ConstraintPolytope poly = spec.build();
  const Eigen::VectorXd start =
      product_init(spec.grid, spec.marginal_ayw, spec.marginal_u);
  const double l_h = cfg.value("lh", 1.0);
  const bool baseline = cfg.value("baseline", true);

  std::ofstream out = open_csv(out_path);
  out << "query,l,h,err,provenance,wall_ms\n";
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    const EffectQuery& q = queries[qi];
    BoundRunOptions opts = bound_options(cfg, derive_stream(seed, qi), threads);
    CausalBounds b = bounds_accelerated(
        poly, make_objective(spec.grid, q, spec.kappa), start, opts);
    if (spec.epsilon > 0.0)
      b.err = propagate_error(
          lipschitz_constant(q.kind, spec.grid, spec.kappa, 1.0), l_h,
          spec.epsilon);
    write_bound_row(out, "", q, b);
    if (baseline && q.kind != EffectKind::mean_do_a_given_w)
      write_bound_row(out, "", q,
                      frechet_only_bounds(spec.grid, spec.marginal_ayw,
                                          spec.marginal_u, q, opts));
  }
  return 1;
}

int run_eps_sweep_kind(const json& cfg, const std::string& out_path,
                       std::uint64_t seed, int threads) {
  PolytopeSpec spec =
      parse_polytope_spec(payload_or_builtin(cfg, "pocb_table3").dump());
  std::vector<EffectQuery> queries;
  if (cfg.contains("queries")) {
    queries = parse_queries(cfg, spec.grid.n_a);
  } else {
    EffectQuery q;
    q.a = cfg.value("a", 0);
    queries.push_back(q);
  }
  const auto epsilons = cfg.value(
      "epsilons", std::vector<double>{0.1, 0.05, 0.02, 0.01, 0.0});
  const double l_h = cfg.value("lh", 1.0);
  const Eigen::VectorXd start =
      product_init(spec.grid, spec.marginal_ayw, spec.marginal_u);

  std::ofstream out = open_csv(out_path);
  out << "epsilon,query,l,h,err,provenance,wall_ms\n";
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    const EffectQuery& q = queries[qi];
    // one seed per query, shared across epsilons, so the intervals nest
    const BoundRunOptions opts =
        bound_options(cfg, derive_stream(seed, qi), threads);
    const Objective objective = make_objective(spec.grid, q, spec.kappa);
    for (double eps : epsilons) {
      PolytopeSpec relaxed = spec;
      relaxed.epsilon = eps;
      CausalBounds b = bounds_accelerated(relaxed.build(), objective, start, opts);
      if (eps > 0.0)
        b.err = propagate_error(
            lipschitz_constant(q.kind, spec.grid, spec.kappa, 1.0), l_h, eps);
      write_bound_row(out, fmt(eps) + ",", q, b);
    }
  }
  return 1;
}

void write_raw_trajectories(std::ofstream& out, const std::string& algorithm,
                            const std::vector<long>& grid, long trial,
                            const std::vector<double>& regret) {
  for (long t : grid)
    out << trial << ',' << algorithm << ',' << t << ','
        << fmt(regret[static_cast<std::size_t>(t - 1)]) << '\n';
}

int run_mab_kind(const json& cfg, const std::string& out_path,
                 std::uint64_t seed, int threads) {
  const MabEnvironment env = mab_environment(payload_or_builtin(cfg, "mab_table4"));
  const long horizon = cfg.value("horizon", 10000L);
  const int trials = cfg.value("trials", 50);
  const double delta = cfg.value("delta", 0.1);
  const auto names = cfg.value(
      "algorithms", std::vector<std::string>{"plain_ucb", "alg3", "alg4"});
  const long every =
      cfg.value("record_every", std::max(1L, horizon / 100));
  if (every < 1) throw config_error("config: record_every must be >= 1");

  WarmStart warm;
  const WarmStart* warm_ptr = nullptr;
  if (cfg.contains("warm_start")) {
    const json& w = cfg.at("warm_start");
    warm.prior_means = require_field(w, "prior_means").get<std::vector<double>>();
    warm.prior_counts = require_field(w, "prior_counts").get<std::vector<long>>();
    warm_ptr = &warm;
  }

  const std::vector<long> grid = record_grid(horizon, every);
  std::ofstream raw = open_csv(out_path);
  raw << "trial,algorithm,t,cumulative_regret\n";
  std::ofstream summary = open_csv(summary_path(out_path));
  summary << "algorithm,arm,mean_pulls,sd_pulls,mean_regret,sd_regret\n";
  for (const std::string& name : names) {
    const MabAlgorithm algorithm = parse_mab_algorithm(name);
    const std::string label = mab_algorithm_name(algorithm);
    const MabRunResult r =
        run_mab(env, algorithm, horizon, trials, delta, seed, threads, warm_ptr);
    for (int i = 0; i < trials; ++i)
      write_raw_trajectories(raw, label, grid, i, r.trials[i].regret);
    for (int arm = 0; arm < static_cast<int>(env.means.size()); ++arm)
      summary << label << ',' << arm << ',' << fmt(r.mean_pulls[arm]) << ','
              << fmt(r.sd_pulls[arm]) << ',' << fmt(r.mean_regret) << ','
              << fmt(r.sd_regret) << '\n';
  }
  return 2;
}

int run_cb_kind(const json& cfg, const std::string& out_path,
                std::uint64_t seed, int threads) {
  const CbEnvironment env = cb_environment(payload_or_builtin(cfg, "cb_contexts"));
  const CbMode mode = parse_cb_mode(cfg.value("mode", std::string("lp")));
  const bool prune = cfg.value("prune_function_class", true);
  const long horizon = cfg.value("horizon", 10000L);
  const int trials = cfg.value("trials", 50);
  const double delta = cfg.value("delta", 0.1);
  const double eta = cfg.value("eta", 1.0);
  const long every =
      cfg.value("record_every", std::max(1L, horizon / 100));
  if (every < 1) throw config_error("config: record_every must be >= 1");

  const CbRunResult r = run_contextual(env, mode, prune, horizon, trials, delta,
                                       eta, seed, threads, true);
  const std::string label = cb_mode_name(mode, prune);
  const std::vector<long> grid = record_grid(horizon, every);
  std::ofstream raw = open_csv(out_path);
  raw << "trial,algorithm,t,cumulative_regret\n";
  for (int i = 0; i < trials; ++i)
    write_raw_trajectories(raw, label, grid, i, r.trials[i].regret);
  std::ofstream summary = open_csv(summary_path(out_path));
  summary << "algorithm,mean,sd,median,min,max\n";
  summary << label << ',' << fmt(r.mean) << ',' << fmt(r.sd) << ','
          << fmt(r.median) << ',' << fmt(r.min) << ',' << fmt(r.max) << '\n';
  return 2;
}

int run_bench_kind(const json& cfg, const std::string& out_path,
                   std::uint64_t seed) {
  const auto sizes = cfg.value("sizes", std::vector<int>{2, 3, 4});
  const long chain_samples = cfg.value("chain_samples", 1000L);
  const long lp_samples = cfg.value("lp_samples", 20L);
  const double kappa = cfg.value("kappa", 1e-6);

  std::ofstream out = open_csv(out_path);
  out << "n,sampler,samples,valid,seconds,valid_samples_per_sec\n";
  for (int n : sizes) {
    if (n < 2) throw config_error("bench: sizes must be >= 2");
    GridSpec grid{n, n, n, n, Eigen::VectorXd::LinSpaced(n, 0.0, 1.0)};
    // random joint with mass bounded away from zero; its marginals are feasible
    CounterRng gen(derive_stream(seed, static_cast<std::uint64_t>(n)));
    Eigen::VectorXd joint(grid.cells());
    for (long c = 0; c < grid.cells(); ++c)
      joint[c] = 0.2 + 0.8 * gen.next_double();
    joint /= joint.sum();
    Eigen::VectorXd ayw = Eigen::VectorXd::Zero(grid.ayw_cells());
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    for (long s = 0; s < grid.ayw_cells(); ++s)
      for (int l = 0; l < n; ++l) {
        ayw[s] += joint[s * n + l];
        u[l] += joint[s * n + l];
      }
    const ConstraintPolytope poly = build_marginal_constraints(grid, ayw, u, kappa);
    const Eigen::VectorXd start = product_init(grid, ayw, u);

    double t0 = detail::now_ms();
    ChainOptions copts;
    copts.seed = derive_stream(seed, 100 + static_cast<std::uint64_t>(n));
    const Eigen::MatrixXd draws = run_chain(poly, start, chain_samples, copts);
    double secs = std::max((detail::now_ms() - t0) / 1000.0, 1e-9);
    long valid = 0;
    for (long i = 0; i < draws.rows(); ++i)
      valid += check_feasible(draws.row(i).transpose(), poly, 1e-9) ? 1 : 0;
    out << n << ",hit_and_run," << chain_samples << ',' << valid << ','
        << fmt(secs) << ',' << fmt(static_cast<double>(valid) / secs) << '\n';

    t0 = detail::now_ms();
    CounterRng lp_rng(derive_stream(seed, 200 + static_cast<std::uint64_t>(n)));
    long lp_valid = 0;
    for (long i = 0; i < lp_samples; ++i)
      lp_valid +=
          check_feasible(sequential_lp_sample(poly, lp_rng), poly, 1e-9) ? 1 : 0;
    secs = std::max((detail::now_ms() - t0) / 1000.0, 1e-9);
    out << n << ",sequential_lp," << lp_samples << ',' << lp_valid << ','
        << fmt(secs) << ',' << fmt(static_cast<double>(lp_valid) / secs) << '\n';
  }
  return 1;
}

int run_negative_transfer_kind(const json& cfg, const std::string& out_path,
                               std::uint64_t seed, int threads) {
  const MabEnvironment env = mab_environment(payload_or_builtin(cfg, "mab_table4"));
  json priors = cfg.contains("priors")
                    ? resolve_payload(cfg.at("priors"))
                    : builtin_instance("negative_transfer_priors");
  if (priors.is_object()) priors = require_field(priors, "prior_means");
  const auto prior_means = priors.get<std::vector<double>>();
  if (prior_means.size() != env.means.size())
    throw config_error("negative transfer: one prior mean per arm required");
  const int sweep_arm = cfg.value("sweep_arm", 4);
  if (sweep_arm < 0 || sweep_arm >= static_cast<int>(env.means.size()))
    throw config_error("negative transfer: sweep_arm out of range");
  const auto sizes = cfg.value(
      "offline_sizes", std::vector<long>{100, 1000, 1500, 2000, 2500, 3000});
  const long base_count = cfg.value("baseline_count", 30L);
  const long horizon = cfg.value("horizon", 10000L);
  const int trials = cfg.value("trials", 50);
  const double delta = cfg.value("delta", 0.1);

  std::ofstream out = open_csv(out_path);
  out << "offline_size,sweep_arm,mean_regret,sd_regret,mean_pulls_arm,"
         "sd_pulls_arm\n";
  for (long size : sizes) {
    WarmStart warm;
    warm.prior_means = prior_means;
    warm.prior_counts.assign(env.means.size(), base_count);
    warm.prior_counts[sweep_arm] = size;
    const MabRunResult r = run_mab(env, MabAlgorithm::plain_ucb, horizon,
                                   trials, delta, seed, threads, &warm);
    // pull counters start at the offline count; report online pulls
    out << size << ',' << sweep_arm << ',' << fmt(r.mean_regret) << ','
        << fmt(r.sd_regret) << ','
        << fmt(r.mean_pulls[sweep_arm] - static_cast<double>(size)) << ','
        << fmt(r.sd_pulls[sweep_arm]) << '\n';
  }
  return 1;
}

int run_limiting_kind(const json& cfg, const std::string& out_path,
                      std::uint64_t seed, int threads) {
  const MabEnvironment env = mab_environment(payload_or_builtin(cfg, "mab_table4"));
  const MabAlgorithm algorithm =
      parse_mab_algorithm(cfg.value("algorithm", std::string("alg4")));
  const auto epsilons = cfg.value(
      "epsilons",
      std::vector<double>{0.001, 0.01, 0.02, 0.04, 0.06, 0.08, 0.1, 1.0});
  const long horizon = cfg.value("horizon", 10000L);
  const int trials = cfg.value("trials", 50);
  const double delta = cfg.value("delta", 0.1);

  std::ofstream out = open_csv(out_path);
  out << "epsilon,algorithm,mean_regret,sd_regret\n";
  for (double eps : epsilons) {
    MabEnvironment e = env;
    for (ArmBound& b : e.bounds) b.eps = eps;
    const MabRunResult r =
        run_mab(e, algorithm, horizon, trials, delta, seed, threads);
    out << fmt(eps) << ',' << mab_algorithm_name(algorithm) << ','
        << fmt(r.mean_regret) << ',' << fmt(r.sd_regret) << '\n';
  }
  return 1;
}

}  // namespace

json builtin_instance(const std::string& name) {
  if (name == "pocb_table3") {
    const double raw[8] = {0.2328, 0.1784, 0.1351, 0.1467,
                           0.0304, 0.1183, 0.0149, 0.1433};
    double total = 0.0;
    for (double v : raw) total += v;
    json marginal = json::array();
    for (double v : raw) marginal.push_back(v / total);
    return json{{"grid",
                 {{"n_a", 2},
                  {"n_y", 2},
                  {"n_w", 2},
                  {"n_u", 2},
                  {"y_values", {0.0, 1.0}}}},
                {"marginal_ayw", marginal},
                {"marginal_u", {0.9, 0.1}},
                {"kappa", 1e-6},
                {"epsilon", 0.0}};
  }
  if (name == "mab_table4") {
    json bounds = json::array();
    const double lh[6][2] = {{0.25, 0.50}, {0.35, 0.60}, {0.45, 0.70},
                             {0.55, 0.78}, {0.65, 0.85}, {0.75, 0.90}};
    for (const auto& b : lh)
      bounds.push_back({{"l", b[0]}, {"h", b[1]}, {"eps", 0.1}});
    return json{{"means", {0.3, 0.4, 0.5, 0.7, 0.7, 0.8}},
                {"sigma", 0.1},
                {"bounds", bounds}};
  }
  if (name == "cb_contexts") {
    const double F[11][5][2] = {
        {{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {0.5, 0.5}, {2.0, 0.0}},
        {{1.0, 0.0}, {0.0, 1.0}, {0.5, 0.5}, {1.0, 1.0}, {0.0, 1.0}},
        {{0.8, 0.0}, {0.0, 0.8}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}},
        {{1.2, 0.0}, {0.0, 1.2}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}},
        {{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {0.5, 0.5}, {0.0, 0.0}},
        {{1.0, 0.0}, {0.0, 1.0}, {0.5, 0.5}, {1.0, 1.0}, {1.0, 0.5}},
        {{1.0, 0.0}, {0.0, 1.0}, {0.5, 0.5}, {0.5, 0.5}, {2.0, 0.0}},
        {{1.5, 0.0}, {0.0, 1.0}, {0.7, 0.7}, {0.1, 0.1}, {0.1, 0.1}},
        {{1.0, 0.0}, {0.0, 1.0}, {0.1, 0.1}, {0.0, 1.0}, {0.1, 0.1}},
        {{0.5, 0.0}, {0.0, 0.5}, {0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}},
        {{1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}, {1.0, 1.0}, {0.1, 2.0}}};
    const double L[11][5] = {
        {0.5, 0.5, 0.95, 0.0, 1.7}, {0.5, 0.5, 0.0, 0.95, 0.0},
        {0.6, 0.0, 0.0, 0.0, 0.0},  {0.0, 0.8, 0.0, 0.0, 0.0},
        {0.0, 0.0, 0.95, 0.0, 0.0}, {0.5, 0.5, 0.0, 0.95, 0.95},
        {0.5, 0.5, 0.0, 0.0, 1.4},  {0.8, 0.8, 0.7, 0.0, 0.0},
        {0.5, 0.8, 0.0, 0.8, 0.0},  {0.0, 0.0, 0.0, 0.0, 0.0},
        {0.5, 0.5, 0.0, 0.0, 0.0}};
    const double H[11][5] = {
        {0.95, 0.95, 1.9, 0.85, 1.9},   {0.95, 0.95, 0.85, 1.9, 0.94},
        {1.05, 0.85, 0.5, 0.5, 0.7},    {1.1, 1.05, 0.01, 0.01, 0.01},
        {0.9, 0.9, 1.9, 0.9, 0.01},     {0.95, 0.95, 0.85, 1.9, 1.9},
        {0.95, 0.95, 0.85, 0.85, 1.9},  {1.35, 0.95, 1.9, 0.2, 0.2},
        {0.95, 0.95, 0.4, 0.95, 0.4},   {1.0, 1.0, 1.0, 1.0, 1.0},
        {0.95, 0.95, 1.0, 1.9, 1.9}};
    json features = json::array(), lower = json::array(), upper = json::array();
    for (int w = 0; w < 11; ++w) {
      json fw = json::array(), lw = json::array(), uw = json::array();
      for (int a = 0; a < 5; ++a) {
        fw.push_back({F[w][a][0], F[w][a][1]});
        lw.push_back(L[w][a]);
        uw.push_back(H[w][a]);
      }
      features.push_back(fw);
      lower.push_back(lw);
      upper.push_back(uw);
    }
    return json{{"d", 2},
                {"sigma", 0.1},
                {"features", features},
                {"lower", lower},
                {"upper", upper}};
  }
  if (name == "negative_transfer_priors")
    return json{{"prior_means", {0.5, 0.6, 0.7, 0.78, 0.85, 0.75}}};
  throw config_error("unknown builtin instance: " + name);
}

int run_experiment(const json& config, const std::string& out_path,
                   std::optional<std::uint64_t> seed_override, int threads) {
  if (!config.is_object()) throw config_error("config: expected a JSON object");
  try {
    const std::string kind = require_field(config, "kind").get<std::string>();
    const std::uint64_t seed =
        seed_override ? *seed_override
                      : config.value("seed", static_cast<std::uint64_t>(0));
    const int eff_threads = threads > 0 ? threads : config.value("threads", 1);
    if (kind == "bounds")
      return run_bounds_kind(config, out_path, seed, eff_threads);
    if (kind == "eps_sweep")
      return run_eps_sweep_kind(config, out_path, seed, eff_threads);
    if (kind == "mab") return run_mab_kind(config, out_path, seed, eff_threads);
    if (kind == "cb") return run_cb_kind(config, out_path, seed, eff_threads);
    if (kind == "bench_sampler") return run_bench_kind(config, out_path, seed);
    if (kind == "negative_transfer")
      return run_negative_transfer_kind(config, out_path, seed, eff_threads);
    if (kind == "limiting")
      return run_limiting_kind(config, out_path, seed, eff_threads);
    throw config_error("config: unknown kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw config_error(std::string("config: ") + e.what());
  }
}

void write_report(const std::string& results_csv, const std::string& out_csv) {
  std::ifstream in(results_csv);
  if (!in) throw config_error("cannot open results file: " + results_csv);
  std::string line;
  if (!std::getline(in, line))
    throw config_error("results file is empty: " + results_csv);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "trial,algorithm,t,cumulative_regret")
    throw config_error(
        "results file must start with header "
        "trial,algorithm,t,cumulative_regret");

  struct Final {
    long t = -1;
    double regret = 0.0;
  };
  std::vector<std::string> order;
  std::map<std::string, std::map<long, Final>> finals;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string trial_s, algorithm, t_s, regret_s;
    if (!std::getline(row, trial_s, ',') || !std::getline(row, algorithm, ',') ||
        !std::getline(row, t_s, ',') || !std::getline(row, regret_s))
      throw config_error("results file: bad row at line " +
                         std::to_string(line_no));
    long trial = 0, t = 0;
    double regret = 0.0;
    try {
      trial = std::stol(trial_s);
      t = std::stol(t_s);
      regret = std::stod(regret_s);
    } catch (const std::exception&) {
      throw config_error("results file: bad row at line " +
                         std::to_string(line_no));
    }
    auto it = finals.find(algorithm);
    if (it == finals.end()) {
      order.push_back(algorithm);
      it = finals.emplace(algorithm, std::map<long, Final>{}).first;
    }
    Final& f = it->second[trial];
    if (t > f.t) f = Final{t, regret};
  }

  std::ofstream out = open_csv(out_csv);
  out << "algorithm,mean,sd,median,min,max\n";
  for (const std::string& algorithm : order) {
    std::vector<double> values;
    for (const auto& [trial, f] : finals[algorithm]) values.push_back(f.regret);
    out << algorithm << ',' << fmt(vec_mean(values)) << ','
        << fmt(vec_sd(values)) << ',' << fmt(vec_median(values)) << ','
        << fmt(*std::min_element(values.begin(), values.end())) << ','
        << fmt(*std::max_element(values.begin(), values.end())) << '\n';
  }
}

}  // namespace causalbounds
