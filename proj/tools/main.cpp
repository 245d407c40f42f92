#include <CLI11.hpp>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "causalbounds/errors.hpp"
#include "causalbounds/experiments.hpp"
#include "causalbounds/hit_and_run.hpp"
#include "causalbounds/polytope.hpp"
#include "causalbounds/rng.hpp"
#include "parallel.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace causalbounds;

std::string fmt(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw config_error(path + ": " + e.what());
  }
}

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  int threads = 0;  // 0: config value or 1
};

std::string resolve_out(const GlobalFlags& g, const std::string& out) {
  if (g.out_dir.empty() || fs::path(out).is_absolute()) return out;
  fs::create_directories(g.out_dir);
  return (fs::path(g.out_dir) / out).string();
}

// config-file subcommands share one flow; `allowed` guards cross-family kinds
void run_config_command(const GlobalFlags& g, const std::string& config_path,
                        const std::string& out, const char* default_kind,
                        const std::vector<std::string>& allowed,
                        const json& overrides = json::object()) {
  json cfg = config_path.empty() ? json::object() : load_json(config_path);
  if (!cfg.is_object())
    throw config_error("config must be a JSON object: " + config_path);
  if (!cfg.contains("kind")) cfg["kind"] = default_kind;
  for (const auto& [key, value] : overrides.items()) cfg[key] = value;
  const json& kind = cfg["kind"];
  if (!kind.is_string() ||
      std::find(allowed.begin(), allowed.end(), kind.get<std::string>()) ==
          allowed.end()) {
    std::string names;
    for (const auto& k : allowed) names += (names.empty() ? "" : ", ") + k;
    throw config_error("config: kind must be one of {" + names +
                       "} for this subcommand");
  }
  run_experiment(cfg, resolve_out(g, out), g.seed, g.threads);
}

struct SampleArgs {
  std::string polytope;
  std::string out = "samples.csv";
  long steps = 1000;
  long burn_in = -1;
  long thin = 1;
  int chains = 1;
};

void run_sample_command(const GlobalFlags& g, const SampleArgs& a) {
  const PolytopeSpec spec = parse_polytope_spec(load_json(a.polytope).dump());
  const ConstraintPolytope poly = spec.build();
  const Eigen::VectorXd start =
      product_init(spec.grid, spec.marginal_ayw, spec.marginal_u);
  if (a.chains < 1) throw config_error("sample: chains must be >= 1");
  const std::uint64_t seed = g.seed.value_or(0);
  std::vector<Eigen::MatrixXd> per_chain(a.chains);
  detail::parallel_for(a.chains, g.threads > 0 ? g.threads : 1, [&](int c) {
    ChainOptions opts;
    opts.burn_in = a.burn_in;
    opts.thin = a.thin;
    opts.seed = derive_stream(seed, static_cast<std::uint64_t>(c));
    per_chain[c] = run_chain(poly, start, a.steps, opts);
  });

  const std::string path = resolve_out(g, a.out);
  std::ofstream out(path);
  if (!out) throw config_error("cannot open output file: " + path);
  out << "# n_a=" << spec.grid.n_a << " n_y=" << spec.grid.n_y
      << " n_w=" << spec.grid.n_w << " n_u=" << spec.grid.n_u
      << " kappa=" << fmt(spec.kappa) << " epsilon=" << fmt(spec.epsilon)
      << " chains=" << a.chains << " steps=" << a.steps
      << " burn_in=" << a.burn_in << " thin=" << a.thin << " seed=" << seed
      << '\n';
  for (long c = 0; c < poly.dim(); ++c) out << (c ? "," : "") << "cell_" << c;
  out << '\n';
  for (const Eigen::MatrixXd& rows : per_chain)
    for (long i = 0; i < rows.rows(); ++i) {
      for (long c = 0; c < rows.cols(); ++c)
        out << (c ? "," : "") << fmt(rows(i, c));
      out << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "causal-effect bounds over constrained density sets, and bandit "
      "learners accelerated by them"};
  app.require_subcommand(1);
  GlobalFlags g;
  app.add_option("--seed", g.seed,
                 "master seed (overrides any seed in config files)");
  app.add_option("--out-dir", g.out_dir,
                 "directory prefixed to relative output paths");
  app.add_option("--threads", g.threads, "worker threads (default: config or 1)");

  // bounds
  auto* bounds_cmd =
      app.add_subcommand("bounds", "interventional-effect bounds");
  bounds_cmd->require_subcommand(1);
  bounds_cmd->fallthrough();
  auto* compute = bounds_cmd->add_subcommand(
      "compute", "bound the queries over one density polytope");
  compute->fallthrough();
  struct {
    std::string polytope;
    std::vector<std::string> queries;
    std::string out = "bounds.csv";
    long steps = 2000;
    int restarts = 50;
    long burn_in = -1;
    double lh = 1.0;
    bool no_baseline = false;
  } bc;
  compute->add_option("--polytope", bc.polytope, "polytope spec JSON file")
      ->required();
  compute->add_option("--query", bc.queries,
                      "effect query JSON file (repeatable; default: mean "
                      "effect of every action)");
  compute->add_option("--steps", bc.steps, "chain samples per query");
  compute->add_option("--restarts", bc.restarts, "local-optimizer starts");
  compute->add_option("--burn-in", bc.burn_in,
                      "chain burn-in (-1: 10x kernel dimension)");
  compute->add_option("--lh", bc.lh,
                      "set-perturbation rate used in the drift certificate");
  compute->add_flag("--no-baseline", bc.no_baseline,
                    "skip the marginal-only baseline rows");
  compute->add_option("--out", bc.out, "output CSV");
  compute->callback([&] {
    json cfg = {{"kind", "bounds"},
                {"environment", load_json(bc.polytope)},
                {"steps", bc.steps},
                {"restarts", bc.restarts},
                {"burn_in", bc.burn_in},
                {"lh", bc.lh},
                {"baseline", !bc.no_baseline}};
    if (!bc.queries.empty()) {
      json qs = json::array();
      for (const std::string& path : bc.queries) qs.push_back(load_json(path));
      cfg["queries"] = qs;
    }
    run_experiment(cfg, resolve_out(g, bc.out), g.seed, g.threads);
  });
  auto* bounds_run = bounds_cmd->add_subcommand(
      "run", "bounds or relaxation-sweep experiment from a config file");
  bounds_run->fallthrough();
  struct {
    std::string config;
    std::string out = "bounds.csv";
  } br;
  bounds_run->add_option("--config", br.config, "experiment JSON")->required();
  bounds_run->add_option("--out", br.out, "output CSV");
  bounds_run->callback([&] {
    run_config_command(g, br.config, br.out, "bounds", {"bounds", "eps_sweep"});
  });

  // sample
  auto* sample_cmd =
      app.add_subcommand("sample", "uniform draws from a density polytope");
  sample_cmd->fallthrough();
  SampleArgs sa;
  sample_cmd->add_option("--polytope", sa.polytope, "polytope spec JSON file")
      ->required();
  sample_cmd->add_option("--steps", sa.steps, "retained samples per chain");
  sample_cmd->add_option("--burn-in", sa.burn_in,
                         "discarded leading steps (-1: 10x kernel dimension)");
  sample_cmd->add_option("--thin", sa.thin, "keep every k-th step");
  sample_cmd->add_option("--chains", sa.chains, "independent chains");
  sample_cmd->add_option("--out", sa.out, "output CSV");
  sample_cmd->callback([&] { run_sample_command(g, sa); });

  // mab
  auto* mab_cmd = app.add_subcommand("mab", "multi-armed bandit experiments");
  mab_cmd->require_subcommand(1);
  mab_cmd->fallthrough();
  auto* mab_run = mab_cmd->add_subcommand("run", "run a bandit experiment");
  mab_run->fallthrough();
  struct {
    std::string config;
    std::string out = "results.csv";
  } ma;
  mab_run->add_option("--config", ma.config, "experiment JSON")->required();
  mab_run->add_option("--out", ma.out, "raw results CSV");
  mab_run->callback([&] {
    run_config_command(g, ma.config, ma.out, "mab",
                       {"mab", "negative_transfer", "limiting"});
  });

  // cb
  auto* cb_cmd = app.add_subcommand("cb", "contextual bandit experiments");
  cb_cmd->require_subcommand(1);
  cb_cmd->fallthrough();
  auto* cb_run = cb_cmd->add_subcommand("run", "run a contextual experiment");
  cb_run->fallthrough();
  struct {
    std::string config;
    std::string out = "results.csv";
    std::string mode;
    bool no_prune = false;
  } ca;
  cb_run->add_option("--config", ca.config, "experiment JSON")->required();
  cb_run->add_option("--mode", ca.mode, "candidate-set mode")
      ->check(CLI::IsMember({"lp", "box", "full"}));
  cb_run->add_flag("--no-prune", ca.no_prune,
                   "keep the unpruned function class (baseline learner)");
  cb_run->add_option("--out", ca.out, "raw results CSV");
  cb_run->callback([&] {
    json overrides = json::object();
    if (!ca.mode.empty()) overrides["mode"] = ca.mode;
    if (ca.no_prune) overrides["prune_function_class"] = false;
    run_config_command(g, ca.config, ca.out, "cb", {"cb"}, overrides);
  });

  // bench
  auto* bench_cmd =
      app.add_subcommand("bench", "sampler throughput benchmarks");
  bench_cmd->require_subcommand(1);
  bench_cmd->fallthrough();
  auto* bench_run =
      bench_cmd->add_subcommand("run", "time the polytope samplers");
  bench_run->fallthrough();
  struct {
    std::string config;
    std::string out = "bench.csv";
  } ba;
  bench_run->add_option("--config", ba.config,
                        "experiment JSON (default: sizes 2,3,4)");
  bench_run->add_option("--out", ba.out, "output CSV");
  bench_run->callback([&] {
    run_config_command(g, ba.config, ba.out, "bench_sampler", {"bench_sampler"});
  });

  // report
  auto* report_cmd = app.add_subcommand(
      "report", "summary statistics from a raw results CSV");
  report_cmd->fallthrough();
  struct {
    std::string results;
    std::string out = "summary.csv";
  } ra;
  report_cmd->add_option("--results", ra.results, "raw results CSV")
      ->required();
  report_cmd->add_option("--out", ra.out, "summary CSV");
  report_cmd->callback(
      [&] { write_report(ra.results, resolve_out(g, ra.out)); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
