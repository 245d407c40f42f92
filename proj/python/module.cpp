#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include <json.hpp>

#include "causalbounds/bounds.hpp"
#include "causalbounds/effects.hpp"
#include "causalbounds/errors.hpp"
#include "causalbounds/experiments.hpp"
#include "causalbounds/hit_and_run.hpp"
#include "causalbounds/polytope.hpp"

namespace py = pybind11;
using namespace causalbounds;

namespace {

py::dict to_dict(const CausalBounds& b) {
  py::dict d;
  d["l"] = b.l;
  d["h"] = b.h;
  d["err"] = b.err;
  d["samples"] = b.samples;
  d["wall_ms"] = b.wall_ms;
  d["provenance"] = b.provenance;
  return d;
}

}  // namespace

PYBIND11_MODULE(_causalbounds, m) {
  m.doc() =
      "causal-effect bounds over constrained density sets, with the "
      "experiment harness";

  py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<numeric_error>(m, "NumericError",
                                        PyExc_ArithmeticError);

  m.def("builtin_instance",
        [](const std::string& name) { return builtin_instance(name).dump(); },
        py::arg("name"), "Shipped environment fixture as a JSON string.");

  m.def(
      "sample",
      [](const std::string& spec_json, long steps, long burn_in, long thin,
         std::uint64_t seed) {
        const PolytopeSpec spec = parse_polytope_spec(spec_json);
        const ConstraintPolytope poly = spec.build();
        const Eigen::VectorXd start =
            product_init(spec.grid, spec.marginal_ayw, spec.marginal_u);
        ChainOptions opts;
        opts.burn_in = burn_in;
        opts.thin = thin;
        opts.seed = seed;
        return run_chain(poly, start, steps, opts);
      },
      py::arg("spec_json"), py::arg("steps") = 1000, py::arg("burn_in") = -1,
      py::arg("thin") = 1, py::arg("seed") = 0,
      "Uniform draws from the density polytope, one row per sample.");

  m.def(
      "bounds",
      [](const std::string& spec_json, const std::string& query_json,
         long steps, int restarts, long burn_in, std::uint64_t seed,
         int threads) {
        const PolytopeSpec spec = parse_polytope_spec(spec_json);
        const EffectQuery query = parse_effect_query(query_json);
        BoundRunOptions opts;
        opts.steps = steps;
        opts.restarts = restarts;
        opts.burn_in = burn_in;
        opts.seed = seed;
        opts.threads = threads;
        CausalBounds b = bounds_accelerated(
            spec.build(), make_objective(spec.grid, query, spec.kappa),
            product_init(spec.grid, spec.marginal_ayw, spec.marginal_u), opts);
        if (spec.epsilon > 0.0)
          b.err = propagate_error(
              lipschitz_constant(query.kind, spec.grid, spec.kappa, 1.0), 1.0,
              spec.epsilon);
        return to_dict(b);
      },
      py::arg("spec_json"), py::arg("query_json"), py::arg("steps") = 2000,
      py::arg("restarts") = 50, py::arg("burn_in") = -1, py::arg("seed") = 0,
      py::arg("threads") = 1,
      "Sampling+oracle bounds on one effect query over the polytope.");

  m.def(
      "frechet_bounds",
      [](const std::string& spec_json, const std::string& query_json) {
        const PolytopeSpec spec = parse_polytope_spec(spec_json);
        return to_dict(frechet_only_bounds(spec.grid, spec.marginal_ayw,
                                           spec.marginal_u,
                                           parse_effect_query(query_json),
                                           BoundRunOptions{}));
      },
      py::arg("spec_json"), py::arg("query_json"),
      "Marginal-only baseline bounds (no joint consistency).");

  m.def(
      "evaluate_query",
      [](const std::string& spec_json, const Eigen::VectorXd& density,
         const std::string& query_json) {
        const PolytopeSpec spec = parse_polytope_spec(spec_json);
        return evaluate_query(JointDensity{spec.grid, density},
                              parse_effect_query(query_json), spec.kappa);
      },
      py::arg("spec_json"), py::arg("density"), py::arg("query_json"),
      "Interventional functional of one joint density on the spec's grid.");

  m.def(
      "run_experiment",
      [](const std::string& config_json, const std::string& out_path,
         std::optional<std::uint64_t> seed, int threads) {
        return run_experiment(nlohmann::json::parse(config_json), out_path,
                              seed, threads);
      },
      py::arg("config_json"), py::arg("out_path"),
      py::arg("seed") = std::nullopt, py::arg("threads") = 0,
      "Run one experiment config; returns the number of CSV files written.");

  m.def("write_report", &write_report, py::arg("results_csv"),
        py::arg("out_csv"),
        "Recompute the summary table from a raw per-trial results CSV.");
}
