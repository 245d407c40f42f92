#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "causalbounds/contextual.hpp"
#include "causalbounds/experiments.hpp"
#include "causalbounds/mab.hpp"
#include "causalbounds/polytope.hpp"
#include "causalbounds/rng.hpp"

namespace testutil {

inline causalbounds::PolytopeSpec table3_spec() {
  return causalbounds::parse_polytope_spec(
      causalbounds::builtin_instance("pocb_table3").dump());
}

inline causalbounds::MabEnvironment table4_env() {
  const nlohmann::json j = causalbounds::builtin_instance("mab_table4");
  causalbounds::MabEnvironment env;
  env.means = j.at("means").get<std::vector<double>>();
  env.sigma = j.at("sigma").get<double>();
  for (const auto& b : j.at("bounds"))
    env.bounds.push_back({b.at("l").get<double>(), b.at("h").get<double>(),
                          b.at("eps").get<double>()});
  return env;
}

inline causalbounds::CbEnvironment contexts_env() {
  const nlohmann::json j = causalbounds::builtin_instance("cb_contexts");
  causalbounds::CbEnvironment env;
  causalbounds::LinearFunctionClass& f = env.fclass;
  f.d = j.at("d").get<int>();
  const auto& feats = j.at("features");
  const int n_w = static_cast<int>(feats.size());
  const int n_a = static_cast<int>(feats.at(0).size());
  f.features.resize(n_w);
  f.lower.resize(n_w, n_a);
  f.upper.resize(n_w, n_a);
  for (int w = 0; w < n_w; ++w) {
    f.features[w].resize(n_a);
    for (int a = 0; a < n_a; ++a) {
      const auto phi = feats.at(w).at(a).get<std::vector<double>>();
      f.features[w][a] =
          Eigen::Map<const Eigen::VectorXd>(phi.data(), f.d);
      f.lower(w, a) = j.at("lower").at(w).at(a).get<double>();
      f.upper(w, a) = j.at("upper").at(w).at(a).get<double>();
    }
  }
  env.sigma = j.at("sigma").get<double>();
  return env;
}

// random feasible marginal pair on an (n, n, n, n) grid
inline void random_marginals(int n, std::uint64_t seed, Eigen::VectorXd& ayw,
                             Eigen::VectorXd& u) {
  const long cells = static_cast<long>(n) * n * n * n;
  causalbounds::CounterRng rng(seed);
  Eigen::VectorXd joint(cells);
  for (long c = 0; c < cells; ++c) joint[c] = 0.2 + 0.8 * rng.next_double();
  joint /= joint.sum();
  ayw = Eigen::VectorXd::Zero(cells / n);
  u = Eigen::VectorXd::Zero(n);
  for (long s = 0; s < cells / n; ++s)
    for (int l = 0; l < n; ++l) {
      ayw[s] += joint[s * n + l];
      u[l] += joint[s * n + l];
    }
}

inline causalbounds::GridSpec cube_grid(int n) {
  return causalbounds::GridSpec{n, n, n, n,
                                Eigen::VectorXd::LinSpaced(n, 0.0, 1.0)};
}

}  // namespace testutil
