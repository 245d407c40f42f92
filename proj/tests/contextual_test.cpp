#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "causalbounds/contextual.hpp"
#include "causalbounds/errors.hpp"
#include "causalbounds/rng.hpp"
#include "helpers.hpp"

using namespace causalbounds;

namespace {

int greedy_arm(const LinearFunctionClass& f, const Eigen::VectorXd& theta,
               int w) {
  int best = 0;
  double best_v = theta.dot(f.features[w][0]);
  for (int a = 1; a < f.n_arms(); ++a) {
    const double v = theta.dot(f.features[w][a]);
    if (v > best_v) {
      best_v = v;
      best = a;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("candidate sets per context match the hand-derived tables") {
  const CbEnvironment env = testutil::contexts_env();
  const LinearFunctionClass& f = env.fclass;
  REQUIRE(f.n_contexts() == 11);
  REQUIRE(f.n_arms() == 5);
  using V = std::vector<int>;
  const std::vector<V> box_sets = {
      {2, 4}, {0, 1, 3}, {0, 1, 4}, {0, 1}, {2},       {0, 1, 3, 4},
      {4},    {0, 1, 2}, {0, 1, 3}, {0, 1, 2, 3, 4},   {0, 1, 2, 3, 4}};
  const std::vector<V> lp_sets = {
      {2, 4}, {3}, {0, 1}, {0, 1}, {2},       {3},
      {4},    {0, 2}, {0, 1, 3}, {0, 1, 2, 3, 4},   {3, 4}};
  double lp_total = 0.0;
  for (int w = 0; w < 11; ++w) {
    CHECK(candidate_actions_box(f.lower, f.upper, w) == box_sets[w]);
    const V lp = candidate_actions_linear(f, w);
    CHECK(lp == lp_sets[w]);
    lp_total += static_cast<double>(lp.size());
    // the sharper set is a subset of the box set
    for (int a : lp)
      CHECK(std::find(box_sets[w].begin(), box_sets[w].end(), a) !=
            box_sets[w].end());
  }
  CHECK(lp_total / 11.0 == 2.0);
}

TEST_CASE("parameter feasibility and diameter") {
  const CbEnvironment env = testutil::contexts_env();
  const LinearFunctionClass& f = env.fclass;
  for (auto [x, y] : {std::pair{0.85, 0.8}, {0.9, 0.8}, {0.85, 0.85}})
    CHECK(theta_feasible(f, (Eigen::VectorXd(2) << x, y).finished()));
  for (auto [x, y] : {std::pair{0.91, 0.8}, {0.85, 0.86}, {0.88, 0.83}})
    CHECK_FALSE(theta_feasible(f, (Eigen::VectorXd(2) << x, y).finished()));
  CHECK(parameter_diameter(f) ==
        doctest::Approx(std::sqrt(2.0) / 20.0).epsilon(1e-9));
  LinearFunctionClass unpruned = f;
  unpruned.lower.resize(0, 0);
  unpruned.upper.resize(0, 0);
  CHECK(parameter_diameter(unpruned) ==
        doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
  const Eigen::VectorXd any = feasible_theta(f);
  CHECK(theta_feasible(f, any));
}

TEST_CASE("exploration schedule constants") {
  const CbEnvironment env = testutil::contexts_env();
  const long horizon = 10000;
  const double pruned_diam = parameter_diameter(env.fclass);
  LinearFunctionClass unpruned = env.fclass;
  unpruned.lower.resize(0, 0);
  unpruned.upper.resize(0, 0);
  const double log_pruned =
      exploration_log_term(0.1, covering_proxy(pruned_diam, 2, horizon), horizon);
  const double log_unpruned = exploration_log_term(
      0.1, covering_proxy(parameter_diameter(unpruned), 2, horizon), horizon);
  CHECK(log_pruned == doctest::Approx(20.536).epsilon(1e-3));
  CHECK(log_unpruned == doctest::Approx(27.913).epsilon(1e-3));

  CHECK(exploration_rate(1, 5, 1.0, 1.0, 8.0) == 1.0);
  CHECK(exploration_rate(7, 2, 64.0, 1.0, 8.0) == doctest::Approx(4.0));
  CHECK_THROWS_AS(exploration_rate(2, 2, 64.0, 0.0, 8.0), config_error);
  CHECK_THROWS_AS(exploration_rate(2, 2, 0.0, 1.0, 8.0), config_error);
}

TEST_CASE("inverse-gap weights form a proper distribution") {
  // hand example: two arms, gap 0.2, gamma 4
  const Eigen::VectorXd v2 = (Eigen::VectorXd(2) << 0.5, 0.3).finished();
  const Eigen::VectorXd p2 = igw_distribution(v2, 4.0);
  CHECK(p2[1] == doctest::Approx(1.0 / 2.8).epsilon(1e-12));
  CHECK(p2[0] == doctest::Approx(1.0 - 1.0 / 2.8).epsilon(1e-12));
  // property sweep
  CounterRng rng(4040);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 2 + static_cast<int>(rng.next_below(4));
    Eigen::VectorXd v = Eigen::VectorXd::NullaryExpr(
        k, [&](Eigen::Index) { return rng.next_double(); });
    const double gamma = 1.0 + 99.0 * rng.next_double();
    const Eigen::VectorXd p = igw_distribution(v, gamma);
    REQUIRE(p.size() == k);
    CHECK(p.minCoeff() >= 0.0);
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
    int greedy = 0;
    v.maxCoeff(&greedy);
    for (int i = 0; i < k; ++i) {
      if (i == greedy) continue;
      CHECK(p[i] == doctest::Approx(1.0 / (k + gamma * (v.maxCoeff() - v[i])))
                        .epsilon(1e-12));
      CHECK(p[i] <= p[greedy] + 1e-12);
    }
  }
}

TEST_CASE("any feasible parameter plays inside the sharper candidate set") {
  const CbEnvironment env = testutil::contexts_env();
  const LinearFunctionClass& f = env.fclass;
  std::vector<std::vector<int>> lp_sets;
  for (int w = 0; w < f.n_contexts(); ++w)
    lp_sets.push_back(candidate_actions_linear(f, w));
  CounterRng rng(606);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::VectorXd theta = sample_ground_truth(f, rng);
    REQUIRE(theta_feasible(f, theta));
    const int w = static_cast<int>(rng.next_below(f.n_contexts()));
    const int a = greedy_arm(f, theta, w);
    CHECK(std::find(lp_sets[w].begin(), lp_sets[w].end(), a) !=
          lp_sets[w].end());
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("ground-truth draws are deterministic and respect the class") {
  const CbEnvironment env = testutil::contexts_env();
  CounterRng a(11), b(11);
  const Eigen::VectorXd ta = sample_ground_truth(env.fclass, a);
  const Eigen::VectorXd tb = sample_ground_truth(env.fclass, b);
  CHECK(ta == tb);
  // impossible boxes exhaust the proposal budget
  LinearFunctionClass broken = env.fclass;
  broken.lower.setConstant(0.99);
  broken.upper.setConstant(1.0);
  CounterRng c(1);
  CHECK_THROWS_AS(sample_ground_truth(broken, c), numeric_error);
}

TEST_CASE("constrained least squares matches the normal equations inside the box") {
  const CbEnvironment env = testutil::contexts_env();
  LinearFunctionClass unpruned = env.fclass;
  unpruned.lower.resize(0, 0);
  unpruned.upper.resize(0, 0);
  const Eigen::VectorXd truth = (Eigen::VectorXd(2) << 0.4, -0.3).finished();
  CounterRng rng(2121);
  std::vector<CbObservation> history;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(2, 2);
  Eigen::VectorXd moment = Eigen::VectorXd::Zero(2);
  for (int t = 0; t < 400; ++t) {
    CbObservation ob;
    ob.context = static_cast<int>(rng.next_below(11));
    ob.arm = static_cast<int>(rng.next_below(5));
    const Eigen::VectorXd& phi = unpruned.features[ob.context][ob.arm];
    ob.reward = truth.dot(phi) + 0.05 * rng.gaussian();
    history.push_back(ob);
    gram += phi * phi.transpose();
    moment += phi * ob.reward;
  }
  const Eigen::VectorXd ne = gram.ldlt().solve(moment);
  REQUIRE(ne.cwiseAbs().maxCoeff() < 1.0);  // interior: box inactive
  const Eigen::VectorXd fit = constrained_least_squares(history, unpruned);
  CHECK((fit - ne).cwiseAbs().maxCoeff() < 1e-6);
  // gram form agrees with the history form
  const Eigen::VectorXd fit2 =
      constrained_least_squares(gram, moment, 400, unpruned);
  CHECK((fit2 - fit).cwiseAbs().maxCoeff() < 1e-8);
  // empty history returns some feasible parameter
  const Eigen::VectorXd cold = constrained_least_squares({}, unpruned);
  CHECK(theta_feasible(unpruned, cold));
}

TEST_CASE("constrained least squares lands on the feasible optimum") {
  const CbEnvironment env = testutil::contexts_env();
  const LinearFunctionClass& f = env.fclass;
  // data generated far outside the causal class pulls the fit to the boundary
  const Eigen::VectorXd truth = (Eigen::VectorXd(2) << 0.2, 0.1).finished();
  CounterRng rng(33);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(2, 2);
  Eigen::VectorXd moment = Eigen::VectorXd::Zero(2);
  for (int t = 0; t < 200; ++t) {
    const int w = static_cast<int>(rng.next_below(11));
    const int a = static_cast<int>(rng.next_below(5));
    const Eigen::VectorXd& phi = f.features[w][a];
    gram += phi * phi.transpose();
    moment += phi * (truth.dot(phi) + 0.05 * rng.gaussian());
  }
  const Eigen::VectorXd fit = constrained_least_squares(gram, moment, 200, f);
  CHECK(theta_feasible(f, fit, 1e-6));
  auto loss = [&](const Eigen::VectorXd& th) {
    return th.dot(gram * th) - 2.0 * moment.dot(th);
  };
  // no feasible point does better
  CounterRng probe(44);
  for (int i = 0; i < 200; ++i) {
    const Eigen::VectorXd other = sample_ground_truth(f, probe);
    CHECK(loss(fit) <= loss(other) + 1e-6);
  }
}

TEST_CASE("mode names round-trip and the unpruned run is labeled") {
  for (const char* name : {"lp", "box", "full"})
    CHECK(cb_mode_name(parse_cb_mode(name), true) == name);
  CHECK(cb_mode_name(CbMode::full, false) == "falcon");
  CHECK_THROWS_AS(parse_cb_mode("greedy"), config_error);
}

TEST_CASE("trials are paired across modes and deterministic") {
  const CbEnvironment env = testutil::contexts_env();
  CounterRng rng(500);
  const Eigen::VectorXd theta = sample_ground_truth(env.fclass, rng);
  const CbTrialResult a =
      run_contextual_trial(env, theta, CbMode::lp, true, 300, 0.1, 1.0, 3, 0);
  const CbTrialResult b =
      run_contextual_trial(env, theta, CbMode::lp, true, 300, 0.1, 1.0, 3, 0);
  CHECK(a.regret == b.regret);
  REQUIRE(a.regret.size() == 300);
  for (std::size_t t = 1; t < a.regret.size(); ++t)
    CHECK(a.regret[t] >= a.regret[t - 1] - 1e-12);
  // unpruned baseline refuses restricted action sets
  CHECK_THROWS_AS(
      run_contextual_trial(env, theta, CbMode::lp, false, 300, 0.1, 1.0, 3, 0),
      config_error);
}

TEST_CASE("run summary statistics agree with the per-trial tails") {
  const CbEnvironment env = testutil::contexts_env();
  const CbRunResult r =
      run_contextual(env, CbMode::lp, true, 400, 6, 0.1, 1.0, 17, 3, true);
  REQUIRE(r.final_regret.size() == 6);
  REQUIRE(r.trials.size() == 6);
  for (int i = 0; i < 6; ++i)
    CHECK(r.trials[i].regret.back() == r.final_regret[i]);
  std::vector<double> sorted = r.final_regret;
  std::sort(sorted.begin(), sorted.end());
  CHECK(r.min == sorted.front());
  CHECK(r.max == sorted.back());
  double mean = 0.0;
  for (double v : r.final_regret) mean += v;
  mean /= 6.0;
  CHECK(r.mean == doctest::Approx(mean).epsilon(1e-12));
  // same seed, different mode: identical ground truth
  const CbRunResult r2 =
      run_contextual(env, CbMode::box, true, 400, 6, 0.1, 1.0, 17, 3, false);
  CHECK(r2.theta_star == r.theta_star);
  CHECK(r2.trials.empty());
}

TEST_CASE("sharper action sets dominate at a shared seed") {
  const CbEnvironment env = testutil::contexts_env();
  const long horizon = 2000;
  const int trials = 8;
  const CbRunResult lp =
      run_contextual(env, CbMode::lp, true, horizon, trials, 0.1, 1.0, 123, 4);
  const CbRunResult box =
      run_contextual(env, CbMode::box, true, horizon, trials, 0.1, 1.0, 123, 4);
  const CbRunResult full =
      run_contextual(env, CbMode::full, true, horizon, trials, 0.1, 1.0, 123, 4);
  const CbRunResult falcon = run_contextual(env, CbMode::full, false, horizon,
                                            trials, 0.1, 1.0, 123, 4);
  CHECK(lp.mean < box.mean);
  CHECK(box.mean < full.mean);
  CHECK(full.mean < falcon.mean);
}
