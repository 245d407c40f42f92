#include "causalbounds/mab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "causalbounds/errors.hpp"
#include "parallel.hpp"

namespace causalbounds {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_bounds(const ArmBoundSet& bounds) {
  if (bounds.empty()) throw config_error("empty arm bound set");
  for (const auto& b : bounds) {
    if (!(b.l <= b.h)) throw config_error("arm bound has l > h");
    if (b.eps < 0.0) throw config_error("arm bound has negative eps");
  }
}

double best_lower(const ArmBoundSet& bounds, bool noisy) {
  double best = -kInf;
  for (const auto& b : bounds) best = std::max(best, noisy ? b.l - b.eps : b.l);
  return best;
}

}  // namespace

std::vector<int> prune_arms(const ArmBoundSet& bounds) {
  check_bounds(bounds);
  const double threshold = best_lower(bounds, false);
  std::vector<int> active;
  for (int a = 0; a < static_cast<int>(bounds.size()); ++a)
    if (bounds[a].h >= threshold) active.push_back(a);
  return active;
}

std::vector<int> prune_arms_noisy(const ArmBoundSet& bounds) {
  check_bounds(bounds);
  const double threshold = best_lower(bounds, true);
  std::vector<int> active;
  for (int a = 0; a < static_cast<int>(bounds.size()); ++a)
    if (!(bounds[a].h + bounds[a].eps < threshold)) active.push_back(a);
  return active;
}

double max_variance(double l, double h) {
  if (!(0.0 <= l && l <= h && h <= 1.0))
    throw config_error("max_variance requires 0 <= l <= h <= 1");
  if (l <= 0.5 && 0.5 <= h) return 0.25;
  const double m = (h < 0.5) ? h : l;
  return m * (1.0 - m);
}

std::vector<double> sample_complexity(const ArmBoundSet& bounds,
                                      double mu_star) {
  check_bounds(bounds);
  std::vector<double> out(bounds.size());
  for (std::size_t a = 0; a < bounds.size(); ++a) {
    const double gap = std::max(0.0, mu_star - bounds[a].h);
    if (bounds[a].eps > 0.0) {
      out[a] = gap * gap / (bounds[a].eps * bounds[a].eps);
    } else {
      out[a] = (gap > 0.0) ? kInf : 0.0;
    }
  }
  return out;
}

int truncated_ucb_step(const MabState& state, const ArmBoundSet& bounds,
                       double delta) {
  check_bounds(bounds);
  if (state.active.empty()) throw config_error("active arm set is empty");
  const double log_term = std::log(2.0 * static_cast<double>(state.t) / delta);
  int best = -1;
  double best_index = -kInf;
  for (int a : state.active) {
    const auto& b = bounds[a];
    double u;
    if (state.pulls[a] == 0) {
      u = std::min(1.0, b.h);
    } else {
      const double sigma2 = max_variance(b.l, b.h);
      const double width =
          std::sqrt(2.0 * sigma2 * log_term / static_cast<double>(state.pulls[a]));
      u = std::min({1.0, state.means[a] + width, b.h});
    }
    if (u > best_index) {
      best_index = u;
      best = a;
    }
  }
  return best;
}

std::vector<WarmStartIndex> warm_start_indices(const MabState& state,
                                               const ArmBoundSet& bounds,
                                               double delta) {
  check_bounds(bounds);
  const double log_term = std::log(2.0 * static_cast<double>(state.t) / delta);
  std::vector<WarmStartIndex> out(bounds.size());
  for (std::size_t a = 0; a < bounds.size(); ++a) {
    const auto& b = bounds[a];
    const double n = static_cast<double>(state.pulls[a]);
    const double mean = state.means[a];
    // Variance cap over the eps-inflated interval; mu(1-mu) <= 0 outside
    // [0,1], so clamping never changes the maximum.
    const double sigma2 = max_variance(std::max(0.0, b.l - b.eps),
                                       std::min(1.0, b.h + b.eps));
    double u = (n > 0.0) ? mean + std::sqrt(2.0 * sigma2 * log_term / n) : kInf;
    double u_eps;
    if (b.eps > 0.0) {
      const double weight = 1.0 / (b.eps * b.eps);
      const double blended = (n * mean + weight * b.h) / (n + weight);
      u_eps = blended + std::sqrt((2.0 * sigma2 * log_term + 1.0) / (n + weight));
    } else {
      u_eps = b.h;
    }
    out[a] = {u, u_eps};
  }
  return out;
}

int noisy_bounds_step(const MabState& state, const ArmBoundSet& bounds,
                      double delta) {
  if (state.active.empty()) throw config_error("active arm set is empty");
  const auto idx = warm_start_indices(state, bounds, delta);
  int best = -1;
  double best_index = -kInf;
  for (int a : state.active) {
    const double v = std::min(idx[a].u, idx[a].u_eps);
    if (v > best_index) {
      best_index = v;
      best = a;
    }
  }
  return best;
}

MabAlgorithm parse_mab_algorithm(const std::string& name) {
  if (name == "plain_ucb") return MabAlgorithm::plain_ucb;
  if (name == "alg3") return MabAlgorithm::alg3;
  if (name == "alg4") return MabAlgorithm::alg4;
  throw config_error("unknown MAB algorithm: " + name);
}

std::string mab_algorithm_name(MabAlgorithm a) {
  switch (a) {
    case MabAlgorithm::plain_ucb: return "plain_ucb";
    case MabAlgorithm::alg3: return "alg3";
    case MabAlgorithm::alg4: return "alg4";
  }
  throw config_error("unknown MAB algorithm value");
}

MabTrialResult run_mab_trial(const MabEnvironment& env, MabAlgorithm algorithm,
                             long horizon, double delta, std::uint64_t seed,
                             long trial, const WarmStart* warm) {
  const int n_arms = static_cast<int>(env.means.size());
  if (n_arms == 0) throw config_error("environment has no arms");
  if (static_cast<int>(env.bounds.size()) != n_arms)
    throw config_error("bound set size does not match arm count");
  if (horizon < 1) throw config_error("horizon must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw config_error("delta must be in (0, 1)");

  ArmBoundSet bounds = env.bounds;
  if (algorithm == MabAlgorithm::plain_ucb)
    bounds.assign(n_arms, ArmBound{0.0, 1.0, 0.0});

  MabState state(n_arms);
  state.active = (algorithm == MabAlgorithm::alg4) ? prune_arms_noisy(bounds)
                                                   : prune_arms(bounds);
  if (warm != nullptr) {
    if (static_cast<int>(warm->prior_means.size()) != n_arms ||
        static_cast<int>(warm->prior_counts.size()) != n_arms)
      throw config_error("warm start size does not match arm count");
    for (int a = 0; a < n_arms; ++a) {
      if (warm->prior_counts[a] < 0)
        throw config_error("negative warm start count");
      if (warm->prior_counts[a] > 0) {
        state.pulls[a] = warm->prior_counts[a];
        state.means[a] = warm->prior_means[a];
      }
    }
  }

  const double mu_star = *std::max_element(env.means.begin(), env.means.end());
  CounterRng rng(derive_stream(seed, static_cast<std::uint64_t>(trial)));

  MabTrialResult result;
  result.regret.reserve(horizon);
  double cum_regret = 0.0;
  for (long t = 0; t < horizon; ++t) {
    const int arm = (algorithm == MabAlgorithm::alg4)
                        ? noisy_bounds_step(state, bounds, delta)
                        : truncated_ucb_step(state, bounds, delta);
    // One noise draw per round regardless of the arm, so paired trials of
    // different algorithms consume identical streams.
    const double reward = env.means[arm] + env.sigma * rng.gaussian();
    state.record(arm, reward);
    ++state.t;
    cum_regret += mu_star - env.means[arm];
    result.regret.push_back(cum_regret);
  }
  result.pulls = state.pulls;
  return result;
}

MabRunResult run_mab(const MabEnvironment& env, MabAlgorithm algorithm,
                     long horizon, int trials, double delta,
                     std::uint64_t seed, int threads, const WarmStart* warm) {
  if (trials < 1) throw config_error("trials must be >= 1");
  const int n_arms = static_cast<int>(env.means.size());

  MabRunResult out;
  out.trials.resize(trials);
  detail::parallel_for(trials, threads, [&](int trial) {
    out.trials[trial] =
        run_mab_trial(env, algorithm, horizon, delta, seed, trial, warm);
  });

  Eigen::MatrixXd pulls(trials, n_arms);
  Eigen::VectorXd finals(trials);
  for (int i = 0; i < trials; ++i) {
    for (int a = 0; a < n_arms; ++a)
      pulls(i, a) = static_cast<double>(out.trials[i].pulls[a]);
    finals[i] = out.trials[i].regret.back();
  }
  out.mean_pulls = pulls.colwise().mean().transpose();
  out.mean_regret = finals.mean();
  const double denom = (trials > 1) ? trials - 1.0 : 1.0;
  out.sd_pulls = ((pulls.rowwise() - out.mean_pulls.transpose())
                      .colwise()
                      .squaredNorm() /
                  denom)
                     .cwiseSqrt()
                     .transpose();
  out.sd_regret =
      std::sqrt((finals.array() - out.mean_regret).square().sum() / denom);
  return out;
}

}  // namespace causalbounds
