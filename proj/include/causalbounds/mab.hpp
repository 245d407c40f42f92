#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "causalbounds/rng.hpp"

namespace causalbounds {

// Per-arm causal interval [l, h] with estimation error eps (0 = exact).
struct ArmBound {
  double l = 0.0;
  double h = 1.0;
  double eps = 0.0;
};

using ArmBoundSet = std::vector<ArmBound>;

struct MabState {
  std::vector<long> pulls;
  std::vector<double> means;
  long t = 1;
  std::vector<int> active;

  explicit MabState(int n_arms)
      : pulls(n_arms, 0), means(n_arms, 0.0), active() {}
  void record(int arm, double reward) {
    ++pulls[arm];
    means[arm] += (reward - means[arm]) / static_cast<double>(pulls[arm]);
  }
};

// Arms whose upper bound reaches the best lower bound: {a : h(a) >= max_i l(i)}.
// Never empty.
std::vector<int> prune_arms(const ArmBoundSet& bounds);

// Noisy-bound pruning: removes a iff h(a) + eps_a < max_i (l(i) - eps_i).
std::vector<int> prune_arms_noisy(const ArmBoundSet& bounds);

// max of m(1-m) over [l, h] within [0,1]: 0.25 when 0.5 is inside, else the
// value at the endpoint nearest 0.5. Throws config_error outside [0,1].
double max_variance(double l, double h);

// Exploration discount of an informative upper bound:
// H_a = eps_a^-2 * max(0, mu_star - h(a))^2.
std::vector<double> sample_complexity(const ArmBoundSet& bounds,
                                      double mu_star);

// Truncated-UCB selection over the pruned set: index min{U_a, h(a)} with
// U_a = min{1, mean + sqrt(2 sigma_a^2 log(2t/delta) / n_a)}, per-arm variance
// cap from max_variance(l,h), unpulled arms at min{1, h(a)}; lowest index wins
// ties. Plain UCB is this policy with trivial bounds [0,1].
int truncated_ucb_step(const MabState& state, const ArmBoundSet& bounds,
                       double delta);

// Warm-start indices (U_a, U^eps_a) for the noisy-bound policy: U_a is the
// conventional UCB with variance capped over the eps-inflated interval
// (infinite at n=0); U^eps_a blends the empirical mean with h(a) weighted by
// eps^-2 pseudo-pulls and widens by sqrt((2 sigma^2 log(2t/delta) + 1) /
// (n + eps^-2)). eps = 0 is treated as exact: U^eps_a = h(a).
struct WarmStartIndex {
  double u = 0.0;
  double u_eps = 0.0;
};
std::vector<WarmStartIndex> warm_start_indices(const MabState& state,
                                               const ArmBoundSet& bounds,
                                               double delta);

// Noisy-bound selection: argmax over the active set of min(U_a, U^eps_a).
int noisy_bounds_step(const MabState& state, const ArmBoundSet& bounds,
                      double delta);

struct MabEnvironment {
  std::vector<double> means;  // true Gaussian means
  double sigma = 0.1;         // reward noise SD (rewards are not clipped)
  ArmBoundSet bounds;         // causal intervals (+eps for the noisy policy)
};

enum class MabAlgorithm { plain_ucb, alg3, alg4 };

MabAlgorithm parse_mab_algorithm(const std::string& name);
std::string mab_algorithm_name(MabAlgorithm a);

// Warm start from offline pseudo-observations (prior mean + count per arm).
struct WarmStart {
  std::vector<double> prior_means;
  std::vector<long> prior_counts;
};

struct MabTrialResult {
  std::vector<long> pulls;
  std::vector<double> regret;  // cumulative pseudo-regret, one entry per round
};

// One trial: the reward noise stream depends only on (seed, trial), so paired
// trials of different algorithms consume identical noise.
MabTrialResult run_mab_trial(const MabEnvironment& env, MabAlgorithm algorithm,
                             long horizon, double delta, std::uint64_t seed,
                             long trial, const WarmStart* warm = nullptr);

struct MabRunResult {
  std::vector<MabTrialResult> trials;
  Eigen::VectorXd mean_pulls, sd_pulls;
  double mean_regret = 0.0, sd_regret = 0.0;
};

MabRunResult run_mab(const MabEnvironment& env, MabAlgorithm algorithm,
                     long horizon, int trials, double delta,
                     std::uint64_t seed, int threads = 1,
                     const WarmStart* warm = nullptr);

}  // namespace causalbounds
