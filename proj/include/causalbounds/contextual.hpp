#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "causalbounds/rng.hpp"

namespace causalbounds {

// Linear reward class { (a,w) -> theta' phi(a,w) : ||theta||_inf <= 1 } with
// optional causal boxes l(a,w) <= theta' phi(a,w) <= h(a,w). Empty bound
// tables describe the unpruned class (box constraint only).
struct LinearFunctionClass {
  int d = 0;
  // features[w][a], each a d-vector
  std::vector<std::vector<Eigen::VectorXd>> features;
  Eigen::MatrixXd lower;  // contexts x arms; 0 x 0 when unpruned
  Eigen::MatrixXd upper;

  int n_contexts() const { return static_cast<int>(features.size()); }
  int n_arms() const {
    return features.empty() ? 0 : static_cast<int>(features[0].size());
  }
  bool pruned() const { return lower.size() > 0; }
};

// {a : h(a,w) >= max_i l(i,w)}.
std::vector<int> candidate_actions_box(const Eigen::MatrixXd& lower,
                                       const Eigen::MatrixXd& upper, int w);

// Arms that are greedy for some feasible theta: per arm, maximize s subject to
// theta' phi(a,w) >= theta' phi(i,w) + s for all i != a, the causal boxes of
// every arm at context w, and the parameter box; a is kept iff s* >= -1e-9.
std::vector<int> candidate_actions_linear(const LinearFunctionClass& fclass,
                                          int w);

bool theta_feasible(const LinearFunctionClass& fclass,
                    const Eigen::VectorXd& theta, double tol = 1e-9);

// Any feasible parameter (Phase-1 LP maximizing the minimum constraint
// margin). Throws numeric_error when the class is empty.
Eigen::VectorXd feasible_theta(const LinearFunctionClass& fclass);

// Euclidean diameter of the feasible parameter set: exact for d = 2 (vertex
// enumeration of the polygon), per-coordinate width norm upper bound
// otherwise. The unpruned box gives 2*sqrt(d) either way.
double parameter_diameter(const LinearFunctionClass& fclass);

// log covering-number proxy for the class at resolution 1/T: d*log(3*T*diam).
double covering_proxy(double diam, int d, long horizon);

// Denominator of the exploration rate: log(2/delta) + logF + log(log T).
double exploration_log_term(double delta, double log_f, long horizon);

// Epoch 1 returns 1; later epochs sqrt(eta * action_count * tau_prev /
// log_term). Throws config_error for eta <= 0.
double exploration_rate(int epoch, int action_count, double tau_prev,
                        double eta, double log_term);

// Inverse-gap weights over a candidate set: the greedy arm (max value, lowest
// index on ties) receives the residual mass, every other arm
// 1 / (|set| + gamma * gap). Entries are nonnegative and sum to 1.
Eigen::VectorXd igw_distribution(const Eigen::VectorXd& values, double gamma);

// Least squares over the function class: minimizes sum (theta' phi_t - y_t)^2
// subject to the box and causal rows, by projected gradient (Dykstra
// projection onto the constraint intersection) run to projected-gradient norm
// < 1e-8. Empty history returns feasible_theta.
Eigen::VectorXd constrained_least_squares(const Eigen::MatrixXd& gram,
                                          const Eigen::VectorXd& moment,
                                          long count,
                                          const LinearFunctionClass& fclass);

struct CbObservation {
  int arm = 0;
  int context = 0;
  double reward = 0.0;
};

Eigen::VectorXd constrained_least_squares(
    const std::vector<CbObservation>& history,
    const LinearFunctionClass& fclass);

struct CbEnvironment {
  LinearFunctionClass fclass;  // pruned class (features + causal boxes)
  double sigma = 0.1;          // reward noise SD
};

enum class CbMode { lp, box, full };
CbMode parse_cb_mode(const std::string& name);
std::string cb_mode_name(CbMode mode, bool prune_function_class);

struct CbTrialResult {
  std::vector<double> regret;  // cumulative, one entry per round
};

// Rejection-samples a ground-truth parameter from the causal box (uniform
// proposals over the parameter box, at most 1e5 tries).
Eigen::VectorXd sample_ground_truth(const LinearFunctionClass& fclass,
                                    CounterRng& rng);

// One trial of the epoch-schedule inverse-gap-weighting learner against the
// fixed ground truth theta_star. Context and noise streams depend only on
// (seed, trial) so runs with different modes are paired.
// prune_function_class=false runs the unpruned-class baseline (full action
// sets must be used with it).
CbTrialResult run_contextual_trial(const CbEnvironment& env,
                                   const Eigen::VectorXd& theta_star,
                                   CbMode mode, bool prune_function_class,
                                   long horizon, double delta, double eta,
                                   std::uint64_t seed, long trial);

struct CbRunResult {
  Eigen::VectorXd theta_star;        // ground truth shared by all trials
  std::vector<double> final_regret;  // per trial
  std::vector<CbTrialResult> trials;
  double mean = 0.0, sd = 0.0, median = 0.0, min = 0.0, max = 0.0;
};

// Draws theta* once from the seed, then runs `trials` independent trials
// against it (fresh context/noise/policy streams per trial).
CbRunResult run_contextual(const CbEnvironment& env, CbMode mode,
                           bool prune_function_class, long horizon, int trials,
                           double delta, double eta, std::uint64_t seed,
                           int threads = 1, bool keep_trajectories = false);

}  // namespace causalbounds
