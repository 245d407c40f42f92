#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "causalbounds/effects.hpp"
#include "causalbounds/hit_and_run.hpp"
#include "causalbounds/polytope.hpp"

namespace causalbounds {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct CausalBounds {
  double l = 0.0;
  double h = 0.0;
  double err = 0.0;        // certified endpoint drift for relaxed sets
  long samples = 0;        // chain samples consumed
  double wall_ms = 0.0;
  std::string provenance;  // "sampling", "sampling+oracle", "frechet_baseline"
};

struct OptimizeOptions {
  int max_iters = 400;
  double tol = 1e-8;          // projected-gradient norm target
  double fd_step = 1e-6;      // relative central-difference step
  double active_tol = 1e-9;   // distance at which a constraint counts as active
};

struct OptimizeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iters = 0;
  bool converged = false;
};

// Local ascent (maximize=true) or descent of a smooth objective over the
// polytope. Gradients are central differences; each step projects the
// gradient onto the kernel of the equality rows plus the active floor and
// inequality rows, releases actives whose multiplier has the wrong sign, and
// backtracks along the feasible segment. For linear objectives this terminates
// at an optimal face.
OptimizeResult local_optimize(const ConstraintPolytope& poly,
                              const Objective& objective,
                              const Eigen::VectorXd& start, bool maximize,
                              const OptimizeOptions& opts = {});

struct BoundRunOptions {
  long steps = 2000;        // chain samples
  int restarts = 50;        // oracle starts (0 = sampling only)
  std::uint64_t seed = 0;
  int threads = 1;
  long burn_in = -1;        // -1: 10 * kernel dimension
  OptimizeOptions optimize;
};

// Envelope of the objective over chain samples only.
CausalBounds bounds_by_sampling(const ConstraintPolytope& poly,
                                const Objective& objective,
                                const Eigen::VectorXd& start,
                                const BoundRunOptions& opts);

// Chain samples plus local optimization from `restarts` evenly spaced sampled
// states, both senses; the envelope over every value seen. Shares the chain
// stream with bounds_by_sampling, so its interval contains the sampling-only
// interval for the same options.
CausalBounds bounds_accelerated(const ConstraintPolytope& poly,
                                const Objective& objective,
                                const Eigen::VectorXd& start,
                                const BoundRunOptions& opts);

// Marginal-only baseline: optimizes the same interventional quantity over the
// region that keeps each stratum block tied only to its own marginals and
// Fréchet boxes (no global joint consistency), so its bounds contain the
// polytope bounds. Supported for mean_do_a and prob_do_a queries.
CausalBounds frechet_only_bounds(const GridSpec& grid,
                                 const Eigen::VectorXd& marginal_ayw,
                                 const Eigen::VectorXd& marginal_u,
                                 const EffectQuery& query,
                                 const BoundRunOptions& opts);

}  // namespace causalbounds
