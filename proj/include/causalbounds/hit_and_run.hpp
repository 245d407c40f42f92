#pragma once

#include <Eigen/Dense>

#include "causalbounds/polytope.hpp"
#include "causalbounds/rng.hpp"

namespace causalbounds {

// n x (n-1) orthonormal basis of the hyperplane { x : sum x_i = 0 }:
// column j has 1/sqrt((j+1)(j+2)) in rows 0..j and -(j+1)/sqrt((j+1)(j+2))
// in row j+1.
Eigen::MatrixXd helmert_basis(int n);

// Orthonormal kernel basis of the marginal equality system on a grid:
// kron(helmert(n_ayw), helmert(n_u)), dimension (n_ayw - 1)(n_u - 1).
Eigen::MatrixXd marginal_null_basis(const GridSpec& grid);

// Orthonormal basis Q of ker(effective equality rows); Kronecker fast path for
// exact marginal systems, rank-revealing SVD otherwise. Throws when the kernel
// is empty.
Eigen::MatrixXd null_basis(const ConstraintPolytope& poly);

// Isotropic direction in the kernel: Q z with z standard normal, so
// E[d d'] = Q Q'.
Eigen::VectorXd sample_direction(const Eigen::MatrixXd& basis, CounterRng& rng);

struct StepRange {
  double lo = 0.0;
  double hi = 0.0;
};

// Feasible step interval { t : p + t d stays in the polytope }, from the floor
// cells and the effective inequality rows; clipped to |t| <= 1e6 / ||d||.
// Requires a feasible p (so lo <= 0 <= hi) and ||d|| >= 1e-12.
StepRange step_range(const Eigen::VectorXd& p, const Eigen::VectorXd& d,
                     const ConstraintPolytope& poly);

struct ChainOptions {
  long burn_in = -1;  // -1: 10 * kernel dimension
  long thin = 1;
  std::uint64_t seed = 0;
};

struct ChainState {
  Eigen::VectorXd p;
  Eigen::VectorXd ineq_values;  // <row_j, p> for the effective inequality rows
  CounterRng rng;
  long steps_done = 0;
};

// Per-constraint dot products are updated incrementally each step and
// recomputed (and drift-checked against 1e-9) every 1000 steps.
class HitAndRunChain {
 public:
  HitAndRunChain(const ConstraintPolytope& poly, const Eigen::VectorXd& start,
                 std::uint64_t seed);

  void step();
  const Eigen::VectorXd& current() const { return state_.p; }
  long steps_done() const { return state_.steps_done; }
  int kernel_dim() const { return static_cast<int>(basis_.cols()); }
  const Eigen::MatrixXd& basis() const { return basis_; }

 private:
  const ConstraintPolytope& poly_;
  EffectiveSystem system_;
  Eigen::MatrixXd basis_;
  ChainState state_;
};

// Runs one chain and returns `samples` retained states (rows), after burn-in,
// keeping every `thin`-th state. The start must be feasible at 1e-9.
Eigen::MatrixXd run_chain(const ConstraintPolytope& poly,
                          const Eigen::VectorXd& start, long samples,
                          const ChainOptions& opts);

}  // namespace causalbounds
