#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "causalbounds/polytope.hpp"
#include "causalbounds/rng.hpp"

namespace causalbounds {

// minimize c'x  s.t.  A_eq x = b_eq, A_ub x <= b_ub, lo <= x <= hi.
// Bounds may be -inf/+inf; every variable must be bounded below or above
// (fully free variables are handled by internal splitting).
struct LinearProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd A_eq;   // may be 0 x n
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd A_ub;   // may be 0 x n
  Eigen::VectorXd b_ub;
  Eigen::VectorXd lo;     // entrywise lower bounds
  Eigen::VectorXd hi;     // entrywise upper bounds

  int n() const { return static_cast<int>(c.size()); }
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
};

// Dense two-phase simplex with Bland's rule. Optimal solutions satisfy
// constraint residuals <= 1e-8 and reduced-cost optimality residuals <= 1e-8.
LpResult solve_lp(const LinearProgram& lp);

// Fréchet interval for a joint cell given its two marginals:
// [max(0, a+b-1), min(a, b)].
std::pair<double, double> frechet_interval(double marginal_a, double marginal_b);

// Reachable interval of variable `index` over the polytope with earlier
// variables pinned: pins is a list of (variable, value). Solved as a min and a
// max LP over the polytope's equality rows, inequality rows, and floor.
std::pair<double, double> variable_support(
    const ConstraintPolytope& poly, int index,
    const std::vector<std::pair<int, double>>& pins);

// Strictly interior feasible point: maximizes the minimum margin above the
// floor subject to all rows. Throws numeric_error when the polytope is empty.
Eigen::VectorXd feasible_point(const ConstraintPolytope& poly);

// One exact draw by sequentially pinning the free cells (each uniform on its
// LP support) and completing the bound cells from the equality system.
// Every output passes check_feasible at 1e-9.
Eigen::VectorXd sequential_lp_sample(const ConstraintPolytope& poly,
                                     CounterRng& rng);

}  // namespace causalbounds
