#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "causalbounds/grid.hpp"

namespace causalbounds {

// Linearly constrained density set
//   { p : eq_rows p = eq_targets, ineq_rows p <= ineq_targets, p >= kappa },
// optionally relaxed by a slack eps:
//   |<eq_i, p> - b_i| <= eps and <ineq_j, p> <= c_j + eps.
// Under relaxation the normalization functional (sum of entries = 1) stays
// exact: sampling and optimization treat it as a hard equality because the
// total mass of a density is known, not estimated.
struct ConstraintPolytope {
  Eigen::MatrixXd eq_rows;      // m_eq x n, full row rank
  Eigen::VectorXd eq_targets;   // m_eq
  Eigen::MatrixXd ineq_rows;    // m_ineq x n (may be 0 x n)
  Eigen::VectorXd ineq_targets; // m_ineq
  double kappa = 0.0;           // entrywise floor
  double slack = 0.0;           // relaxation eps (0 = exact)

  // Set when the rows are the (A,Y,W)-marginal / U-marginal system of a grid;
  // enables the Kronecker kernel fast path.
  std::optional<GridSpec> marginal_grid;

  int dim() const { return static_cast<int>(eq_rows.cols()); }
  int eq_count() const { return static_cast<int>(eq_rows.rows()); }
  int ineq_count() const { return static_cast<int>(ineq_rows.rows()); }
};

// Validates shapes, full row rank of eq_rows, kappa >= 0 and kappa*n < 1.
ConstraintPolytope make_polytope(Eigen::MatrixXd eq_rows,
                                 Eigen::VectorXd eq_targets,
                                 Eigen::MatrixXd ineq_rows,
                                 Eigen::VectorXd ineq_targets, double kappa);

// Equality system tying a joint density on `grid` to its (A,Y,W) marginal and
// its U marginal: one row per (i,j,k) summing over u, one row per u summing
// over (i,j,k) with the last u row dropped (it is implied by the others), so
// the system has rank n_a*n_y*n_w + n_u - 1. Marginals must each sum to 1
// within 1e-9 (they are renormalized) and be entrywise nonnegative.
ConstraintPolytope build_marginal_constraints(const GridSpec& grid,
                                              const Eigen::VectorXd& marginal_ayw,
                                              const Eigen::VectorXd& marginal_u,
                                              double kappa);

// Independent-coupling density p_ijkl = marginal_ayw(ijk) * marginal_u(l).
// Always satisfies the marginal equalities; entrywise >= kappa only when the
// products clear the floor.
Eigen::VectorXd product_init(const GridSpec& grid,
                             const Eigen::VectorXd& marginal_ayw,
                             const Eigen::VectorXd& marginal_u);

// True iff every equality holds within tol + slack, every inequality within
// slack + tol, and every entry is >= kappa - tol.
bool check_feasible(const Eigen::VectorXd& p, const ConstraintPolytope& poly,
                    double tol);

// Copy with the slack set to eps (rows untouched). eps >= 0.
ConstraintPolytope relax(const ConstraintPolytope& poly, double eps);

// The rows that stay exact equalities and the one-sided rows that remain,
// after applying the slack. With slack = 0 this is the stored system; with
// slack > 0 every stored equality becomes a +/- slack row pair while the
// normalization row (a detected constant row, or synthesized for marginal
// systems where it is implied by the row span) stays exact.
struct EffectiveSystem {
  Eigen::MatrixXd eq_rows;
  Eigen::VectorXd eq_targets;
  Eigen::MatrixXd ineq_rows;
  Eigen::VectorXd ineq_targets;
};

EffectiveSystem effective_system(const ConstraintPolytope& poly);

// On-disk description of a marginal-constrained polytope (JSON):
// {"grid": {"n_a","n_y","n_w","n_u","y_values"},
//  "marginal_ayw": [...], "marginal_u": [...], "kappa": x, "epsilon": x}
struct PolytopeSpec {
  GridSpec grid;
  Eigen::VectorXd marginal_ayw;
  Eigen::VectorXd marginal_u;
  double kappa = 0.0;
  double epsilon = 0.0;

  ConstraintPolytope build() const;
};

PolytopeSpec parse_polytope_spec(const std::string& json_text);
std::string serialize_polytope_spec(const PolytopeSpec& spec);

}  // namespace causalbounds
