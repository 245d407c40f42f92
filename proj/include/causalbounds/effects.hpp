#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "causalbounds/grid.hpp"

namespace causalbounds {

enum class EffectKind { mean_do_a, mean_do_a_given_w, prob_do_a };

// {"kind": "mean_do_a"|"mean_do_a_given_w"|"prob_do_a", "a": i, "w": k, "y": j}
// w is required only by mean_do_a_given_w, y only by prob_do_a.
struct EffectQuery {
  EffectKind kind = EffectKind::mean_do_a;
  int a = 0;
  int w = -1;
  int y = -1;
};

EffectQuery parse_effect_query(const std::string& json_text);
std::string serialize_effect_query(const EffectQuery& query);
std::string query_name(const EffectQuery& query);

// Interventional mean E[Y | do(A=a)] of a joint density: confounder strata
// (w,u) weighted by their mass, each contributing its conditional outcome
// mean under action a. Strata with zero mass contribute zero; a zero action
// denominator inside a stratum with positive mass throws numeric_error.
// kappa_floor documents the smallest denominator the caller guarantees.
double effect_do_a(const JointDensity& density, int a, double kappa_floor = 0.0);

// E[Y | do(A=a), W=w]: u strata weighted by p(u|w).
double effect_do_a_given_w(const JointDensity& density, int a, int w,
                           double kappa_floor = 0.0);

// P(Y = y_j | do(A=a)).
double prob_do_a(const JointDensity& density, int a, int y,
                 double kappa_floor = 0.0);

double evaluate_query(const JointDensity& density, const EffectQuery& query,
                      double kappa_floor = 0.0);

// Objective closure over flattened densities for the bound engine.
std::function<double(const Eigen::VectorXd&)> make_objective(
    const GridSpec& grid, const EffectQuery& query, double kappa_floor = 0.0);

// Lipschitz constant of the effect functional in the L2 norm over densities
// with entries in [kappa1, kappa2], counting measure on the grid;
// M = max |y|. prob queries use the mean form with M = 1.
double lipschitz_constant(EffectKind kind, const GridSpec& grid, double kappa1,
                          double kappa2);

// Certified endpoint drift: lipschitz constant of the effect times the
// Hausdorff rate of the relaxed set times the slack.
inline double propagate_error(double l_v, double l_h, double eps) {
  return l_v * l_h * eps;
}

}  // namespace causalbounds
