#include "causalbounds/effects.hpp"

#include <cmath>
#include <json.hpp>

#include "causalbounds/errors.hpp"

namespace causalbounds {

namespace {

// A denominator this far below the caller's guarantee means the input broke
// the contract, not roundoff.
bool denominator_bad(double denom, double kappa_floor) {
  return denom <= 0.0 || denom < kappa_floor * (1.0 - 1e-9);
}

void check_action(const GridSpec& grid, int a) {
  if (a < 0 || a >= grid.n_a)
    throw config_error("effect: action index out of range");
}

const char* kind_name(EffectKind kind) {
  switch (kind) {
    case EffectKind::mean_do_a: return "mean_do_a";
    case EffectKind::mean_do_a_given_w: return "mean_do_a_given_w";
    case EffectKind::prob_do_a: return "prob_do_a";
  }
  throw config_error("effect: unknown kind");
}

}  // namespace

double effect_do_a(const JointDensity& density, int a, double kappa_floor) {
  const GridSpec& g = density.grid;
  g.validate();
  check_action(g, a);
  if (density.p.size() != g.cells())
    throw config_error("effect: density size mismatch");
  double value = 0.0;
  for (int k = 0; k < g.n_w; ++k) {
    for (int l = 0; l < g.n_u; ++l) {
      double weight = 0.0;
      for (int i = 0; i < g.n_a; ++i)
        for (int j = 0; j < g.n_y; ++j) weight += density.at(i, j, k, l);
      if (weight <= 0.0) continue;
      double denom = 0.0, numer = 0.0;
      for (int j = 0; j < g.n_y; ++j) {
        double pj = density.at(a, j, k, l);
        denom += pj;
        numer += g.y_values[j] * pj;
      }
      if (denominator_bad(denom, kappa_floor))
        throw numeric_error("effect: zero action mass in a positive stratum");
      value += weight * (numer / denom);
    }
  }
  return value;
}

double effect_do_a_given_w(const JointDensity& density, int a, int w,
                           double kappa_floor) {
  const GridSpec& g = density.grid;
  g.validate();
  check_action(g, a);
  if (w < 0 || w >= g.n_w)
    throw config_error("effect: context index out of range");
  if (density.p.size() != g.cells())
    throw config_error("effect: density size mismatch");
  double w_mass = 0.0;
  Eigen::VectorXd u_mass = Eigen::VectorXd::Zero(g.n_u);
  for (int l = 0; l < g.n_u; ++l) {
    for (int i = 0; i < g.n_a; ++i)
      for (int j = 0; j < g.n_y; ++j) u_mass[l] += density.at(i, j, w, l);
    w_mass += u_mass[l];
  }
  if (w_mass <= 0.0)
    throw numeric_error("effect: conditioning context has zero mass");
  double value = 0.0;
  for (int l = 0; l < g.n_u; ++l) {
    if (u_mass[l] <= 0.0) continue;
    double denom = 0.0, numer = 0.0;
    for (int j = 0; j < g.n_y; ++j) {
      double pj = density.at(a, j, w, l);
      denom += pj;
      numer += g.y_values[j] * pj;
    }
    if (denominator_bad(denom, kappa_floor))
      throw numeric_error("effect: zero action mass in a positive stratum");
    value += (u_mass[l] / w_mass) * (numer / denom);
  }
  return value;
}

double prob_do_a(const JointDensity& density, int a, int y,
                 double kappa_floor) {
  const GridSpec& g = density.grid;
  g.validate();
  check_action(g, a);
  if (y < 0 || y >= g.n_y)
    throw config_error("effect: outcome index out of range");
  if (density.p.size() != g.cells())
    throw config_error("effect: density size mismatch");
  double value = 0.0;
  for (int k = 0; k < g.n_w; ++k) {
    for (int l = 0; l < g.n_u; ++l) {
      double weight = 0.0;
      for (int i = 0; i < g.n_a; ++i)
        for (int j = 0; j < g.n_y; ++j) weight += density.at(i, j, k, l);
      if (weight <= 0.0) continue;
      double denom = 0.0;
      for (int j = 0; j < g.n_y; ++j) denom += density.at(a, j, k, l);
      if (denominator_bad(denom, kappa_floor))
        throw numeric_error("effect: zero action mass in a positive stratum");
      value += weight * (density.at(a, y, k, l) / denom);
    }
  }
  return value;
}

double evaluate_query(const JointDensity& density, const EffectQuery& query,
                      double kappa_floor) {
  switch (query.kind) {
    case EffectKind::mean_do_a:
      return effect_do_a(density, query.a, kappa_floor);
    case EffectKind::mean_do_a_given_w:
      return effect_do_a_given_w(density, query.a, query.w, kappa_floor);
    case EffectKind::prob_do_a:
      return prob_do_a(density, query.a, query.y, kappa_floor);
  }
  throw config_error("effect: unknown kind");
}

EffectQuery parse_effect_query(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("effect query: ") + e.what());
  }
  if (!j.is_object() || !j.contains("kind"))
    throw config_error("effect query: expected an object with \"kind\"");
  EffectQuery q;
  std::string kind = j["kind"].get<std::string>();
  if (kind == "mean_do_a")
    q.kind = EffectKind::mean_do_a;
  else if (kind == "mean_do_a_given_w")
    q.kind = EffectKind::mean_do_a_given_w;
  else if (kind == "prob_do_a")
    q.kind = EffectKind::prob_do_a;
  else
    throw config_error("effect query: unknown kind \"" + kind + "\"");
  if (!j.contains("a")) throw config_error("effect query: missing \"a\"");
  q.a = j["a"].get<int>();
  if (q.kind == EffectKind::mean_do_a_given_w) {
    if (!j.contains("w")) throw config_error("effect query: missing \"w\"");
    q.w = j["w"].get<int>();
  }
  if (q.kind == EffectKind::prob_do_a) {
    if (!j.contains("y")) throw config_error("effect query: missing \"y\"");
    q.y = j["y"].get<int>();
  }
  return q;
}

std::string serialize_effect_query(const EffectQuery& query) {
  nlohmann::json j;
  j["kind"] = kind_name(query.kind);
  j["a"] = query.a;
  if (query.kind == EffectKind::mean_do_a_given_w) j["w"] = query.w;
  if (query.kind == EffectKind::prob_do_a) j["y"] = query.y;
  return j.dump();
}

std::string query_name(const EffectQuery& query) {
  switch (query.kind) {
    case EffectKind::mean_do_a:
      return "mean_do_" + std::to_string(query.a);
    case EffectKind::mean_do_a_given_w:
      return "mean_do_" + std::to_string(query.a) + "_given_w" +
             std::to_string(query.w);
    case EffectKind::prob_do_a:
      return "prob_do_" + std::to_string(query.a) + "_y" +
             std::to_string(query.y);
  }
  throw config_error("effect: unknown kind");
}

std::function<double(const Eigen::VectorXd&)> make_objective(
    const GridSpec& grid, const EffectQuery& query, double kappa_floor) {
  grid.validate();
  // Validate the query once, against a uniform density.
  JointDensity probe{grid,
                     Eigen::VectorXd::Constant(grid.cells(),
                                               1.0 / grid.cells())};
  evaluate_query(probe, query, 0.0);
  return [grid, query, kappa_floor](const Eigen::VectorXd& x) {
    return evaluate_query(JointDensity{grid, x}, query, kappa_floor);
  };
}

double lipschitz_constant(EffectKind kind, const GridSpec& grid, double kappa1,
                          double kappa2) {
  grid.validate();
  if (kappa1 <= 0.0 || kappa2 < kappa1)
    throw config_error("lipschitz_constant: need 0 < kappa1 <= kappa2");
  double m = 1.0;
  if (kind != EffectKind::prob_do_a)
    m = grid.y_values.cwiseAbs().maxCoeff();
  double nu_z = static_cast<double>(grid.n_w) * grid.n_u;
  double nu_ay = static_cast<double>(grid.n_a) * grid.n_y;
  double nu_y = grid.n_y;
  double nu_u = grid.n_u;
  double nu_ayu = static_cast<double>(grid.n_a) * grid.n_y * grid.n_u;
  switch (kind) {
    case EffectKind::mean_do_a:
    case EffectKind::prob_do_a:
      return m * std::sqrt(nu_z * nu_ay) +
             2.0 * m * kappa2 * std::sqrt(nu_z * nu_y) * nu_ay / kappa1;
    case EffectKind::mean_do_a_given_w:
      return (m / kappa1) * (2.0 * kappa2 * std::sqrt(nu_u * nu_y) /
                                 (kappa1 * std::sqrt(nu_ayu)) +
                             1.0 / std::sqrt(nu_u)) +
             m * kappa2 * std::sqrt(nu_ayu) / (kappa1 * kappa1 * nu_ayu);
  }
  throw config_error("effect: unknown kind");
}

}  // namespace causalbounds
