#include "causalbounds/polytope.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>

#include "causalbounds/errors.hpp"

namespace causalbounds {

namespace {

void validate_kappa(double kappa, int n) {
  if (kappa < 0.0) throw config_error("polytope: kappa must be >= 0");
  if (kappa > 0.0 && kappa * n >= 1.0)
    throw config_error("polytope: kappa * n_cells must stay below 1");
}

Eigen::VectorXd normalized_marginal(const Eigen::VectorXd& m,
                                    const char* which) {
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (m[i] < -1e-12)
      throw config_error(std::string(which) + ": negative entry");
  double s = m.sum();
  if (std::abs(s - 1.0) > 1e-9)
    throw config_error(std::string(which) +
                       ": entries must sum to 1 within 1e-9");
  return m / s;
}

// Index of a row whose entries are all equal (and nonzero), or -1.
int constant_row_index(const Eigen::MatrixXd& rows) {
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    double v = rows(r, 0);
    if (std::abs(v) < 1e-300) continue;
    bool constant = true;
    for (Eigen::Index c = 1; c < rows.cols(); ++c) {
      if (std::abs(rows(r, c) - v) > 1e-12 * std::max(1.0, std::abs(v))) {
        constant = false;
        break;
      }
    }
    if (constant) return static_cast<int>(r);
  }
  return -1;
}

}  // namespace

ConstraintPolytope make_polytope(Eigen::MatrixXd eq_rows,
                                 Eigen::VectorXd eq_targets,
                                 Eigen::MatrixXd ineq_rows,
                                 Eigen::VectorXd ineq_targets, double kappa) {
  const int n = static_cast<int>(eq_rows.cols());
  if (eq_rows.rows() != eq_targets.size())
    throw config_error("polytope: equality rows/targets size mismatch");
  if (ineq_rows.rows() != ineq_targets.size())
    throw config_error("polytope: inequality rows/targets size mismatch");
  if (ineq_rows.rows() > 0 && ineq_rows.cols() != n)
    throw config_error("polytope: inequality row width mismatch");
  if (eq_rows.rows() == 0 || n == 0)
    throw config_error("polytope: empty equality system");
  validate_kappa(kappa, n);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(eq_rows.transpose());
  qr.setThreshold(1e-10);
  if (qr.rank() < eq_rows.rows())
    throw numeric_error("polytope: equality rows are rank-deficient");

  ConstraintPolytope poly;
  poly.eq_rows = std::move(eq_rows);
  poly.eq_targets = std::move(eq_targets);
  poly.ineq_rows = std::move(ineq_rows);
  poly.ineq_targets = std::move(ineq_targets);
  poly.kappa = kappa;
  return poly;
}

ConstraintPolytope build_marginal_constraints(const GridSpec& grid,
                                              const Eigen::VectorXd& marginal_ayw,
                                              const Eigen::VectorXd& marginal_u,
                                              double kappa) {
  grid.validate();
  if (marginal_ayw.size() != grid.ayw_cells())
    throw config_error("marginal_ayw: expected one entry per (a,y,w) cell");
  if (marginal_u.size() != grid.n_u)
    throw config_error("marginal_u: expected one entry per u value");
  const int n = grid.cells();
  validate_kappa(kappa, n);

  Eigen::VectorXd ayw = normalized_marginal(marginal_ayw, "marginal_ayw");
  Eigen::VectorXd mu = normalized_marginal(marginal_u, "marginal_u");

  const int m_ayw = grid.ayw_cells();
  const int m = m_ayw + grid.n_u - 1;  // last u row implied by the rest
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd targets(m);
  for (int s = 0; s < m_ayw; ++s) {
    for (int l = 0; l < grid.n_u; ++l) rows(s, s * grid.n_u + l) = 1.0;
    targets[s] = ayw[s];
  }
  for (int l = 0; l + 1 < grid.n_u; ++l) {
    int r = m_ayw + l;
    for (int s = 0; s < m_ayw; ++s) rows(r, s * grid.n_u + l) = 1.0;
    targets[r] = mu[l];
  }

  ConstraintPolytope poly;
  poly.eq_rows = std::move(rows);
  poly.eq_targets = std::move(targets);
  poly.ineq_rows = Eigen::MatrixXd(0, n);
  poly.ineq_targets = Eigen::VectorXd(0);
  poly.kappa = kappa;
  poly.marginal_grid = grid;
  return poly;
}

Eigen::VectorXd product_init(const GridSpec& grid,
                             const Eigen::VectorXd& marginal_ayw,
                             const Eigen::VectorXd& marginal_u) {
  grid.validate();
  if (marginal_ayw.size() != grid.ayw_cells() ||
      marginal_u.size() != grid.n_u)
    throw config_error("product_init: marginal size mismatch");
  Eigen::VectorXd ayw = normalized_marginal(marginal_ayw, "marginal_ayw");
  Eigen::VectorXd mu = normalized_marginal(marginal_u, "marginal_u");
  Eigen::VectorXd p(grid.cells());
  for (int s = 0; s < grid.ayw_cells(); ++s)
    for (int l = 0; l < grid.n_u; ++l) p[s * grid.n_u + l] = ayw[s] * mu[l];
  return p;
}

bool check_feasible(const Eigen::VectorXd& p, const ConstraintPolytope& poly,
                    double tol) {
  if (p.size() != poly.dim()) return false;
  if ((p.array() < poly.kappa - tol).any()) return false;
  Eigen::VectorXd eq_res = poly.eq_rows * p - poly.eq_targets;
  if (eq_res.cwiseAbs().maxCoeff() > tol + poly.slack) return false;
  if (poly.ineq_count() > 0) {
    Eigen::VectorXd s = poly.ineq_rows * p - poly.ineq_targets;
    if (s.maxCoeff() > tol + poly.slack) return false;
  }
  return true;
}

ConstraintPolytope relax(const ConstraintPolytope& poly, double eps) {
  if (eps < 0.0) throw config_error("relax: eps must be >= 0");
  ConstraintPolytope out = poly;
  out.slack = eps;
  return out;
}

EffectiveSystem effective_system(const ConstraintPolytope& poly) {
  EffectiveSystem sys;
  if (poly.slack <= 0.0) {
    sys.eq_rows = poly.eq_rows;
    sys.eq_targets = poly.eq_targets;
    sys.ineq_rows = poly.ineq_rows;
    sys.ineq_targets = poly.ineq_targets;
    return sys;
  }
  const int n = poly.dim();
  const int m = poly.eq_count();
  int norm_row = constant_row_index(poly.eq_rows);

  if (norm_row >= 0) {
    sys.eq_rows = poly.eq_rows.row(norm_row);
    sys.eq_targets = poly.eq_targets.segment(norm_row, 1);
  } else if (poly.marginal_grid) {
    // The (a,y,w) rows sum to the all-ones row, so total mass is pinned by
    // the stored system; keep it pinned under relaxation.
    sys.eq_rows = Eigen::MatrixXd::Ones(1, n);
    sys.eq_targets = Eigen::VectorXd::Ones(1);
  } else {
    sys.eq_rows = Eigen::MatrixXd(0, n);
    sys.eq_targets = Eigen::VectorXd(0);
  }

  // Every stored equality becomes the pair  <a,p> <= b + slack,
  // -<a,p> <= -b + slack; stored inequalities gain the slack.
  const int keep = norm_row;
  int bands = 0;
  for (int r = 0; r < m; ++r)
    if (r != keep) ++bands;
  sys.ineq_rows.resize(2 * bands + poly.ineq_count(), n);
  sys.ineq_targets.resize(2 * bands + poly.ineq_count());
  int out = 0;
  for (int r = 0; r < m; ++r) {
    if (r == keep) continue;
    sys.ineq_rows.row(out) = poly.eq_rows.row(r);
    sys.ineq_targets[out++] = poly.eq_targets[r] + poly.slack;
    sys.ineq_rows.row(out) = -poly.eq_rows.row(r);
    sys.ineq_targets[out++] = -poly.eq_targets[r] + poly.slack;
  }
  for (int r = 0; r < poly.ineq_count(); ++r) {
    sys.ineq_rows.row(out) = poly.ineq_rows.row(r);
    sys.ineq_targets[out++] = poly.ineq_targets[r] + poly.slack;
  }
  return sys;
}

ConstraintPolytope PolytopeSpec::build() const {
  if (epsilon < 0.0) throw config_error("polytope: epsilon must be >= 0");
  ConstraintPolytope poly =
      build_marginal_constraints(grid, marginal_ayw, marginal_u, kappa);
  return epsilon > 0.0 ? relax(poly, epsilon) : poly;
}

PolytopeSpec parse_polytope_spec(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const std::exception& e) {
    throw config_error(std::string("polytope json: ") + e.what());
  }
  try {
    PolytopeSpec spec;
    const auto& g = j.at("grid");
    spec.grid.n_a = g.at("n_a").get<int>();
    spec.grid.n_y = g.at("n_y").get<int>();
    spec.grid.n_w = g.at("n_w").get<int>();
    spec.grid.n_u = g.at("n_u").get<int>();
    auto yv = g.at("y_values").get<std::vector<double>>();
    spec.grid.y_values =
        Eigen::Map<Eigen::VectorXd>(yv.data(), static_cast<long>(yv.size()));
    auto ma = j.at("marginal_ayw").get<std::vector<double>>();
    spec.marginal_ayw =
        Eigen::Map<Eigen::VectorXd>(ma.data(), static_cast<long>(ma.size()));
    auto mu = j.at("marginal_u").get<std::vector<double>>();
    spec.marginal_u =
        Eigen::Map<Eigen::VectorXd>(mu.data(), static_cast<long>(mu.size()));
    spec.kappa = j.value("kappa", 0.0);
    spec.epsilon = j.value("epsilon", 0.0);
    spec.grid.validate();
    return spec;
  } catch (const config_error&) {
    throw;
  } catch (const std::exception& e) {
    throw config_error(std::string("polytope json: ") + e.what());
  }
}

std::string serialize_polytope_spec(const PolytopeSpec& spec) {
  nlohmann::json j;
  j["grid"]["n_a"] = spec.grid.n_a;
  j["grid"]["n_y"] = spec.grid.n_y;
  j["grid"]["n_w"] = spec.grid.n_w;
  j["grid"]["n_u"] = spec.grid.n_u;
  j["grid"]["y_values"] = std::vector<double>(
      spec.grid.y_values.data(), spec.grid.y_values.data() + spec.grid.n_y);
  j["marginal_ayw"] =
      std::vector<double>(spec.marginal_ayw.data(),
                          spec.marginal_ayw.data() + spec.marginal_ayw.size());
  j["marginal_u"] = std::vector<double>(
      spec.marginal_u.data(), spec.marginal_u.data() + spec.marginal_u.size());
  j["kappa"] = spec.kappa;
  j["epsilon"] = spec.epsilon;
  return j.dump(2);
}

}  // namespace causalbounds
