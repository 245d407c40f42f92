#include "causalbounds/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "causalbounds/errors.hpp"
#include "causalbounds/lp.hpp"
#include "parallel.hpp"

namespace causalbounds {

namespace {

using detail::now_ms;
using detail::parallel_for;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Central differences with a relative step; one-sided forward where the
// centered point would cross the floor.
Eigen::VectorXd numerical_gradient(const Objective& f, Eigen::VectorXd x,
                                   double f0, double kappa, double fd_step) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i) {
    double orig = x[i];
    double h = fd_step * std::max(1.0, std::abs(orig));
    x[i] = orig + h;
    double fp = f(x);
    if (orig - h >= kappa) {
      x[i] = orig - h;
      g[i] = (fp - f(x)) / (2.0 * h);
    } else {
      g[i] = (fp - f0) / h;
    }
    x[i] = orig;
  }
  return g;
}

}  // namespace

OptimizeResult local_optimize(const ConstraintPolytope& poly,
                              const Objective& objective,
                              const Eigen::VectorXd& start, bool maximize,
                              const OptimizeOptions& opts) {
  const int n = poly.dim();
  if (start.size() != n)
    throw config_error("local_optimize: start dimension mismatch");
  if (!check_feasible(start, poly, 1e-8))
    throw numeric_error("local_optimize: start point is infeasible");

  EffectiveSystem sys = effective_system(poly);
  const int m_eq = static_cast<int>(sys.eq_rows.rows());
  const int m_in = static_cast<int>(sys.ineq_rows.rows());
  const double sign = maximize ? 1.0 : -1.0;
  Objective f = [&](const Eigen::VectorXd& p) { return sign * objective(p); };

  Eigen::VectorXd x = start;
  double fx = f(x);
  bool converged = false;
  int iter = 0;

  for (; iter < opts.max_iters; ++iter) {
    Eigen::VectorXd g =
        numerical_gradient(f, x, fx, poly.kappa, opts.fd_step);
    Eigen::VectorXd ri = sys.ineq_targets - sys.ineq_rows * x;
    double mult_tol = 1e-7 * (1.0 + g.norm());

    // Project onto the kernel of [equalities; active rows], releasing active
    // rows whose multiplier points inward, until a usable direction appears
    // or the KKT conditions hold.
    std::vector<char> drop_floor(n, 0), drop_ineq(m_in, 0);
    Eigen::VectorXd d;
    bool take_step = false;
    while (true) {
      std::vector<int> act_f, act_i;
      for (int i = 0; i < n; ++i)
        if (!drop_floor[i] && x[i] - poly.kappa <= opts.active_tol)
          act_f.push_back(i);
      for (int j = 0; j < m_in; ++j)
        if (!drop_ineq[j] && ri[j] <= opts.active_tol) act_i.push_back(j);

      const int mb = m_eq + static_cast<int>(act_f.size() + act_i.size());
      Eigen::VectorXd lam;
      if (mb == 0) {
        d = g;
      } else {
        Eigen::MatrixXd bt(n, mb);  // columns are constraint normals
        int c = 0;
        for (int r = 0; r < m_eq; ++r)
          bt.col(c++) = sys.eq_rows.row(r).transpose();
        for (int i : act_f) {
          bt.col(c).setZero();
          bt(i, c++) = -1.0;
        }
        for (int j : act_i) bt.col(c++) = sys.ineq_rows.row(j).transpose();
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(bt);
        lam = qr.solve(g);
        d = g - bt * lam;
      }
      if (d.norm() > opts.tol) {
        take_step = true;
        break;
      }
      int worst_floor = -1, worst_ineq = -1;
      double worst = -mult_tol;
      int pos = m_eq;
      for (int i : act_f) {
        if (lam[pos] < worst) {
          worst = lam[pos];
          worst_floor = i;
          worst_ineq = -1;
        }
        ++pos;
      }
      for (int j : act_i) {
        if (lam[pos] < worst) {
          worst = lam[pos];
          worst_ineq = j;
          worst_floor = -1;
        }
        ++pos;
      }
      if (worst_floor < 0 && worst_ineq < 0) {
        converged = true;
        break;
      }
      if (worst_floor >= 0)
        drop_floor[worst_floor] = 1;
      else
        drop_ineq[worst_ineq] = 1;
    }
    if (converged || !take_step) break;

    // Longest feasible step, then Armijo backtracking.
    double nd = d.norm();
    double t_max = 10.0 / nd;
    for (int i = 0; i < n; ++i)
      if (d[i] < -1e-14)
        t_max = std::min(t_max, std::max(x[i] - poly.kappa, 0.0) / -d[i]);
    Eigen::VectorXd ci = sys.ineq_rows * d;
    for (int j = 0; j < m_in; ++j)
      if (ci[j] > 1e-14)
        t_max = std::min(t_max, std::max(ri[j], 0.0) / ci[j]);

    double dirder = g.dot(d);
    double t = t_max;
    bool accepted = false;
    for (int ls = 0; ls < 60 && t * nd > 1e-15; ++ls, t *= 0.5) {
      double ft = f(x + t * d);
      if (ft >= fx + 1e-4 * t * dirder) {
        x += t * d;
        fx = ft;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // at the finite-difference noise floor
  }

  OptimizeResult res;
  res.x = std::move(x);
  res.value = sign * fx;
  res.iters = iter;
  res.converged = converged;
  return res;
}

namespace {

Eigen::MatrixXd shared_draws(const ConstraintPolytope& poly,
                             const Eigen::VectorXd& start,
                             const BoundRunOptions& opts) {
  if (opts.steps < 1) throw config_error("bounds: steps must be >= 1");
  ChainOptions copts;
  copts.burn_in = opts.burn_in;
  copts.thin = 1;
  copts.seed = derive_stream(opts.seed, 0);
  return run_chain(poly, start, opts.steps, copts);
}

}  // namespace

CausalBounds bounds_by_sampling(const ConstraintPolytope& poly,
                                const Objective& objective,
                                const Eigen::VectorXd& start,
                                const BoundRunOptions& opts) {
  double t0 = now_ms();
  Eigen::MatrixXd draws = shared_draws(poly, start, opts);
  double l = kInf, h = -kInf;
  for (long s = 0; s < draws.rows(); ++s) {
    double v = objective(draws.row(s).transpose());
    l = std::min(l, v);
    h = std::max(h, v);
  }
  CausalBounds b;
  b.l = l;
  b.h = h;
  b.samples = opts.steps;
  b.wall_ms = now_ms() - t0;
  b.provenance = "sampling";
  return b;
}

CausalBounds bounds_accelerated(const ConstraintPolytope& poly,
                                const Objective& objective,
                                const Eigen::VectorXd& start,
                                const BoundRunOptions& opts) {
  double t0 = now_ms();
  Eigen::MatrixXd draws = shared_draws(poly, start, opts);
  double l = kInf, h = -kInf;
  for (long s = 0; s < draws.rows(); ++s) {
    double v = objective(draws.row(s).transpose());
    l = std::min(l, v);
    h = std::max(h, v);
  }
  const int restarts = opts.restarts;
  if (restarts > 0) {
    std::vector<double> vals(2 * restarts);
    parallel_for(2 * restarts, opts.threads, [&](int task) {
      int k = task / 2;
      bool maximize = (task % 2) == 1;
      long idx = (static_cast<long>(k) * opts.steps / restarts) % opts.steps;
      OptimizeResult r = local_optimize(poly, objective,
                                        draws.row(idx).transpose(), maximize,
                                        opts.optimize);
      vals[task] = r.value;
    });
    for (double v : vals) {
      l = std::min(l, v);
      h = std::max(h, v);
    }
  }
  CausalBounds b;
  b.l = l;
  b.h = h;
  b.samples = opts.steps;
  b.wall_ms = now_ms() - t0;
  b.provenance = restarts > 0 ? "sampling+oracle" : "sampling";
  return b;
}

namespace {

Eigen::VectorXd clean_marginal(const Eigen::VectorXd& m, const char* what) {
  for (int i = 0; i < m.size(); ++i)
    if (m[i] < 0.0)
      throw config_error(std::string(what) + ": negative entry");
  double s = m.sum();
  if (std::abs(s - 1.0) > 1e-9)
    throw config_error(std::string(what) + ": entries must sum to 1");
  return m / s;
}

}  // namespace

CausalBounds frechet_only_bounds(const GridSpec& grid,
                                 const Eigen::VectorXd& marginal_ayw,
                                 const Eigen::VectorXd& marginal_u,
                                 const EffectQuery& query,
                                 const BoundRunOptions& opts) {
  grid.validate();
  if (query.kind == EffectKind::mean_do_a_given_w)
    throw config_error(
        "frechet baseline supports mean_do_a and prob_do_a queries");
  if (query.a < 0 || query.a >= grid.n_a)
    throw config_error("frechet baseline: action index out of range");
  const bool prob = query.kind == EffectKind::prob_do_a;
  if (prob && (query.y < 0 || query.y >= grid.n_y))
    throw config_error("frechet baseline: outcome index out of range");
  if (marginal_ayw.size() != grid.ayw_cells() ||
      marginal_u.size() != grid.n_u)
    throw config_error("frechet baseline: marginal size mismatch");
  Eigen::VectorXd m_ayw = clean_marginal(marginal_ayw, "marginal_ayw");
  Eigen::VectorXd m_u = clean_marginal(marginal_u, "marginal_u");

  const int ny = grid.n_y, nw = grid.n_w, nu = grid.n_u;
  const int a_block = ny * nw * nu;
  const int n = a_block + 2 * nw * nu;
  const double kappa = 1e-6;

  // Variables: per-outcome action-slice masses a(j,k,l), stratum weights
  // b(k,l), and action masses c(k,l); each stratum is tied only to its own
  // marginals, never across strata.
  auto ia = [&](int j, int k, int l) { return (j * nw + k) * nu + l; };
  auto ib = [&](int k, int l) { return a_block + k * nu + l; };
  auto ic = [&](int k, int l) { return a_block + nw * nu + k * nu + l; };

  auto rho_ayw = [&](int j, int k) {
    return m_ayw[grid.flat_ayw(query.a, j, k)];
  };
  Eigen::VectorXd rho_w = Eigen::VectorXd::Zero(nw);
  for (int i = 0; i < grid.n_a; ++i)
    for (int j = 0; j < ny; ++j)
      for (int k = 0; k < nw; ++k) rho_w[k] += m_ayw[grid.flat_ayw(i, j, k)];

  Eigen::VectorXd rho_aw = Eigen::VectorXd::Zero(nw);
  for (int j = 0; j < ny; ++j)
    for (int k = 0; k < nw; ++k) rho_aw[k] += rho_ayw(j, k);

  // Each family carries only its own marginal over u; the blocks are linked
  // by the pointwise chain a <= c <= b, never by shared-sum rows.
  const int m_eq = ny * nw + 2 * nw;
  Eigen::MatrixXd eq = Eigen::MatrixXd::Zero(m_eq, n);
  Eigen::VectorXd eq_t(m_eq);
  int row = 0;
  for (int j = 0; j < ny; ++j)
    for (int k = 0; k < nw; ++k) {
      for (int l = 0; l < nu; ++l) eq(row, ia(j, k, l)) = 1.0;
      eq_t[row++] = rho_ayw(j, k);
    }
  for (int k = 0; k < nw; ++k) {
    for (int l = 0; l < nu; ++l) eq(row, ib(k, l)) = 1.0;
    eq_t[row++] = rho_w[k];
  }
  for (int k = 0; k < nw; ++k) {
    for (int l = 0; l < nu; ++l) eq(row, ic(k, l)) = 1.0;
    eq_t[row++] = rho_aw[k];
  }

  std::vector<Eigen::RowVectorXd> ineq_rows;
  std::vector<double> ineq_t;
  auto push_box = [&](int var, double lo, double hi) {
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(n);
    r[var] = 1.0;
    ineq_rows.push_back(r);
    ineq_t.push_back(hi);
    if (lo > kappa) {
      ineq_rows.push_back(-r);
      ineq_t.push_back(-lo);
    }
  };
  auto push_leq = [&](int small, int big) {
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(n);
    r[small] = 1.0;
    r[big] = -1.0;
    ineq_rows.push_back(r);
    ineq_t.push_back(0.0);
  };
  for (int k = 0; k < nw; ++k)
    for (int l = 0; l < nu; ++l) {
      push_leq(ic(k, l), ib(k, l));
      auto [blo, bhi] = frechet_interval(rho_w[k], m_u[l]);
      push_box(ib(k, l), blo, bhi);
      auto [clo, chi] = frechet_interval(rho_aw[k], m_u[l]);
      push_box(ic(k, l), clo, chi);
      for (int j = 0; j < ny; ++j) {
        push_leq(ia(j, k, l), ic(k, l));
        auto [alo, ahi] = frechet_interval(rho_ayw(j, k), m_u[l]);
        push_box(ia(j, k, l), alo, ahi);
      }
    }
  Eigen::MatrixXd iq(static_cast<int>(ineq_rows.size()), n);
  Eigen::VectorXd iq_t(iq.rows());
  for (int r = 0; r < iq.rows(); ++r) {
    iq.row(r) = ineq_rows[r];
    iq_t[r] = ineq_t[r];
  }

  ConstraintPolytope region = make_polytope(eq, eq_t, iq, iq_t, kappa);

  Eigen::VectorXd y_values = grid.y_values;
  int y_pick = query.y;
  Objective obj = [=](const Eigen::VectorXd& x) {
    double v = 0.0;
    for (int k = 0; k < nw; ++k)
      for (int l = 0; l < nu; ++l) {
        double c = x[ic(k, l)];
        if (c <= 0.0)
          throw numeric_error("frechet baseline: zero action mass");
        double numer = 0.0;
        if (y_pick >= 0 && prob) {
          numer = x[ia(y_pick, k, l)];
        } else {
          for (int j = 0; j < ny; ++j) numer += y_values[j] * x[ia(j, k, l)];
        }
        v += x[ib(k, l)] * (numer / c);
      }
    return v;
  };

  Eigen::VectorXd x0(n);
  for (int j = 0; j < ny; ++j)
    for (int k = 0; k < nw; ++k)
      for (int l = 0; l < nu; ++l) x0[ia(j, k, l)] = rho_ayw(j, k) * m_u[l];
  for (int k = 0; k < nw; ++k)
    for (int l = 0; l < nu; ++l) {
      x0[ib(k, l)] = rho_w[k] * m_u[l];
      x0[ic(k, l)] = rho_aw[k] * m_u[l];
    }

  CausalBounds b = bounds_accelerated(region, obj, x0, opts);
  b.provenance = "frechet_baseline";
  return b;
}

}  // namespace causalbounds
