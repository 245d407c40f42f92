#include "causalbounds/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "causalbounds/errors.hpp"

namespace causalbounds {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kReducedCostTol = 1e-9;
constexpr double kRatioTol = 1e-10;
constexpr long kMaxPivots = 200000;

// Original variable mapped into standard form: x = shift + sign * x[col]
// (- x[neg_col] when the variable is fully free).
struct VarMap {
  int col = -1;
  int neg_col = -1;
  double shift = 0.0;
  double sign = 1.0;
};

// Dense tableau simplex on  min c'x, A x = b, x >= 0  with b >= 0. The
// objective row carries reduced costs; Bland's rule (lowest eligible column,
// lowest basic variable on ratio ties) guards against cycling.
class Tableau {
 public:
  Tableau(Eigen::MatrixXd a, Eigen::VectorXd b)
      : a_(std::move(a)), b_(std::move(b)), m_(static_cast<int>(a_.rows())),
        n_(static_cast<int>(a_.cols())), basis_(m_, -1) {}

  int rows() const { return m_; }
  int cols() const { return n_; }
  std::vector<int>& basis() { return basis_; }
  double rhs(int r) const { return b_[r]; }
  double at(int r, int c) const { return a_(r, c); }

  void set_objective(const Eigen::VectorXd& c) {
    obj_ = c;
    obj_rhs_ = 0.0;
    for (int r = 0; r < m_; ++r) {
      int j = basis_[r];
      double cj = j >= 0 && j < c.size() ? c[j] : 0.0;
      if (cj != 0.0) {
        obj_ -= cj * a_.row(r).transpose();
        obj_rhs_ -= cj * b_[r];
      }
    }
  }

  double objective_value() const { return -obj_rhs_; }

  // allowed(j): columns eligible to enter. Returns optimal or unbounded.
  template <typename Allowed>
  LpStatus run(const Allowed& allowed) {
    for (long iter = 0; iter < kMaxPivots; ++iter) {
      int enter = -1;
      for (int j = 0; j < n_; ++j) {
        if (!allowed(j)) continue;
        if (obj_[j] < -kReducedCostTol) {
          enter = j;
          break;  // Bland: lowest index
        }
      }
      if (enter < 0) return LpStatus::optimal;

      int leave = -1;
      double best_ratio = kInf;
      for (int r = 0; r < m_; ++r) {
        double arj = a_(r, enter);
        if (arj <= kRatioTol) continue;
        double ratio = b_[r] / arj;
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 &&
             (leave < 0 || basis_[r] < basis_[leave]))) {
          best_ratio = ratio;
          leave = r;
        }
      }
      if (leave < 0) return LpStatus::unbounded;
      pivot(leave, enter);
    }
    throw numeric_error("simplex: pivot limit exceeded");
  }

  void pivot(int r, int j) {
    double piv = a_(r, j);
    a_.row(r) /= piv;
    b_[r] /= piv;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double f = a_(i, j);
      if (f != 0.0) {
        a_.row(i) -= f * a_.row(r);
        b_[i] -= f * b_[r];
        a_(i, j) = 0.0;
      }
    }
    double f = obj_[j];
    if (f != 0.0) {
      obj_ -= f * a_.row(r).transpose();
      obj_rhs_ -= f * b_[r];
      obj_[j] = 0.0;
    }
    basis_[r] = j;
  }

  Eigen::VectorXd solution() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
    for (int r = 0; r < m_; ++r)
      if (basis_[r] >= 0) x[basis_[r]] = b_[r];
    return x;
  }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  int m_, n_;
  std::vector<int> basis_;
  Eigen::VectorXd obj_;
  double obj_rhs_ = 0.0;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
  const int n = lp.n();
  if (lp.lo.size() != n || lp.hi.size() != n)
    throw config_error("lp: bounds size mismatch");
  if (lp.A_eq.rows() != lp.b_eq.size() || lp.A_ub.rows() != lp.b_ub.size())
    throw config_error("lp: row/target size mismatch");
  if ((lp.A_eq.rows() > 0 && lp.A_eq.cols() != n) ||
      (lp.A_ub.rows() > 0 && lp.A_ub.cols() != n))
    throw config_error("lp: row width mismatch");
  for (int i = 0; i < n; ++i)
    if (lp.lo[i] > lp.hi[i]) throw config_error("lp: lo > hi");

  // Variable transforms into nonnegative standard variables.
  std::vector<VarMap> vmap(n);
  int n_struct = 0;
  int n_bound_rows = 0;
  for (int i = 0; i < n; ++i) {
    bool lo_f = std::isfinite(lp.lo[i]);
    bool hi_f = std::isfinite(lp.hi[i]);
    if (lo_f) {
      vmap[i] = {n_struct++, -1, lp.lo[i], 1.0};
      if (hi_f) ++n_bound_rows;
    } else if (hi_f) {
      vmap[i] = {n_struct++, -1, lp.hi[i], -1.0};
    } else {
      vmap[i] = {n_struct, n_struct + 1, 0.0, 1.0};
      n_struct += 2;
    }
  }

  const int m_eq = static_cast<int>(lp.A_eq.rows());
  const int m_ub = static_cast<int>(lp.A_ub.rows());
  const int m = m_eq + m_ub + n_bound_rows;
  const int n_slack = m_ub + n_bound_rows;

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, n_struct + n_slack + m);
  Eigen::VectorXd b(m);

  auto put_row = [&](int row, const Eigen::RowVectorXd& coef, double rhs) {
    for (int i = 0; i < n; ++i) {
      double v = coef[i];
      if (v == 0.0) continue;
      a(row, vmap[i].col) += v * vmap[i].sign;
      if (vmap[i].neg_col >= 0) a(row, vmap[i].neg_col) -= v;
      rhs -= v * vmap[i].shift;
    }
    b[row] = rhs;
  };

  for (int r = 0; r < m_eq; ++r) put_row(r, lp.A_eq.row(r), lp.b_eq[r]);
  for (int r = 0; r < m_ub; ++r)
    put_row(m_eq + r, lp.A_ub.row(r), lp.b_ub[r]);
  {
    int row = m_eq + m_ub;
    for (int i = 0; i < n; ++i) {
      if (std::isfinite(lp.lo[i]) && std::isfinite(lp.hi[i])) {
        a(row, vmap[i].col) = 1.0;
        b[row] = lp.hi[i] - lp.lo[i];
        ++row;
      }
    }
  }
  // Slack columns for every inequality-type row.
  for (int s = 0; s < n_slack; ++s) a(m_eq + s, n_struct + s) = 1.0;

  // Orient rows to b >= 0; the initial basis is a slack where its sign
  // survived and an artificial otherwise.
  for (int r = 0; r < m; ++r) {
    if (b[r] < 0.0) {
      a.row(r) = -a.row(r);
      b[r] = -b[r];
    }
  }
  const int art_base = n_struct + n_slack;
  std::vector<int> art_rows;
  for (int r = 0; r < m; ++r) {
    int slack_col = (r >= m_eq) ? n_struct + (r - m_eq) : -1;
    if (!(slack_col >= 0 && a(r, slack_col) > 0.5)) art_rows.push_back(r);
  }
  const int n_art = static_cast<int>(art_rows.size());
  Eigen::MatrixXd a2(m, n_struct + n_slack + n_art);
  a2.leftCols(n_struct + n_slack) = a.leftCols(n_struct + n_slack);
  a2.rightCols(n_art).setZero();
  for (int k = 0; k < n_art; ++k) a2(art_rows[k], art_base + k) = 1.0;

  Tableau t(a2, b);
  {
    int k = 0;
    for (int r = 0; r < m; ++r) {
      int slack_col = (r >= m_eq) ? n_struct + (r - m_eq) : -1;
      if (slack_col >= 0 && a2(r, slack_col) > 0.5)
        t.basis()[r] = slack_col;
      else
        t.basis()[r] = art_base + (k++);
    }
  }

  LpResult res;
  if (n_art > 0) {
    Eigen::VectorXd c1 = Eigen::VectorXd::Zero(a2.cols());
    c1.tail(n_art).setOnes();
    t.set_objective(c1);
    LpStatus st = t.run([](int) { return true; });
    if (st != LpStatus::optimal || t.objective_value() > 1e-8) {
      res.status = LpStatus::infeasible;
      return res;
    }
    // Pivot lingering artificials out where a nonzero structural entry
    // exists; rows without one are redundant and keep a zero artificial.
    for (int r = 0; r < m; ++r) {
      if (t.basis()[r] < art_base) continue;
      for (int j = 0; j < art_base; ++j) {
        if (std::abs(t.at(r, j)) > 1e-9) {
          t.pivot(r, j);
          break;
        }
      }
    }
  }

  // Phase 2 on the real objective, artificial columns barred.
  Eigen::VectorXd c2 = Eigen::VectorXd::Zero(a2.cols());
  for (int i = 0; i < n; ++i) {
    double ci = lp.c[i];
    if (ci == 0.0) continue;
    c2[vmap[i].col] += ci * vmap[i].sign;
    if (vmap[i].neg_col >= 0) c2[vmap[i].neg_col] -= ci;
  }
  t.set_objective(c2);
  LpStatus st = t.run([&](int j) { return j < art_base; });
  if (st == LpStatus::unbounded) {
    res.status = LpStatus::unbounded;
    return res;
  }

  Eigen::VectorXd xs = t.solution();
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) {
    double v = vmap[i].shift + vmap[i].sign * xs[vmap[i].col];
    if (vmap[i].neg_col >= 0) v -= xs[vmap[i].neg_col];
    x[i] = v;
  }

  // Residual verification.
  double scale = 1.0 + x.cwiseAbs().maxCoeff();
  if (m_eq > 0 &&
      (lp.A_eq * x - lp.b_eq).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw numeric_error("simplex: equality residual too large");
  if (m_ub > 0 && (lp.A_ub * x - lp.b_ub).maxCoeff() > 1e-8 * scale)
    throw numeric_error("simplex: inequality residual too large");
  for (int i = 0; i < n; ++i) {
    if (x[i] < lp.lo[i] - 1e-8 * scale || x[i] > lp.hi[i] + 1e-8 * scale)
      throw numeric_error("simplex: bound residual too large");
  }

  res.status = LpStatus::optimal;
  res.x = std::move(x);
  res.objective = lp.c.dot(res.x);
  return res;
}

std::pair<double, double> frechet_interval(double marginal_a,
                                           double marginal_b) {
  if (marginal_a < -1e-12 || marginal_a > 1.0 + 1e-12 || marginal_b < -1e-12 ||
      marginal_b > 1.0 + 1e-12)
    throw config_error("frechet_interval: marginals must lie in [0,1]");
  double lo = std::max(0.0, marginal_a + marginal_b - 1.0);
  double hi = std::min(marginal_a, marginal_b);
  return {lo, hi};
}

namespace {

// Support LP over the effective system with pinned variables eliminated.
std::pair<double, double> support_impl(
    const EffectiveSystem& sys, double kappa, int index,
    const std::vector<std::pair<int, double>>& pins, int n) {
  std::vector<int> col_of(n, -1);
  std::vector<double> pin_val(n, 0.0);
  std::vector<bool> pinned(n, false);
  for (const auto& [i, v] : pins) {
    pinned[i] = true;
    pin_val[i] = v;
  }
  if (pinned[index]) return {pin_val[index], pin_val[index]};
  int n_red = 0;
  for (int i = 0; i < n; ++i)
    if (!pinned[i]) col_of[i] = n_red++;

  LinearProgram lp;
  lp.c = Eigen::VectorXd::Zero(n_red);
  lp.c[col_of[index]] = 1.0;
  lp.lo = Eigen::VectorXd::Constant(n_red, kappa);
  lp.hi = Eigen::VectorXd::Constant(n_red, kInf);

  auto reduce = [&](const Eigen::MatrixXd& rows, const Eigen::VectorXd& tgt,
                    Eigen::MatrixXd& out_rows, Eigen::VectorXd& out_tgt) {
    out_rows = Eigen::MatrixXd::Zero(rows.rows(), n_red);
    out_tgt = tgt;
    for (int r = 0; r < rows.rows(); ++r) {
      for (int i = 0; i < n; ++i) {
        double v = rows(r, i);
        if (v == 0.0) continue;
        if (pinned[i])
          out_tgt[r] -= v * pin_val[i];
        else
          out_rows(r, col_of[i]) = v;
      }
    }
  };
  reduce(sys.eq_rows, sys.eq_targets, lp.A_eq, lp.b_eq);
  reduce(sys.ineq_rows, sys.ineq_targets, lp.A_ub, lp.b_ub);

  LpResult lo_res = solve_lp(lp);
  if (lo_res.status != LpStatus::optimal)
    throw numeric_error("variable_support: no feasible completion");
  lp.c = -lp.c;
  LpResult hi_res = solve_lp(lp);
  if (hi_res.status != LpStatus::optimal)
    throw numeric_error("variable_support: no feasible completion");
  return {lo_res.objective, -hi_res.objective};
}

}  // namespace

std::pair<double, double> variable_support(
    const ConstraintPolytope& poly, int index,
    const std::vector<std::pair<int, double>>& pins) {
  if (index < 0 || index >= poly.dim())
    throw config_error("variable_support: index out of range");
  EffectiveSystem sys = effective_system(poly);
  return support_impl(sys, poly.kappa, index, pins, poly.dim());
}

Eigen::VectorXd feasible_point(const ConstraintPolytope& poly) {
  EffectiveSystem sys = effective_system(poly);
  const int n = poly.dim();
  const int m_in = static_cast<int>(sys.ineq_rows.rows());

  // Variables (p, t): maximize the uniform margin t above the floor and
  // inside every inequality.
  LinearProgram lp;
  lp.c = Eigen::VectorXd::Zero(n + 1);
  lp.c[n] = -1.0;  // maximize t
  lp.A_eq = Eigen::MatrixXd::Zero(sys.eq_rows.rows(), n + 1);
  lp.A_eq.leftCols(n) = sys.eq_rows;
  lp.b_eq = sys.eq_targets;
  lp.A_ub = Eigen::MatrixXd::Zero(n + m_in, n + 1);
  lp.b_ub = Eigen::VectorXd(n + m_in);
  for (int i = 0; i < n; ++i) {
    lp.A_ub(i, i) = -1.0;
    lp.A_ub(i, n) = 1.0;
    lp.b_ub[i] = -poly.kappa;
  }
  if (m_in > 0) {
    lp.A_ub.block(n, 0, m_in, n) = sys.ineq_rows;
    lp.A_ub.block(n, n, m_in, 1).setOnes();
    lp.b_ub.tail(m_in) = sys.ineq_targets;
  }
  lp.lo = Eigen::VectorXd::Constant(n + 1, poly.kappa);
  lp.hi = Eigen::VectorXd::Constant(n + 1, kInf);
  lp.lo[n] = 0.0;
  lp.hi[n] = 1.0;

  LpResult res = solve_lp(lp);
  if (res.status != LpStatus::optimal)
    throw numeric_error("feasible_point: polytope is empty");
  Eigen::VectorXd p = res.x.head(n);
  if (!check_feasible(p, poly, 1e-8))
    throw numeric_error("feasible_point: solution failed the feasibility check");
  return p;
}

Eigen::VectorXd sequential_lp_sample(const ConstraintPolytope& poly,
                                     CounterRng& rng) {
  EffectiveSystem sys = effective_system(poly);
  const int n = poly.dim();
  const int m = static_cast<int>(sys.eq_rows.rows());

  // Bound (determined) cells: a nonsingular column basis of the equality
  // rows; everything else is free and gets pinned in index order.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sys.eq_rows);
  qr.setThreshold(1e-10);
  const int rank = static_cast<int>(qr.rank());
  if (rank < m)
    throw numeric_error("sequential sample: equality rows rank-deficient");
  std::vector<bool> determined(n, false);
  for (int k = 0; k < rank; ++k)
    determined[qr.colsPermutation().indices()[k]] = true;

  std::vector<std::pair<int, double>> pins;
  pins.reserve(n - rank);
  for (int i = 0; i < n; ++i) {
    if (determined[i]) continue;
    auto [lo, hi] = support_impl(sys, poly.kappa, i, pins, n);
    double val;
    if (hi - lo <= 1e-12) {
      val = 0.5 * (lo + hi);
    } else {
      double margin = std::min(1e-9, 0.25 * (hi - lo));
      val = rng.uniform(lo + margin, hi - margin);
    }
    pins.emplace_back(i, val);
  }

  // Complete the determined cells from the equality system.
  Eigen::MatrixXd a_det(m, rank);
  Eigen::VectorXd rhs = sys.eq_targets;
  std::vector<int> det_idx;
  det_idx.reserve(rank);
  for (int i = 0; i < n; ++i)
    if (determined[i]) det_idx.push_back(i);
  for (int k = 0; k < rank; ++k) a_det.col(k) = sys.eq_rows.col(det_idx[k]);
  for (const auto& [i, v] : pins) rhs -= v * sys.eq_rows.col(i);
  Eigen::VectorXd x_det = a_det.colPivHouseholderQr().solve(rhs);

  Eigen::VectorXd p(n);
  for (const auto& [i, v] : pins) p[i] = v;
  for (int k = 0; k < rank; ++k) p[det_idx[k]] = x_det[k];

  if (!check_feasible(p, poly, 1e-9))
    throw numeric_error("sequential sample: completion failed feasibility");
  return p;
}

}  // namespace causalbounds
