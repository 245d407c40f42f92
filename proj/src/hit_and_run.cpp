#include "causalbounds/hit_and_run.hpp"

#include <cmath>

#include "causalbounds/errors.hpp"

namespace causalbounds {

namespace {

constexpr double kStepClip = 1e6;
constexpr double kDirTol = 1e-12;
constexpr double kCoefTol = 1e-14;
constexpr long kRefreshEvery = 1000;
constexpr double kDriftTol = 1e-9;

// Chord of { t : p + t d feasible } against the floor and the inequality rows,
// given the cached row values v = ineq_rows * p and coefficients c =
// ineq_rows * d.
StepRange chord(const Eigen::VectorXd& p, const Eigen::VectorXd& d,
                double kappa, const Eigen::VectorXd& v,
                const Eigen::VectorXd& c, const Eigen::VectorXd& targets) {
  double nd = d.norm();
  if (nd < kDirTol) throw numeric_error("hit-and-run: degenerate direction");
  double clip = kStepClip / nd;
  double lo = -clip, hi = clip;
  for (int x = 0; x < p.size(); ++x) {
    double dx = d[x];
    if (dx > kCoefTol)
      lo = std::max(lo, (kappa - p[x]) / dx);
    else if (dx < -kCoefTol)
      hi = std::min(hi, (kappa - p[x]) / dx);
  }
  for (int j = 0; j < c.size(); ++j) {
    double cj = c[j];
    if (cj > kCoefTol)
      hi = std::min(hi, (targets[j] - v[j]) / cj);
    else if (cj < -kCoefTol)
      lo = std::max(lo, (targets[j] - v[j]) / cj);
  }
  // A feasible p keeps 0 inside the chord up to roundoff.
  lo = std::min(lo, 0.0);
  hi = std::max(hi, 0.0);
  return {lo, hi};
}

// Validated before any row products touch the start vector.
const Eigen::VectorXd& checked_start(const Eigen::VectorXd& start,
                                     const ConstraintPolytope& poly) {
  if (start.size() != poly.dim())
    throw config_error("hit-and-run: start dimension mismatch");
  if (!check_feasible(start, poly, 1e-9))
    throw numeric_error("hit-and-run: start point is infeasible");
  return start;
}

}  // namespace

Eigen::MatrixXd helmert_basis(int n) {
  if (n < 1) throw config_error("helmert_basis: n must be >= 1");
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n - 1);
  for (int j = 0; j + 1 < n; ++j) {
    double s = 1.0 / std::sqrt(static_cast<double>(j + 1) * (j + 2));
    for (int r = 0; r <= j; ++r) h(r, j) = s;
    h(j + 1, j) = -(j + 1) * s;
  }
  return h;
}

Eigen::MatrixXd marginal_null_basis(const GridSpec& grid) {
  grid.validate();
  Eigen::MatrixXd ha = helmert_basis(grid.ayw_cells());
  Eigen::MatrixXd hu = helmert_basis(grid.n_u);
  Eigen::MatrixXd q(ha.rows() * hu.rows(), ha.cols() * hu.cols());
  for (int i = 0; i < ha.rows(); ++i)
    for (int j = 0; j < ha.cols(); ++j)
      q.block(i * hu.rows(), j * hu.cols(), hu.rows(), hu.cols()) =
          ha(i, j) * hu;
  return q;
}

Eigen::MatrixXd null_basis(const ConstraintPolytope& poly) {
  if (poly.marginal_grid && poly.slack <= 0.0)
    return marginal_null_basis(*poly.marginal_grid);
  EffectiveSystem sys = effective_system(poly);
  const int n = poly.dim();
  if (sys.eq_rows.rows() == 0)
    return Eigen::MatrixXd::Identity(n, n);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(sys.eq_rows, Eigen::ComputeFullV);
  double tol = std::max(sys.eq_rows.rows(), sys.eq_rows.cols()) * 1e-14 *
               svd.singularValues()[0];
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > tol) ++rank;
  if (rank >= n) throw numeric_error("null_basis: equality kernel is empty");
  return svd.matrixV().rightCols(n - rank);
}

Eigen::VectorXd sample_direction(const Eigen::MatrixXd& basis,
                                 CounterRng& rng) {
  Eigen::VectorXd z(basis.cols());
  for (int i = 0; i < z.size(); ++i) z[i] = rng.gaussian();
  return basis * z;
}

StepRange step_range(const Eigen::VectorXd& p, const Eigen::VectorXd& d,
                     const ConstraintPolytope& poly) {
  if (p.size() != poly.dim() || d.size() != poly.dim())
    throw config_error("step_range: dimension mismatch");
  EffectiveSystem sys = effective_system(poly);
  Eigen::VectorXd v = sys.ineq_rows * p;
  Eigen::VectorXd c = sys.ineq_rows * d;
  return chord(p, d, poly.kappa, v, c, sys.ineq_targets);
}

HitAndRunChain::HitAndRunChain(const ConstraintPolytope& poly,
                               const Eigen::VectorXd& start,
                               std::uint64_t seed)
    : poly_(poly), system_(effective_system(poly)), basis_(null_basis(poly)),
      state_{checked_start(start, poly), system_.ineq_rows * start,
             CounterRng(seed), 0} {}

void HitAndRunChain::step() {
  Eigen::VectorXd d = sample_direction(basis_, state_.rng);
  Eigen::VectorXd c = system_.ineq_rows * d;
  StepRange r = chord(state_.p, d, poly_.kappa, state_.ineq_values, c,
                      system_.ineq_targets);
  double t = state_.rng.uniform(r.lo, r.hi);
  state_.p += t * d;
  state_.ineq_values += t * c;
  ++state_.steps_done;
  if (state_.steps_done % kRefreshEvery == 0) {
    Eigen::VectorXd exact = system_.ineq_rows * state_.p;
    if (system_.ineq_rows.rows() > 0 &&
        (exact - state_.ineq_values).cwiseAbs().maxCoeff() > kDriftTol)
      throw numeric_error("hit-and-run: incremental row values drifted");
    state_.ineq_values = exact;
  }
}

Eigen::MatrixXd run_chain(const ConstraintPolytope& poly,
                          const Eigen::VectorXd& start, long samples,
                          const ChainOptions& opts) {
  if (samples < 0) throw config_error("run_chain: samples must be >= 0");
  if (opts.thin < 1) throw config_error("run_chain: thin must be >= 1");
  HitAndRunChain chain(poly, start, opts.seed);
  long burn = opts.burn_in >= 0 ? opts.burn_in : 10L * chain.kernel_dim();
  for (long i = 0; i < burn; ++i) chain.step();
  Eigen::MatrixXd out(samples, poly.dim());
  for (long s = 0; s < samples; ++s) {
    for (long k = 0; k < opts.thin; ++k) chain.step();
    out.row(s) = chain.current();
  }
  return out;
}

}  // namespace causalbounds
