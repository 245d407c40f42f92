#include "causalbounds/contextual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "causalbounds/errors.hpp"
#include "causalbounds/lp.hpp"
#include "parallel.hpp"

namespace causalbounds {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_class(const LinearFunctionClass& fclass) {
  if (fclass.d < 1) throw config_error("function class dimension must be >= 1");
  if (fclass.features.empty()) throw config_error("function class has no contexts");
  const int n_arms = static_cast<int>(fclass.features[0].size());
  if (n_arms == 0) throw config_error("function class has no arms");
  for (const auto& ctx : fclass.features) {
    if (static_cast<int>(ctx.size()) != n_arms)
      throw config_error("ragged feature table");
    for (const auto& phi : ctx)
      if (phi.size() != fclass.d)
        throw config_error("feature dimension mismatch");
  }
  if (fclass.pruned()) {
    if (fclass.lower.rows() != fclass.n_contexts() ||
        fclass.lower.cols() != n_arms || fclass.upper.rows() != fclass.lower.rows() ||
        fclass.upper.cols() != fclass.lower.cols())
      throw config_error("bound table shape mismatch");
    if (((fclass.upper - fclass.lower).array() < 0.0).any())
      throw config_error("bound table has l > h");
  }
}

void check_context(const LinearFunctionClass& fclass, int w) {
  if (w < 0 || w >= fclass.n_contexts())
    throw config_error("context index out of range");
}

// Halfspace c'theta <= b.
struct Halfspace {
  Eigen::VectorXd c;
  double b = 0.0;
};

// Causal rows of the class as halfspace pairs; zero-feature rows are dropped
// when 0 lies in [l, h] and make the class empty otherwise.
std::vector<Halfspace> causal_halfspaces(const LinearFunctionClass& fclass) {
  std::vector<Halfspace> rows;
  if (!fclass.pruned()) return rows;
  for (int w = 0; w < fclass.n_contexts(); ++w) {
    for (int a = 0; a < fclass.n_arms(); ++a) {
      const Eigen::VectorXd& phi = fclass.features[w][a];
      const double l = fclass.lower(w, a), h = fclass.upper(w, a);
      if (phi.norm() == 0.0) {
        if (l > 0.0 || h < 0.0)
          throw numeric_error("function class is empty: zero feature row excludes 0");
        continue;
      }
      rows.push_back({phi, h});
      rows.push_back({-phi, -l});
    }
  }
  return rows;
}

}  // namespace

std::vector<int> candidate_actions_box(const Eigen::MatrixXd& lower,
                                       const Eigen::MatrixXd& upper, int w) {
  if (lower.rows() != upper.rows() || lower.cols() != upper.cols())
    throw config_error("bound table shape mismatch");
  if (w < 0 || w >= lower.rows()) throw config_error("context index out of range");
  if (lower.cols() == 0) throw config_error("bound table has no arms");
  const double threshold = lower.row(w).maxCoeff();
  std::vector<int> kept;
  for (int a = 0; a < lower.cols(); ++a)
    if (upper(w, a) >= threshold) kept.push_back(a);
  return kept;
}

std::vector<int> candidate_actions_linear(const LinearFunctionClass& fclass,
                                          int w) {
  check_class(fclass);
  check_context(fclass, w);
  const int d = fclass.d;
  const int n_arms = fclass.n_arms();
  if (n_arms == 1) return {0};

  std::vector<int> kept;
  int infeasible = 0;
  for (int a = 0; a < n_arms; ++a) {
    // Variables (theta, s); rows use only context w's causal boxes.
    std::vector<Eigen::VectorXd> ub_rows;
    std::vector<double> ub_rhs;
    for (int i = 0; i < n_arms; ++i) {
      if (i == a) continue;
      Eigen::VectorXd row(d + 1);
      row.head(d) = fclass.features[w][i] - fclass.features[w][a];
      row[d] = 1.0;
      ub_rows.push_back(row);
      ub_rhs.push_back(0.0);
    }
    if (fclass.pruned()) {
      for (int i = 0; i < n_arms; ++i) {
        Eigen::VectorXd row(d + 1);
        row.head(d) = fclass.features[w][i];
        row[d] = 0.0;
        ub_rows.push_back(row);
        ub_rhs.push_back(fclass.upper(w, i));
        ub_rows.push_back(-row);
        ub_rhs.push_back(-fclass.lower(w, i));
      }
    }

    LinearProgram lp;
    lp.c = Eigen::VectorXd::Zero(d + 1);
    lp.c[d] = -1.0;  // maximize s
    lp.A_ub.resize(ub_rows.size(), d + 1);
    lp.b_ub.resize(ub_rows.size());
    for (std::size_t r = 0; r < ub_rows.size(); ++r) {
      lp.A_ub.row(r) = ub_rows[r].transpose();
      lp.b_ub[r] = ub_rhs[r];
    }
    lp.lo = Eigen::VectorXd::Constant(d + 1, -1.0);
    lp.hi = Eigen::VectorXd::Constant(d + 1, 1.0);
    lp.lo[d] = -10.0;
    lp.hi[d] = 10.0;

    const LpResult res = solve_lp(lp);
    if (res.status == LpStatus::infeasible) {
      ++infeasible;
      continue;
    }
    if (res.status != LpStatus::optimal)
      throw numeric_error("candidate-set LP did not solve");
    if (-res.objective >= -1e-9) kept.push_back(a);
  }
  if (infeasible == n_arms)
    throw numeric_error("pruned function class is empty");
  return kept;
}

bool theta_feasible(const LinearFunctionClass& fclass,
                    const Eigen::VectorXd& theta, double tol) {
  check_class(fclass);
  if (theta.size() != fclass.d) throw config_error("theta dimension mismatch");
  if (theta.lpNorm<Eigen::Infinity>() > 1.0 + tol) return false;
  if (!fclass.pruned()) return true;
  for (int w = 0; w < fclass.n_contexts(); ++w) {
    for (int a = 0; a < fclass.n_arms(); ++a) {
      const double v = theta.dot(fclass.features[w][a]);
      if (v < fclass.lower(w, a) - tol || v > fclass.upper(w, a) + tol)
        return false;
    }
  }
  return true;
}

Eigen::VectorXd feasible_theta(const LinearFunctionClass& fclass) {
  check_class(fclass);
  const int d = fclass.d;
  const auto rows = causal_halfspaces(fclass);

  // Variables (theta, t): maximize the margin t inside every causal row.
  LinearProgram lp;
  lp.c = Eigen::VectorXd::Zero(d + 1);
  lp.c[d] = -1.0;
  lp.A_ub.resize(rows.size(), d + 1);
  lp.b_ub.resize(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    lp.A_ub.row(r).head(d) = rows[r].c.transpose();
    lp.A_ub(r, d) = 1.0;
    lp.b_ub[r] = rows[r].b;
  }
  lp.lo = Eigen::VectorXd::Constant(d + 1, -1.0);
  lp.hi = Eigen::VectorXd::Constant(d + 1, 1.0);
  lp.lo[d] = 0.0;

  const LpResult res = solve_lp(lp);
  if (res.status != LpStatus::optimal)
    throw numeric_error("function class is empty");
  return res.x.head(d);
}

double parameter_diameter(const LinearFunctionClass& fclass) {
  check_class(fclass);
  const int d = fclass.d;
  if (!fclass.pruned()) return 2.0 * std::sqrt(static_cast<double>(d));

  auto rows = causal_halfspaces(fclass);
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
    e[i] = 1.0;
    rows.push_back({e, 1.0});
    rows.push_back({-e, 1.0});
  }

  if (d == 2) {
    // Exact: enumerate vertices of the constraint polygon.
    std::vector<Eigen::Vector2d> verts;
    const int m = static_cast<int>(rows.size());
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        Eigen::Matrix2d A;
        A.row(0) = rows[i].c.transpose();
        A.row(1) = rows[j].c.transpose();
        if (std::abs(A.determinant()) < 1e-12) continue;
        Eigen::Vector2d v = A.inverse() * Eigen::Vector2d(rows[i].b, rows[j].b);
        bool ok = true;
        for (const auto& r : rows)
          if (r.c.dot(v) > r.b + 1e-9) { ok = false; break; }
        if (ok) verts.push_back(v);
      }
    }
    if (verts.empty()) throw numeric_error("function class is empty");
    double diam = 0.0;
    for (std::size_t i = 0; i < verts.size(); ++i)
      for (std::size_t j = i + 1; j < verts.size(); ++j)
        diam = std::max(diam, (verts[i] - verts[j]).norm());
    return diam;
  }

  // Norm of the per-coordinate widths: an upper bound, tight for boxes.
  Eigen::VectorXd widths(d);
  for (int i = 0; i < d; ++i) {
    LinearProgram lp;
    lp.c = Eigen::VectorXd::Zero(d);
    lp.c[i] = 1.0;
    lp.A_ub.resize(rows.size() - 2 * d, d);
    lp.b_ub.resize(rows.size() - 2 * d);
    for (std::size_t r = 0; r + 2 * d < rows.size(); ++r) {
      lp.A_ub.row(r) = rows[r].c.transpose();
      lp.b_ub[r] = rows[r].b;
    }
    lp.lo = Eigen::VectorXd::Constant(d, -1.0);
    lp.hi = Eigen::VectorXd::Constant(d, 1.0);
    const LpResult lo = solve_lp(lp);
    lp.c[i] = -1.0;
    const LpResult hi = solve_lp(lp);
    if (lo.status != LpStatus::optimal || hi.status != LpStatus::optimal)
      throw numeric_error("function class is empty");
    widths[i] = -hi.objective - lo.objective;
  }
  return widths.norm();
}

double covering_proxy(double diam, int d, long horizon) {
  if (d < 0) throw config_error("dimension must be nonnegative");
  if (d == 0) return 0.0;
  if (!(diam > 0.0)) throw config_error("diameter must be positive");
  if (horizon < 1) throw config_error("horizon must be >= 1");
  return d * std::log(3.0 * static_cast<double>(horizon) * diam);
}

double exploration_log_term(double delta, double log_f, long horizon) {
  if (!(delta > 0.0 && delta < 1.0)) throw config_error("delta must be in (0, 1)");
  if (horizon < 2) throw config_error("horizon must be >= 2");
  const double v =
      std::log(2.0 / delta) + log_f + std::log(std::log(static_cast<double>(horizon)));
  if (!(v > 0.0)) throw numeric_error("nonpositive exploration log term");
  return v;
}

double exploration_rate(int epoch, int action_count, double tau_prev,
                        double eta, double log_term) {
  if (eta <= 0.0) throw config_error("eta must be positive");
  if (epoch < 1) throw config_error("epoch must be >= 1");
  if (action_count < 1) throw config_error("empty action set");
  if (epoch == 1) return 1.0;
  if (!(tau_prev > 0.0)) throw config_error("tau_prev must be positive");
  if (!(log_term > 0.0)) throw config_error("log term must be positive");
  return std::sqrt(eta * action_count * tau_prev / log_term);
}

Eigen::VectorXd igw_distribution(const Eigen::VectorXd& values, double gamma) {
  const int k = static_cast<int>(values.size());
  if (k == 0) throw config_error("empty action set");
  if (gamma < 0.0) throw config_error("gamma must be nonnegative");
  int greedy = 0;
  for (int a = 1; a < k; ++a)
    if (values[a] > values[greedy]) greedy = a;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(k);
  double mass = 0.0;
  for (int a = 0; a < k; ++a) {
    if (a == greedy) continue;
    p[a] = 1.0 / (k + gamma * (values[greedy] - values[a]));
    mass += p[a];
  }
  if (mass > 1.0 + 1e-12) throw numeric_error("inverse-gap mass exceeds 1");
  p[greedy] = std::max(0.0, 1.0 - mass);
  return p;
}

namespace {

// Dykstra projection onto the parameter box intersected with the causal rows.
class ClassProjector {
 public:
  explicit ClassProjector(const LinearFunctionClass& fclass)
      : rows_(causal_halfspaces(fclass)) {}

  Eigen::VectorXd project(Eigen::VectorXd x) const {
    const int m = static_cast<int>(rows_.size()) + 1;
    std::vector<Eigen::VectorXd> corr(m, Eigen::VectorXd::Zero(x.size()));
    for (int sweep = 0; sweep < 500; ++sweep) {
      double moved = 0.0;
      for (int s = 0; s < m; ++s) {
        const Eigen::VectorXd z = x + corr[s];
        Eigen::VectorXd y;
        if (s == 0) {
          y = z.cwiseMax(-1.0).cwiseMin(1.0);
        } else {
          const auto& r = rows_[s - 1];
          const double viol = r.c.dot(z) - r.b;
          y = (viol > 0.0) ? (z - (viol / r.c.squaredNorm()) * r.c).eval() : z;
        }
        corr[s] = z - y;
        moved += (x - y).norm();
        x = y;
      }
      if (moved < 1e-13) break;
    }
    return x;
  }

 private:
  std::vector<Halfspace> rows_;
};

}  // namespace

Eigen::VectorXd constrained_least_squares(const Eigen::MatrixXd& gram,
                                          const Eigen::VectorXd& moment,
                                          long count,
                                          const LinearFunctionClass& fclass) {
  check_class(fclass);
  if (gram.rows() != fclass.d || gram.cols() != fclass.d ||
      moment.size() != fclass.d)
    throw config_error("sufficient statistic dimension mismatch");
  Eigen::VectorXd x = feasible_theta(fclass);
  if (count == 0) return x;

  const double lmax =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram).eigenvalues().maxCoeff();
  if (lmax < 1e-12) return x;
  const double step = 1.0 / (2.0 * lmax);
  const ClassProjector projector(fclass);
  for (int it = 0; it < 100000; ++it) {
    const Eigen::VectorXd grad = 2.0 * (gram * x - moment);
    const Eigen::VectorXd next = projector.project(x - step * grad);
    const double pg_norm = (x - next).norm() / step;
    x = next;
    if (pg_norm < 1e-8) break;
  }
  return x;
}

Eigen::VectorXd constrained_least_squares(
    const std::vector<CbObservation>& history,
    const LinearFunctionClass& fclass) {
  check_class(fclass);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(fclass.d, fclass.d);
  Eigen::VectorXd moment = Eigen::VectorXd::Zero(fclass.d);
  for (const auto& obs : history) {
    check_context(fclass, obs.context);
    if (obs.arm < 0 || obs.arm >= fclass.n_arms())
      throw config_error("arm index out of range");
    const Eigen::VectorXd& phi = fclass.features[obs.context][obs.arm];
    gram.noalias() += phi * phi.transpose();
    moment.noalias() += phi * obs.reward;
  }
  return constrained_least_squares(gram, moment,
                                   static_cast<long>(history.size()), fclass);
}

CbMode parse_cb_mode(const std::string& name) {
  if (name == "lp") return CbMode::lp;
  if (name == "box") return CbMode::box;
  if (name == "full") return CbMode::full;
  throw config_error("unknown contextual mode: " + name);
}

std::string cb_mode_name(CbMode mode, bool prune_function_class) {
  if (!prune_function_class) return "falcon";
  switch (mode) {
    case CbMode::lp: return "lp";
    case CbMode::box: return "box";
    case CbMode::full: return "full";
  }
  throw config_error("unknown contextual mode value");
}

Eigen::VectorXd sample_ground_truth(const LinearFunctionClass& fclass,
                                    CounterRng& rng) {
  check_class(fclass);
  Eigen::VectorXd theta(fclass.d);
  for (int k = 0; k < 100000; ++k) {
    for (int i = 0; i < fclass.d; ++i) theta[i] = rng.uniform(-1.0, 1.0);
    if (theta_feasible(fclass, theta, 1e-9)) return theta;
  }
  throw numeric_error("could not sample a parameter inside the causal box");
}

CbTrialResult run_contextual_trial(const CbEnvironment& env,
                                   const Eigen::VectorXd& theta_star,
                                   CbMode mode, bool prune_function_class,
                                   long horizon, double delta, double eta,
                                   std::uint64_t seed, long trial) {
  check_class(env.fclass);
  if (!env.fclass.pruned())
    throw config_error("environment requires causal bound tables");
  if (theta_star.size() != env.fclass.d)
    throw config_error("ground truth dimension mismatch");
  if (horizon < 2) throw config_error("horizon must be >= 2");
  if (!(delta > 0.0 && delta < 1.0)) throw config_error("delta must be in (0, 1)");
  if (eta <= 0.0) throw config_error("eta must be positive");
  if (!prune_function_class && mode != CbMode::full)
    throw config_error("the unpruned class requires the full action set");

  const int d = env.fclass.d;
  const int n_contexts = env.fclass.n_contexts();
  const int n_arms = env.fclass.n_arms();

  const std::uint64_t trial_seed =
      derive_stream(seed, static_cast<std::uint64_t>(trial) + 1);
  CounterRng env_rng(derive_stream(trial_seed, 0));
  CounterRng policy_rng(derive_stream(trial_seed, 1));

  LinearFunctionClass policy_class = env.fclass;
  if (!prune_function_class) {
    policy_class.lower.resize(0, 0);
    policy_class.upper.resize(0, 0);
  }
  const double diam = parameter_diameter(policy_class);
  const double log_f = covering_proxy(diam, d, horizon);
  const double log_term = exploration_log_term(delta, log_f, horizon);

  std::vector<std::vector<int>> candidates(n_contexts);
  for (int w = 0; w < n_contexts; ++w) {
    switch (mode) {
      case CbMode::lp:
        candidates[w] = candidate_actions_linear(env.fclass, w);
        break;
      case CbMode::box:
        candidates[w] = candidate_actions_box(env.fclass.lower, env.fclass.upper, w);
        break;
      case CbMode::full:
        candidates[w].resize(n_arms);
        for (int a = 0; a < n_arms; ++a) candidates[w][a] = a;
        break;
    }
  }

  Eigen::VectorXd best_mean(n_contexts);
  for (int w = 0; w < n_contexts; ++w) {
    double best = -kInf;
    for (int a = 0; a < n_arms; ++a)
      best = std::max(best, theta_star.dot(env.fclass.features[w][a]));
    best_mean[w] = best;
  }

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd moment = Eigen::VectorXd::Zero(d);
  long count = 0;
  Eigen::VectorXd theta_hat;
  int current_epoch = 0;

  CbTrialResult result;
  result.regret.reserve(horizon);
  double cum_regret = 0.0;
  for (long t = 1; t <= horizon; ++t) {
    int epoch = 1;
    while ((1L << epoch) < t) ++epoch;
    if (epoch != current_epoch) {
      theta_hat = constrained_least_squares(gram, moment, count, policy_class);
      current_epoch = epoch;
    }

    const int w = static_cast<int>(env_rng.next_below(n_contexts));
    const auto& cand = candidates[w];
    const double tau_prev = static_cast<double>(1L << (epoch - 1));
    const double gamma = exploration_rate(epoch, static_cast<int>(cand.size()),
                                          tau_prev, eta, log_term);

    Eigen::VectorXd values(cand.size());
    for (std::size_t i = 0; i < cand.size(); ++i)
      values[i] = theta_hat.dot(env.fclass.features[w][cand[i]]);
    const Eigen::VectorXd p = igw_distribution(values, gamma);

    const double u = policy_rng.next_double();
    int pick = static_cast<int>(cand.size()) - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < cand.size(); ++i) {
      acc += p[i];
      if (u < acc) {
        pick = static_cast<int>(i);
        break;
      }
    }
    const int arm = cand[pick];

    const double mean = theta_star.dot(env.fclass.features[w][arm]);
    const double reward = mean + env.sigma * env_rng.gaussian();
    const Eigen::VectorXd& phi = env.fclass.features[w][arm];
    gram.noalias() += phi * phi.transpose();
    moment.noalias() += phi * reward;
    ++count;

    cum_regret += best_mean[w] - mean;
    result.regret.push_back(cum_regret);
  }
  return result;
}

CbRunResult run_contextual(const CbEnvironment& env, CbMode mode,
                           bool prune_function_class, long horizon, int trials,
                           double delta, double eta, std::uint64_t seed,
                           int threads, bool keep_trajectories) {
  if (trials < 1) throw config_error("trials must be >= 1");
  CbRunResult out;
  CounterRng truth_rng(derive_stream(seed, 0));
  out.theta_star = sample_ground_truth(env.fclass, truth_rng);
  out.final_regret.resize(trials);
  if (keep_trajectories) out.trials.resize(trials);
  detail::parallel_for(trials, threads, [&](int trial) {
    CbTrialResult r =
        run_contextual_trial(env, out.theta_star, mode, prune_function_class,
                             horizon, delta, eta, seed, trial);
    out.final_regret[trial] = r.regret.back();
    if (keep_trajectories) out.trials[trial] = std::move(r);
  });

  const Eigen::Map<const Eigen::VectorXd> finals(out.final_regret.data(), trials);
  out.mean = finals.mean();
  const double denom = (trials > 1) ? trials - 1.0 : 1.0;
  out.sd = std::sqrt((finals.array() - out.mean).square().sum() / denom);
  std::vector<double> sorted = out.final_regret;
  std::sort(sorted.begin(), sorted.end());
  out.min = sorted.front();
  out.max = sorted.back();
  out.median = (trials % 2 == 1)
                   ? sorted[trials / 2]
                   : 0.5 * (sorted[trials / 2 - 1] + sorted[trials / 2]);
  return out;
}

}  // namespace causalbounds
