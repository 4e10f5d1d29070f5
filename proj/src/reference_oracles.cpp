#include "fpc/reference_oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/LU>

#include "fpc/admm.hpp"
#include "fpc/error.hpp"

namespace fpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;
constexpr double kOptTol = 1e-10;

// Dense bounded-variable revised simplex. Nonbasic variables sit at 0 or at
// their upper bound; the basis matrix is refactorized from scratch on every
// pivot, which is plenty for the tiny instances this oracle is meant for.
class BoundedSimplex {
 public:
  BoundedSimplex(const Eigen::MatrixXd& e, const Eigen::VectorXd& b, Eigen::VectorXd upper)
      : e_(e), b_(b), upper_(std::move(upper)),
        at_upper_(static_cast<std::size_t>(e.cols()), false) {}

  void set_basis(std::vector<Eigen::Index> basis) { basis_ = std::move(basis); }
  void set_upper(Eigen::Index j, double ub) { upper_(j) = ub; }
  const std::vector<Eigen::Index>& basis() const { return basis_; }

  enum class Outcome { Optimal, Unbounded, IterationLimit };

  Outcome run(const Eigen::VectorXd& cost, int max_pivots, int& pivots) {
    const Eigen::Index r = e_.rows();
    const Eigen::Index ncols = e_.cols();
    std::vector<char> is_basic(static_cast<std::size_t>(ncols), 0);
    for (;;) {
      std::fill(is_basic.begin(), is_basic.end(), 0);
      for (auto j : basis_) is_basic[static_cast<std::size_t>(j)] = 1;

      refactor();
      const Eigen::VectorXd xb = basic_values();
      Eigen::VectorXd cb(r);
      for (Eigen::Index i = 0; i < r; ++i) cb(i) = cost(basis_[static_cast<std::size_t>(i)]);
      const Eigen::VectorXd pi = lu_.transpose().solve(cb);

      // Bland: lowest-index improving nonbasic column.
      Eigen::Index q = -1;
      for (Eigen::Index j = 0; j < ncols; ++j) {
        if (is_basic[static_cast<std::size_t>(j)]) continue;
        const double dj = cost(j) - pi.dot(e_.col(j));
        const bool up = at_upper_[static_cast<std::size_t>(j)];
        if ((!up && upper_(j) > 0.0 && dj < -kOptTol) || (up && dj > kOptTol)) {
          q = j;
          break;
        }
      }
      if (q < 0) return Outcome::Optimal;
      if (pivots >= max_pivots) return Outcome::IterationLimit;
      ++pivots;

      const double dir = at_upper_[static_cast<std::size_t>(q)] ? -1.0 : 1.0;
      const Eigen::VectorXd alpha = lu_.solve(e_.col(q));

      double theta = upper_(q);  // bound flip of the entering column
      Eigen::Index leave = -1;
      bool leave_to_upper = false;
      for (Eigen::Index i = 0; i < r; ++i) {
        const Eigen::Index var = basis_[static_cast<std::size_t>(i)];
        const double rate = -dir * alpha(i);
        double t;
        bool to_upper;
        if (rate < -kPivotTol) {
          t = std::max(0.0, xb(i)) / -rate;
          to_upper = false;
        } else if (rate > kPivotTol && std::isfinite(upper_(var))) {
          t = std::max(0.0, upper_(var) - xb(i)) / rate;
          to_upper = true;
        } else {
          continue;
        }
        const bool better = t < theta - 1e-14 ||
                            (leave >= 0 && t <= theta + 1e-14 &&
                             var < basis_[static_cast<std::size_t>(leave)]);
        if (better || (leave < 0 && t <= theta)) {
          theta = t;
          leave = i;
          leave_to_upper = to_upper;
        }
      }
      if (!std::isfinite(theta)) return Outcome::Unbounded;

      if (leave < 0) {
        at_upper_[static_cast<std::size_t>(q)] = !at_upper_[static_cast<std::size_t>(q)];
        continue;
      }
      const Eigen::Index out = basis_[static_cast<std::size_t>(leave)];
      at_upper_[static_cast<std::size_t>(out)] = leave_to_upper;
      at_upper_[static_cast<std::size_t>(q)] = false;
      basis_[static_cast<std::size_t>(leave)] = q;
    }
  }

  Eigen::VectorXd solution() {
    refactor();
    const Eigen::VectorXd xb = basic_values();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(e_.cols());
    for (Eigen::Index j = 0; j < e_.cols(); ++j) {
      if (at_upper_[static_cast<std::size_t>(j)]) x(j) = upper_(j);
    }
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      x(basis_[i]) = std::clamp(xb(static_cast<Eigen::Index>(i)), 0.0, upper_(basis_[i]));
    }
    return x;
  }

 private:
  void refactor() {
    const Eigen::Index r = e_.rows();
    Eigen::MatrixXd bm(r, r);
    for (Eigen::Index i = 0; i < r; ++i) bm.col(i) = e_.col(basis_[static_cast<std::size_t>(i)]);
    lu_.compute(bm);
  }

  Eigen::VectorXd basic_values() const {
    Eigen::VectorXd rhs = b_;
    for (Eigen::Index j = 0; j < e_.cols(); ++j) {
      if (at_upper_[static_cast<std::size_t>(j)]) rhs -= upper_(j) * e_.col(j);
    }
    return lu_.solve(rhs);
  }

  const Eigen::MatrixXd& e_;
  const Eigen::VectorXd& b_;
  Eigen::VectorXd upper_;
  std::vector<bool> at_upper_;
  std::vector<Eigen::Index> basis_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

}  // namespace

BoxLpSolution solve_box_lp(const BoxLp& lp, int max_pivots) {
  const Eigen::Index r = lp.e.rows();
  const Eigen::Index nv = lp.e.cols();
  if (lp.b.size() != r || lp.cost.size() != nv || lp.upper.size() != nv) {
    throw DimensionMismatch("solve_box_lp: inconsistent problem dimensions");
  }
  if ((lp.upper.array() < 0.0).any()) {
    throw InvalidArgument("solve_box_lp: upper bounds must be non-negative");
  }

  // Artificial column i carries sign(b_i) e_i so that the all-artificial
  // basis starts feasible at |b|.
  Eigen::MatrixXd e(r, nv + r);
  e.leftCols(nv) = lp.e;
  e.rightCols(r).setZero();
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(r));
  for (Eigen::Index i = 0; i < r; ++i) {
    e(i, nv + i) = lp.b(i) >= 0.0 ? 1.0 : -1.0;
    basis[static_cast<std::size_t>(i)] = nv + i;
  }
  Eigen::VectorXd upper(nv + r);
  upper.head(nv) = lp.upper;
  upper.tail(r).setConstant(kInf);

  BoundedSimplex simplex(e, lp.b, upper);
  simplex.set_basis(basis);

  BoxLpSolution out;
  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(nv + r);
  phase1.tail(r).setOnes();
  auto outcome = simplex.run(phase1, max_pivots, out.pivots);
  if (outcome == BoundedSimplex::Outcome::IterationLimit) {
    throw NumericalError("solve_box_lp: phase one hit the pivot limit");
  }
  Eigen::VectorXd x = simplex.solution();
  const double infeasibility = x.tail(r).sum();
  if (infeasibility > 1e-9 * std::max(1.0, lp.b.lpNorm<Eigen::Infinity>())) {
    out.status = BoxLpSolution::Status::Infeasible;
    out.x = x.head(nv);
    return out;
  }

  // Phase two: artificials are pinned to zero and can no longer enter.
  for (Eigen::Index i = 0; i < r; ++i) simplex.set_upper(nv + i, 0.0);
  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(nv + r);
  phase2.head(nv) = lp.cost;
  outcome = simplex.run(phase2, max_pivots, out.pivots);
  if (outcome == BoundedSimplex::Outcome::IterationLimit) {
    throw NumericalError("solve_box_lp: phase two hit the pivot limit");
  }
  if (outcome == BoundedSimplex::Outcome::Unbounded) {
    out.status = BoxLpSolution::Status::Unbounded;
    return out;
  }
  x = simplex.solution();
  out.x = x.head(nv);
  out.objective = lp.cost.dot(out.x);
  return out;
}

DualSolution solve_dual_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& y) {
  const Eigen::Index m = a.rows();
  if (y.size() != m) throw DimensionMismatch("solve_dual_lp: label count does not match A");
  if (m == 0) throw EmptyDataError("solve_dual_lp: empty instance");
  if (static_cast<std::size_t>(m) > kMaxLpRows) {
    throw InvalidArgument("solve_dual_lp: m=" + std::to_string(m) + " exceeds the oracle limit of " +
                          std::to_string(kMaxLpRows));
  }
  // Work in t = m a in [0,1]^m; the equality rows are homogeneous, so the
  // rescaling leaves them unchanged.
  BoxLp lp;
  lp.e = a.transpose() * y.asDiagonal();
  lp.b = Eigen::VectorXd::Zero(a.cols());
  lp.cost = -Eigen::VectorXd::Ones(m);
  lp.upper = Eigen::VectorXd::Ones(m);
  const BoxLpSolution sol = solve_box_lp(lp);
  if (sol.status != BoxLpSolution::Status::Optimal) {
    // a = 0 is always feasible and the objective is bounded by 1.
    throw NumericalError("solve_dual_lp: simplex reported a non-optimal status");
  }
  const double inv_m = 1.0 / static_cast<double>(m);
  DualSolution out;
  out.a = sol.x * inv_m;
  out.c = (Eigen::VectorXd::Ones(m) - sol.x) * inv_m;
  out.value = out.a.sum();
  out.pivots = sol.pivots;
  return out;
}

DualSolution solve_dual_lp(const DesignMatrix& dm, const Eigen::VectorXd& y) {
  return solve_dual_lp(dm.a(), y);
}

double KktReport::max_violation() const {
  return std::max({dual_feasibility, stationarity, slackness_a, slackness_c, std::abs(duality_gap)});
}

nlohmann::json KktReport::to_json() const {
  return {
      {"dual_feasibility", dual_feasibility},
      {"stationarity", stationarity},
      {"slackness_a", slackness_a},
      {"slackness_c", slackness_c},
      {"duality_gap", duality_gap},
      {"primal_objective", primal_objective},
      {"dual_value", dual_value},
      {"a_inf_norm", a_inf_norm},
      {"tol", tol},
      {"tolerance_scale", "stationarity and slackness compared against tol*max(1,a_inf_norm)"},
      {"pass", pass},
  };
}

KktReport check_kkt(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, const Eigen::VectorXd& u,
                    const DualSolution& dual, double tol) {
  const Eigen::Index m = a.rows();
  if (y.size() != m || u.size() != a.cols() || dual.a.size() != m || dual.c.size() != m) {
    throw DimensionMismatch("check_kkt: dimensions do not agree");
  }
  const double inv_m = m > 0 ? 1.0 / static_cast<double>(m) : 0.0;
  const Eigen::VectorXd margin = y.cwiseProduct(a * u);
  const Eigen::VectorXd xi = (1.0 - margin.array()).max(0.0).matrix();

  KktReport r;
  r.tol = tol;
  r.a_inf_norm = m > 0 ? a.cwiseAbs().rowwise().sum().maxCoeff() : 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    r.dual_feasibility = std::max({r.dual_feasibility, -dual.a(i), -dual.c(i),
                                   std::abs(dual.a(i) + dual.c(i) - inv_m)});
    r.slackness_a = std::max(r.slackness_a, std::abs(dual.a(i) * (1.0 - xi(i) - margin(i))));
    r.slackness_c = std::max(r.slackness_c, std::abs(dual.c(i) * xi(i)));
  }
  r.stationarity = m > 0 ? (a.transpose() * y.cwiseProduct(dual.a)).lpNorm<Eigen::Infinity>() : 0.0;
  r.primal_objective = m > 0 ? xi.sum() * inv_m : 0.0;
  r.dual_value = dual.a.sum();
  r.duality_gap = r.primal_objective - r.dual_value;

  const double scaled = tol * std::max(1.0, r.a_inf_norm);
  r.pass = r.dual_feasibility <= tol && r.stationarity <= scaled && r.slackness_a <= scaled &&
           r.slackness_c <= scaled && std::abs(r.duality_gap) <= tol;
  return r;
}

SubgradientResult subgradient_baseline(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                                       int iters, StepRule rule, double step0,
                                       const Eigen::VectorXd& u0) {
  if (iters < 1) throw InvalidArgument("subgradient_baseline: iters must be >= 1");
  const Eigen::Index m = a.rows();
  if (y.size() != m) throw DimensionMismatch("subgradient_baseline: label count does not match A");
  if (m == 0) throw EmptyDataError("subgradient_baseline: empty instance");
  if (u0.size() != 0 && u0.size() != a.cols()) {
    throw DimensionMismatch("subgradient_baseline: u0 has the wrong length");
  }
  if (!(step0 > 0.0)) {
    const double row_norm_sq = a.rowwise().squaredNorm().maxCoeff();
    step0 = row_norm_sq > 0.0 ? 1.0 / row_norm_sq : 1.0;
  }
  const double inv_m = 1.0 / static_cast<double>(m);

  Eigen::VectorXd u = u0.size() ? u0 : Eigen::VectorXd::Zero(a.cols());
  Eigen::VectorXd au = a * u;
  SubgradientResult out;
  out.u = u;
  double best = hinge_objective(au, y);
  out.best_objective.reserve(static_cast<std::size_t>(iters));

  Eigen::VectorXd coeff(m);
  for (int k = 1; k <= iters; ++k) {
    for (Eigen::Index i = 0; i < m; ++i) coeff(i) = y(i) * au(i) < 1.0 ? -y(i) * inv_m : 0.0;
    const Eigen::VectorXd g = a.transpose() * coeff;
    const double step = rule == StepRule::Constant ? step0 : step0 / std::sqrt(static_cast<double>(k));
    u -= step * g;
    au.noalias() = a * u;
    const double f = hinge_objective(au, y);
    if (f < best) {
      best = f;
      out.u = u;
    }
    out.best_objective.push_back(best);
  }
  return out;
}

}  // namespace fpc
